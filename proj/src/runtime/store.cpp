#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "gdsl/runtime.hpp"

namespace gdsl {

namespace {
inline std::size_t ix(std::int64_t v) { return static_cast<std::size_t>(v); }
} // namespace

std::shared_ptr<GraphStore> build_graph_store(const EdgeList &g) {
  if (g.n < 0) throw GraphError("negative vertex count");
  auto s = std::make_shared<GraphStore>();
  s->n = g.n;
  s->m = static_cast<std::int64_t>(g.edges.size());
  s->edgeList = g.edges;
  s->csrOffsets.assign(ix(g.n) + 1, 0);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto &e = g.edges[i];
    if (e.src < 0 || e.src >= g.n || e.dst < 0 || e.dst >= g.n)
      throw GraphError("edge " + std::to_string(i) + " (" + std::to_string(e.src) + ", " +
                       std::to_string(e.dst) + ") out of range for n = " + std::to_string(g.n));
    if (e.weight < 0) throw GraphError("edge " + std::to_string(i) + " has a negative weight");
    ++s->csrOffsets[ix(e.src) + 1];
  }
  std::partial_sum(s->csrOffsets.begin(), s->csrOffsets.end(), s->csrOffsets.begin());
  s->csrTargets.resize(g.edges.size());
  s->csrWeights.resize(g.edges.size());
  s->csrEdge.resize(g.edges.size());
  std::vector<std::int64_t> next(s->csrOffsets.begin(), s->csrOffsets.end() - 1);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto &e = g.edges[i];
    auto k = ix(next[ix(e.src)]++);
    s->csrTargets[k] = e.dst;
    s->csrWeights[k] = e.weight;
    s->csrEdge[k] = static_cast<std::int64_t>(i);
  }
  return s;
}

void GraphStore::build_in() const {
  std::call_once(in_once_, [this] {
    inOffsets_.assign(ix(n) + 1, 0);
    for (const auto &e : edgeList) ++inOffsets_[ix(e.dst) + 1];
    std::partial_sum(inOffsets_.begin(), inOffsets_.end(), inOffsets_.begin());
    inSources_.resize(edgeList.size());
    inEdges_.resize(edgeList.size());
    std::vector<std::int64_t> next(inOffsets_.begin(), inOffsets_.end() - 1);
    for (std::size_t i = 0; i < edgeList.size(); ++i) {
      auto k = ix(next[ix(edgeList[i].dst)]++);
      inSources_[k] = edgeList[i].src;
      inEdges_[k] = static_cast<std::int64_t>(i);
    }
  });
}

const std::vector<std::int64_t> &GraphStore::in_offsets() const {
  build_in();
  return inOffsets_;
}
const std::vector<std::int64_t> &GraphStore::in_sources() const {
  build_in();
  return inSources_;
}
const std::vector<std::int64_t> &GraphStore::in_edges() const {
  build_in();
  return inEdges_;
}

// --- SingleLock ---

SingleLock::SingleLock(std::size_t n) : owners_(n) {
  for (auto &o : owners_) o.store(0, std::memory_order_relaxed);
}

bool SingleLock::try_acquire(std::vector<std::int64_t> ids, int owner) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ix(ids[i]) >= owners_.size())
      throw RuntimeError("single: element " + std::to_string(ids[i]) + " out of range");
    std::int32_t expected = 0;
    if (!owners_[ix(ids[i])].compare_exchange_strong(expected, owner + 1, std::memory_order_acquire)) {
      for (std::size_t j = 0; j < i; ++j) owners_[ix(ids[j])].store(0, std::memory_order_release);
      return false;
    }
  }
  return true;
}

void SingleLock::release(const std::vector<std::int64_t> &ids, int owner) {
  for (auto id : ids) {
    std::int32_t expected = owner + 1;
    owners_[ix(id)].compare_exchange_strong(expected, 0, std::memory_order_release);
  }
}

bool SingleLock::held(std::int64_t id) const {
  return owners_[ix(id)].load(std::memory_order_acquire) != 0;
}

// --- UnionFindSet ---

UnionFindSet::UnionFindSet(std::int64_t n)
    : parent_(ix(n)), rank_(ix(n), 0), lock_(std::make_unique<SingleLock>(ix(n))) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

UnionFindSet::UnionFindSet(const UnionFindSet &other)
    : parent_(other.parent_), rank_(other.rank_),
      lock_(std::make_unique<SingleLock>(other.parent_.size())) {}

UnionFindSet &UnionFindSet::operator=(const UnionFindSet &other) {
  if (this != &other) {
    parent_ = other.parent_;
    rank_ = other.rank_;
    lock_ = std::make_unique<SingleLock>(other.parent_.size());
  }
  return *this;
}

std::int64_t UnionFindSet::find(std::int64_t a) {
  if (a < 0 || a >= size()) throw RuntimeError("find: element " + std::to_string(a) + " out of range");
  for (;;) {
    std::int64_t p = std::atomic_ref(parent_[ix(a)]).load(std::memory_order_acquire);
    if (p == a) return a;
    std::int64_t gp = std::atomic_ref(parent_[ix(p)]).load(std::memory_order_acquire);
    if (gp != p) {
      std::int64_t expected = p;
      std::atomic_ref(parent_[ix(a)]).compare_exchange_weak(expected, gp, std::memory_order_acq_rel);
    }
    a = gp;
  }
}

bool UnionFindSet::unite(std::int64_t a, std::int64_t b) {
  const int owner = 0; // ownership is only used for release matching
  for (;;) {
    std::int64_t ra = find(a), rb = find(b);
    if (ra == rb) return false;
    if (!lock_->try_acquire({ra, rb}, owner)) {
      std::this_thread::yield();
      continue;
    }
    bool roots = std::atomic_ref(parent_[ix(ra)]).load(std::memory_order_acquire) == ra &&
                 std::atomic_ref(parent_[ix(rb)]).load(std::memory_order_acquire) == rb;
    if (roots) {
      // ties: the smaller id stays the root
      std::int64_t hi = ra, lo = rb;
      if (rank_[ix(ra)] > rank_[ix(rb)] || (rank_[ix(ra)] == rank_[ix(rb)] && ra < rb)) std::swap(hi, lo);
      if (rank_[ix(hi)] == rank_[ix(lo)]) ++rank_[ix(lo)];
      std::atomic_ref(parent_[ix(hi)]).store(lo, std::memory_order_release);
    }
    lock_->release({ra, rb}, owner);
    if (roots) return true;
  }
}

std::int64_t UnionFindSet::count_roots() {
  std::int64_t c = 0;
  for (std::int64_t v = 0; v < size(); ++v) c += find(v) == v;
  return c;
}

// --- Worklist ---

Worklist::Worklist(std::int64_t n, WorklistMode mode, std::int64_t delta)
    : mode_(mode), delta_(delta), queued_(ix(n), 0) {
  if (mode == WorklistMode::DeltaStepping && delta <= 0)
    throw DeltaError("delta must be positive, got " + std::to_string(delta));
}

void Worklist::push(std::int64_t v, std::int64_t key) {
  if (v < 0 || ix(v) >= queued_.size())
    throw RuntimeError("worklist: element " + std::to_string(v) + " out of range");
  if (mode_ == WorklistMode::FIFO) {
    if (queued_[ix(v)]) return;
    queued_[ix(v)] = 1;
    fifo_.push_back(v);
    ++pending_;
    return;
  }
  buckets_[std::max<std::int64_t>(key, 0) / delta_].push_back(v);
  ++pending_;
}

std::int64_t Worklist::size() const { return pending_; }

std::uint64_t checksum(const std::vector<std::int64_t> &v) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += static_cast<std::uint64_t>(i + 1) * static_cast<std::uint64_t>(v[i]);
  return s;
}

double load_imbalance(const ExecResult &r) {
  const auto &w = r.perWorkerWork;
  if (w.empty()) return 0;
  double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  if (mean == 0) return 0;
  double var = 0;
  for (double x : w) var += (x - mean) * (x - mean);
  var /= static_cast<double>(w.size());
  return std::sqrt(var) / mean;
}

} // namespace gdsl
