#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gdsl/graph.hpp"
#include "gdsl/lowering.hpp"

namespace gdsl {

class GraphError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class RuntimeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class DivergenceError : public RuntimeError {
public:
  using RuntimeError::RuntimeError;
};
class DeltaError : public RuntimeError {
public:
  using RuntimeError::RuntimeError;
};

// Immutable topology. CSR slots are ordered by (src, input order); csrEdge maps
// a slot back to its edge-list index, which is also the edge property index.
class GraphStore {
public:
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::vector<std::int64_t> csrOffsets;
  std::vector<std::int64_t> csrTargets;
  std::vector<std::int64_t> csrWeights;
  std::vector<std::int64_t> csrEdge;
  std::vector<WEdge> edgeList;

  // Reverse CSR, built on first use.
  const std::vector<std::int64_t> &in_offsets() const;
  const std::vector<std::int64_t> &in_sources() const;
  const std::vector<std::int64_t> &in_edges() const;

private:
  void build_in() const;
  mutable std::once_flag in_once_;
  mutable std::vector<std::int64_t> inOffsets_, inSources_, inEdges_;
};

// Throws GraphError on out-of-range endpoints or negative weights.
std::shared_ptr<GraphStore> build_graph_store(const EdgeList &g);

// Non-blocking per-element try-lock.
class SingleLock {
public:
  explicit SingleLock(std::size_t n = 0);
  // All-or-nothing; `ids` are acquired in ascending order. `owner` >= 0.
  bool try_acquire(std::vector<std::int64_t> ids, int owner);
  bool try_acquire(std::int64_t id, int owner) { return try_acquire(std::vector<std::int64_t>{id}, owner); }
  void release(const std::vector<std::int64_t> &ids, int owner);
  void release(std::int64_t id, int owner) { release(std::vector<std::int64_t>{id}, owner); }
  bool held(std::int64_t id) const;
  std::size_t size() const { return owners_.size(); }

private:
  std::vector<std::atomic<std::int32_t>> owners_; // 0 free, owner + 1 otherwise
};

// Concurrent union-find: path halving, union by rank under per-root locks.
class UnionFindSet {
public:
  explicit UnionFindSet(std::int64_t n = 0);
  UnionFindSet(const UnionFindSet &other);
  UnionFindSet &operator=(const UnionFindSet &other);

  std::int64_t find(std::int64_t a);
  bool unite(std::int64_t a, std::int64_t b); // true iff the roots differed
  std::int64_t size() const { return static_cast<std::int64_t>(parent_.size()); }
  std::int64_t count_roots();

private:
  std::vector<std::int64_t> parent_;
  std::vector<std::int64_t> rank_;
  std::unique_ptr<SingleLock> lock_;
};

enum class WorklistMode { FIFO, DeltaStepping };

// Pending vertices of a Collection. FIFO keeps one deduplicated bag; Δ-stepping
// keeps buckets keyed by floor(key / delta) and hands out the lowest one.
class Worklist {
public:
  Worklist() = default;
  Worklist(std::int64_t n, WorklistMode mode, std::int64_t delta);

  // key is ignored in FIFO mode
  void push(std::int64_t v, std::int64_t key);
  // Removes and returns the next round of work. `key(v)` gives the current key,
  // used to drop entries that moved to a lower bucket after they were pushed.
  template <typename KeyFn> std::vector<std::int64_t> take(KeyFn key);
  std::int64_t size() const;
  bool empty() const { return size() == 0; }
  WorklistMode mode() const { return mode_; }
  std::int64_t delta() const { return delta_; }
  std::int64_t last_bucket() const { return last_bucket_; }

private:
  WorklistMode mode_ = WorklistMode::FIFO;
  std::int64_t delta_ = 1;
  std::vector<std::int64_t> fifo_;
  std::vector<char> queued_;
  std::map<std::int64_t, std::vector<std::int64_t>> buckets_;
  std::int64_t pending_ = 0;
  std::int64_t last_bucket_ = -1;
};

template <typename KeyFn> std::vector<std::int64_t> Worklist::take(KeyFn key) {
  std::vector<std::int64_t> out;
  if (mode_ == WorklistMode::FIFO) {
    out.swap(fifo_);
    for (auto v : out) queued_[static_cast<std::size_t>(v)] = 0;
    pending_ = 0;
    return out;
  }
  while (!buckets_.empty() && out.empty()) {
    auto it = buckets_.begin();
    std::int64_t b = it->first;
    std::vector<std::int64_t> items = std::move(it->second);
    buckets_.erase(it);
    pending_ -= static_cast<std::int64_t>(items.size());
    for (auto v : items) {
      auto &q = queued_[static_cast<std::size_t>(v)];
      if (q || key(v) / delta_ != b) continue; // duplicate or stale entry
      q = 1;
      out.push_back(v);
    }
    for (auto v : out) queued_[static_cast<std::size_t>(v)] = 0;
    if (!out.empty()) last_bucket_ = b;
  }
  return out;
}

struct ExecOptions {
  int threads = 1;
  WorklistMode worklist = WorklistMode::FIFO;
  std::optional<std::int64_t> delta;     // default max(1, average edge weight)
  std::optional<std::int64_t> iterationCap; // per loop; default 10 * max n
};

struct CostReport {
  double total = 0;
  double host = 0;                 // outside parallel sections
  std::vector<double> sections;    // per section of the last sections step executed
  std::map<int, double> perDevice; // kHostDevice for host-thread kernels
  double transfers = 0;
};

struct ExecResult {
  std::map<std::string, std::vector<std::int64_t>> properties; // "graph.dist"
  std::map<std::string, std::int64_t> globals;
  CostReport cost;
  std::int64_t transferCount = 0;
  std::vector<double> perWorkerWork; // edge work per worker, largest kernel
  std::int64_t kernelInvocations = 0; // kernel calls on elements that passed the filter
  std::int64_t launches = 0;
  std::int64_t loopIterations = 0;
  std::vector<std::int64_t> bucketTrace; // Δ-stepping bucket per worklist round
};

// inputs[k] is argv[k + 1] of the program.
ExecResult execute(const ExecutionPlan &plan, const std::vector<std::shared_ptr<GraphStore>> &inputs,
                   const ExecOptions &options = {});
ExecResult worklist_drain(const ExecutionPlan &plan,
                          const std::vector<std::shared_ptr<GraphStore>> &inputs, WorklistMode mode,
                          int threads = 1, std::optional<std::int64_t> delta = std::nullopt);

// Coefficient of variation of perWorkerWork.
double load_imbalance(const ExecResult &r);

// Σ (i + 1) · v[i] mod 2^64.
std::uint64_t checksum(const std::vector<std::int64_t> &v);

} // namespace gdsl
