#include <algorithm>
#include <numeric>
#include <queue>

#include "gdsl/graph.hpp"

namespace gdsl {

namespace {

std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> adjacency(const EdgeList &g) {
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> adj(static_cast<std::size_t>(g.n));
  for (const auto &e : g.edges) adj[static_cast<std::size_t>(e.src)].push_back({e.dst, e.weight});
  return adj;
}

struct Dsu {
  std::vector<std::int64_t> parent;
  explicit Dsu(std::int64_t n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::int64_t find(std::int64_t x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(std::int64_t a, std::int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a; // smaller id becomes the root
    return true;
  }
};

} // namespace

std::vector<std::int64_t> oracle_bfs(const EdgeList &g, std::int64_t source) {
  std::vector<std::int64_t> dist(static_cast<std::size_t>(g.n), kUnreached);
  if (source >= g.n) return dist;
  auto adj = adjacency(g);
  std::queue<std::int64_t> q;
  dist[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    std::int64_t u = q.front();
    q.pop();
    for (auto [v, w] : adj[static_cast<std::size_t>(u)])
      if (dist[static_cast<std::size_t>(v)] == kUnreached) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
  }
  return dist;
}

std::vector<std::int64_t> oracle_dijkstra(const EdgeList &g, std::int64_t source) {
  std::vector<std::int64_t> dist(static_cast<std::size_t>(g.n), kUnreached);
  if (source >= g.n) return dist;
  auto adj = adjacency(g);
  using Item = std::pair<std::int64_t, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[static_cast<std::size_t>(source)] = 0;
  pq.push({0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[static_cast<std::size_t>(u)]) continue;
    for (auto [v, w] : adj[static_cast<std::size_t>(u)]) {
      auto &dv = dist[static_cast<std::size_t>(v)];
      if (dv == kUnreached || d + w < dv) {
        dv = d + w;
        pq.push({dv, v});
      }
    }
  }
  return dist;
}

std::vector<std::int64_t> oracle_components(const EdgeList &g) {
  Dsu dsu(g.n);
  for (const auto &e : g.edges) dsu.unite(e.src, e.dst);
  std::vector<std::int64_t> out(static_cast<std::size_t>(g.n));
  for (std::int64_t v = 0; v < g.n; ++v) out[static_cast<std::size_t>(v)] = dsu.find(v);
  return out;
}

std::int64_t oracle_kruskal(const EdgeList &g) {
  std::vector<WEdge> es = g.edges;
  std::stable_sort(es.begin(), es.end(), [](const WEdge &a, const WEdge &b) { return a.weight < b.weight; });
  Dsu dsu(g.n);
  std::int64_t total = 0;
  for (const auto &e : es)
    if (dsu.unite(e.src, e.dst)) total += e.weight;
  return total;
}

} // namespace gdsl
