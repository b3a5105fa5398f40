#include <cmath>
#include <numeric>

#include "gdsl/graph.hpp"

namespace gdsl {

namespace {

std::uint64_t splitmix64(std::uint64_t &x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::int64_t weight(Rng &r) { return 1 + static_cast<std::int64_t>(r.below(100)); }

} // namespace

Rng::Rng(std::uint64_t seed) {
  for (auto &s : s_) s = splitmix64(seed);
}

std::uint64_t Rng::next() {
  std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // rejection keeps the result exactly uniform
  std::uint64_t limit = ~0ULL - (~0ULL % bound);
  std::uint64_t x;
  do x = next();
  while (x >= limit);
  return x % bound;
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

EdgeList gen_er(std::int64_t n, std::int64_t m, std::uint64_t seed) {
  if (n < 0 || m < 0) throw ParamError("n and m must be nonnegative");
  if (m > 0 && (n < 2 || m > n * (n - 1))) throw ParamError("m exceeds n*(n-1)");
  Rng r(seed);
  EdgeList g{n, {}};
  g.edges.reserve(static_cast<std::size_t>(m));
  auto un = static_cast<std::uint64_t>(n);
  for (std::int64_t i = 0; i < m; ++i) {
    auto s = static_cast<std::int64_t>(r.below(un));
    auto d = static_cast<std::int64_t>(r.below(un - 1));
    if (d >= s) ++d;
    g.edges.push_back({s, d, weight(r)});
  }
  return g;
}

EdgeList gen_rmat(std::int64_t n, std::int64_t m, std::uint64_t seed, RmatParams p) {
  if (n < 1 || (n & (n - 1)) != 0) throw ParamError("n must be a power of two");
  if (m < 0) throw ParamError("m must be nonnegative");
  if (p.a < 0 || p.b < 0 || p.c < 0 || p.d < 0 || std::abs(p.a + p.b + p.c + p.d - 1) > 1e-9)
    throw ParamError("quadrant probabilities must be nonnegative and sum to 1");
  int levels = 0;
  while ((std::int64_t{1} << levels) < n) ++levels;
  Rng r(seed);
  EdgeList g{n, {}};
  g.edges.reserve(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) {
    std::int64_t s = 0, d = 0;
    for (int l = 0; l < levels; ++l) {
      double u = r.unit();
      s <<= 1;
      d <<= 1;
      if (u < p.a) {
      } else if (u < p.a + p.b) {
        d |= 1;
      } else if (u < p.a + p.b + p.c) {
        s |= 1;
      } else {
        s |= 1;
        d |= 1;
      }
    }
    g.edges.push_back({s, d, weight(r)});
  }
  return g;
}

EdgeList gen_path(std::int64_t n) {
  EdgeList g{n, {}};
  for (std::int64_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1});
  return g;
}

EdgeList gen_star(std::int64_t leaves) {
  EdgeList g{leaves + 1, {}};
  for (std::int64_t i = 1; i <= leaves; ++i) g.edges.push_back({0, i, 1});
  return g;
}

EdgeList gen_ring(std::int64_t n) {
  EdgeList g{n, {}};
  for (std::int64_t i = 0; i < n && n > 1; ++i) g.edges.push_back({i, (i + 1) % n, 1});
  return g;
}

EdgeList gen_two_components(std::int64_t half, std::uint64_t seed) {
  Rng r(seed);
  EdgeList g{2 * half, {}};
  for (std::int64_t base : {std::int64_t{0}, half}) {
    for (std::int64_t i = 0; i < half && half > 1; ++i)
      g.edges.push_back({base + i, base + (i + 1) % half, weight(r)});
    for (std::int64_t k = 0; k < half && half > 1; ++k) {
      auto a = static_cast<std::int64_t>(r.below(static_cast<std::uint64_t>(half)));
      auto b = static_cast<std::int64_t>(r.below(static_cast<std::uint64_t>(half)));
      if (a != b) g.edges.push_back({base + a, base + b, weight(r)});
    }
  }
  return g;
}

EdgeList symmetrize(const EdgeList &g) {
  EdgeList out{g.n, {}};
  out.edges.reserve(g.edges.size() * 2);
  for (const auto &e : g.edges) {
    out.edges.push_back(e);
    out.edges.push_back({e.dst, e.src, e.weight});
  }
  return out;
}

GraphStats stats(const EdgeList &g) {
  GraphStats s;
  s.n = g.n;
  s.m = static_cast<std::int64_t>(g.edges.size());
  if (g.n == 0) return s;
  std::vector<std::int64_t> deg(static_cast<std::size_t>(g.n), 0);
  for (const auto &e : g.edges) ++deg[static_cast<std::size_t>(e.src)];
  for (auto d : deg) s.maxDegree = std::max(s.maxDegree, d);
  s.avgDegree = static_cast<double>(s.m) / static_cast<double>(g.n);
  if (s.avgDegree > 0) {
    double var = 0;
    for (auto d : deg) var += (static_cast<double>(d) - s.avgDegree) * (static_cast<double>(d) - s.avgDegree);
    var /= static_cast<double>(g.n);
    s.degreeCV = std::sqrt(var) / s.avgDegree;
  }
  return s;
}

} // namespace gdsl
