#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdsl {

struct WEdge {
  std::int64_t src = 0;
  std::int64_t dst = 0;
  std::int64_t weight = 1;
  bool operator==(const WEdge &) const = default;
};

struct EdgeList {
  std::int64_t n = 0;
  std::vector<WEdge> edges;
  bool operator==(const EdgeList &) const = default;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
public:
  FormatError(int line, const std::string &message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

class ParamError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// "p <n> <m>" followed by m lines "src dst weight".
EdgeList parse_graph(const std::string &text);
EdgeList read_graph(const std::string &path);
std::string format_graph(const EdgeList &g);
void write_graph(const std::string &path, const EdgeList &g);

// splitmix64-seeded xoshiro256**.
class Rng {
public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  std::uint64_t below(std::uint64_t bound); // uniform in [0, bound), bound > 0
  double unit();                            // uniform in [0, 1)

private:
  std::uint64_t s_[4];
};

// m directed edges, uniform over ordered pairs without self-loops, weights in [1, 100].
EdgeList gen_er(std::int64_t n, std::int64_t m, std::uint64_t seed);

struct RmatParams {
  double a = 0.57, b = 0.19, c = 0.19, d = 0.05;
};
EdgeList gen_rmat(std::int64_t n, std::int64_t m, std::uint64_t seed, RmatParams p = {});

// Small shapes, unit weights unless noted.
EdgeList gen_path(std::int64_t n);                    // i -> i+1
EdgeList gen_star(std::int64_t leaves);               // 0 -> i, i = 1..leaves
EdgeList gen_ring(std::int64_t n);                    // i -> (i+1) mod n
EdgeList gen_two_components(std::int64_t half, std::uint64_t seed); // two random rings with chords

// Adds the reverse arc of every edge (same weight).
EdgeList symmetrize(const EdgeList &g);

struct GraphStats {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t maxDegree = 0;
  double avgDegree = 0;
  double degreeCV = 0; // population stddev / mean of out-degrees
};
GraphStats stats(const EdgeList &g);

// Reference algorithms used to check executed programs.
inline constexpr std::int64_t kUnreached = -1;
std::vector<std::int64_t> oracle_bfs(const EdgeList &g, std::int64_t source);      // hop counts
std::vector<std::int64_t> oracle_dijkstra(const EdgeList &g, std::int64_t source); // distances
std::vector<std::int64_t> oracle_components(const EdgeList &g); // min vertex id per weak component
std::int64_t oracle_kruskal(const EdgeList &g);                 // minimum spanning forest weight

} // namespace gdsl
