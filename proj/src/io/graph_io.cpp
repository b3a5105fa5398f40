#include <charconv>
#include <fstream>
#include <sstream>

#include "gdsl/graph.hpp"

namespace gdsl {

namespace {

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::int64_t number(std::string_view f, int line, const char *what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || p != f.data() + f.size())
    throw FormatError(line, std::string("bad ") + what + " '" + std::string(f) + "'");
  if (v < 0) throw FormatError(line, std::string("negative ") + what);
  return v;
}

} // namespace

EdgeList parse_graph(const std::string &text) {
  std::vector<std::string_view> lines;
  std::string_view rest(text);
  while (!rest.empty()) {
    std::size_t nl = rest.find('\n');
    lines.push_back(rest.substr(0, nl));
    if (nl == std::string_view::npos) break;
    rest.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw FormatError(1, "missing header 'p <n> <m>'");
  auto head = fields(lines[0]);
  if (head.size() != 3 || head[0] != "p") throw FormatError(1, "expected header 'p <n> <m>'");
  EdgeList g;
  g.n = number(head[1], 1, "vertex count");
  std::int64_t m = number(head[2], 1, "edge count");
  g.edges.reserve(static_cast<std::size_t>(m));
  std::size_t k = 1;
  for (; k < lines.size(); ++k) {
    int line = static_cast<int>(k) + 1;
    auto f = fields(lines[k]);
    if (f.empty()) {
      if (static_cast<std::int64_t>(g.edges.size()) < m) throw FormatError(line, "missing edge line");
      continue;
    }
    if (static_cast<std::int64_t>(g.edges.size()) == m)
      throw FormatError(line, "more edges than the header promises");
    if (f.size() != 3) throw FormatError(line, "expected 'src dst weight'");
    WEdge e{number(f[0], line, "vertex id"), number(f[1], line, "vertex id"),
            number(f[2], line, "weight")};
    if (e.src >= g.n || e.dst >= g.n)
      throw FormatError(line, "vertex id out of range (n = " + std::to_string(g.n) + ")");
    g.edges.push_back(e);
  }
  if (static_cast<std::int64_t>(g.edges.size()) < m)
    throw FormatError(static_cast<int>(g.edges.size()) + 2, "missing edge line");
  return g;
}

EdgeList read_graph(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_graph(ss.str());
}

std::string format_graph(const EdgeList &g) {
  std::string out = "p " + std::to_string(g.n) + " " + std::to_string(g.edges.size()) + "\n";
  for (const auto &e : g.edges)
    out += std::to_string(e.src) + " " + std::to_string(e.dst) + " " + std::to_string(e.weight) + "\n";
  return out;
}

void write_graph(const std::string &path, const EdgeList &g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << format_graph(g);
  if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace gdsl
