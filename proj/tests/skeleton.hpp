#pragma once

#include <random>
#include <string>
#include <vector>

// Random kernels that satisfy the vertex->edge eligibility conditions.
inline std::string skeleton(std::mt19937 &rng) {
  auto pick = [&](std::initializer_list<const char *> xs) {
    std::vector<const char *> v(xs);
    return std::string(v[rng() % v.size()]);
  };
  std::string P = pick({"p", "u", "src", "node"});
  std::string T = pick({"t", "w", "nb", "dst"});
  std::string G = pick({"graph", "g", "gr"});
  bool out = rng() % 2;
  std::string w = out ? G + ".getweight(" + P + ", " + T + ")" : G + ".getweight(" + T + ", " + P + ")";
  std::vector<std::string> pool = {
      "MIN(" + T + ".a, " + P + ".b + " + w + ", changed);",
      "if (" + T + ".a > " + P + ".a) " + T + ".b = " + P + ".b + 1;",
      T + ".b = " + T + ".a * 2;",
      "changed = 1;",
      "MAX(" + T + ".b, " + P + ".a - 1, changed);",
      "if (" + T + ".a < " + w + ") {\n" + T + ".a = " + w + ";\nchanged = 1;\n}",
  };
  int n = 1 + static_cast<int>(rng() % 3);
  std::string body;
  bool extra = rng() % 2;
  if (n > 1 && rng() % 2) body += "int x = " + P + ".a;\n";
  for (int i = 0; i < n; ++i) body += pool[rng() % pool.size()] + "\n";
  std::string src = "int changed = 0;\n";
  src += "void K(Point " + P + ", Graph " + G + (extra ? ", int c" : "") + ") {\n";
  src += "foreach (" + T + " In " + P + (out ? ".outnbrs" : ".innbrs") + ")";
  src += n > 1 || body.find("int x") != std::string::npos ? " {\n" + body + "}\n" : " " + body;
  src += "}\n";
  src += "int main(int argc, char *argv[]) {\nGraph g;\ng.addPointProperty(a, int);\n"
         "g.addPointProperty(b, int);\ng.read(argv[1]);\n";
  std::string filter = rng() % 2 ? " (v.a == 0)" : "";
  src += "foreach (v In g.points)" + filter + " K(v, g" + (extra ? ", 3" : "") + ");\n}\n";
  return src;
}
