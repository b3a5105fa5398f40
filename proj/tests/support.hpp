#pragma once

#include <fstream>
#include <sstream>
#include <string>

inline std::string corpus_path(const std::string &name) {
  return std::string(GDSL_CORPUS_DIR) + "/" + name;
}

inline std::string read_corpus(const std::string &name) {
  std::ifstream in(corpus_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string read_golden(const std::string &name) {
  std::ifstream in(std::string(GDSL_GOLDEN_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
