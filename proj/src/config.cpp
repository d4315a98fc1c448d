#include "respk/config.hpp"

#include <cstdlib>
#include <fstream>
#include <string>

namespace respk {

namespace {

long parse_long(const std::string& value, int line_no) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used, 0);
  } catch (const std::exception&) {
    throw ParseError("not an integer: " + value, line_no);
  }
  if (used != value.size()) throw ParseError("not an integer: " + value, line_no);
  return v;
}

void require_positive(long v, const std::string& key) {
  if (v <= 0) throw PreconditionError(key + " must be positive");
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  long v = parse_long(value, 0);
  if (key == "prime") {
    if (!is_prime(v)) throw PreconditionError("prime must be prime");
    prime = v;
  } else if (key == "enum-cap") {
    require_positive(v, key);
    enum_cap = static_cast<std::size_t>(v);
  } else if (key == "trunc-degree-default") {
    require_positive(v, key);
    trunc_degree_default = static_cast<int>(v);
  } else if (key == "trunc-degree-cap") {
    require_positive(v, key);
    trunc_degree_cap = static_cast<int>(v);
  } else if (key == "recursion-cap") {
    require_positive(v, key);
    recursion_cap = static_cast<int>(v);
  } else if (key == "normalization-depth") {
    require_positive(v, key);
    normalization_depth = static_cast<int>(v);
  } else if (key == "low-syllable-cap") {
    require_positive(v, key);
    low_syllable_cap = static_cast<int>(v);
  } else if (key == "aut-candidate-cap") {
    require_positive(v, key);
    aut_candidate_cap = static_cast<std::size_t>(v);
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(v);
  } else {
    throw ParseError("unknown config key: " + key);
  }
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    std::size_t colon = line.find(':', start);
    if (colon == std::string::npos)
      throw ParseError("expected key: value", line_no);
    std::string key = line.substr(start, colon - start);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
      key.pop_back();
    std::size_t vstart = line.find_first_not_of(" \t", colon + 1);
    if (vstart == std::string::npos)
      throw ParseError("missing value for " + key, line_no);
    std::size_t vend = line.find_last_not_of(" \t\r");
    std::string value = line.substr(vstart, vend - vstart + 1);
    try {
      cfg.set(key, value);
    } catch (const ParseError& e) {
      if (e.line) throw;
      throw ParseError(e.what(), line_no);
    }
  }
  return cfg;
}

Config Config::from_env() {
  const char* path = std::getenv("RESPK_CONFIG");
  if (!path || !*path) return Config{};
  return from_file(path);
}

}  // namespace respk
