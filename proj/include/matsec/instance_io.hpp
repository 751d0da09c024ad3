#pragma once

#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "matsec/core.hpp"
#include "matsec/matroid.hpp"
#include "matsec/weights.hpp"

namespace matsec {

// Instance files are plain text, one record per line:
//   uniform <n> <k>
//   partition <n>      followed by   block <capacity> <ids...>
//   graphic <n_vertices>  followed by   edge <id> <u> <v>
//   laminar <n>        followed by   set <capacity> <ids...>
//   transversal <n>    followed by   left <adjacent element ids...>
// Blank lines and lines starting with '#' are ignored.

namespace io_detail {

inline bool next_content_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    return true;
  }
  return false;
}

inline long long parse_int(const std::string& token, int lineno) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError(lineno, "expected an integer, got '" + token + "'");
  }
}

inline double parse_double(const std::string& token, int lineno) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError(lineno, "expected a number, got '" + token + "'");
  }
}

}  // namespace io_detail

inline std::unique_ptr<Matroid> parse_instance(std::istream& in) {
  int lineno = 0;
  std::string line;
  if (!io_detail::next_content_line(in, line, lineno))
    throw ParseError(lineno, "empty instance file");
  std::istringstream head(line);
  std::string family;
  head >> family;

  auto rest_tokens = [](std::istringstream& ss) {
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
  };

  if (family == "uniform") {
    std::string a, b, extra;
    if (!(head >> a >> b) || (head >> extra))
      throw ParseError(lineno, "expected: uniform <n> <k>");
    const int n = static_cast<int>(io_detail::parse_int(a, lineno));
    const int k = static_cast<int>(io_detail::parse_int(b, lineno));
    if (n < 0 || k < 0) throw ParseError(lineno, "n and k must be >= 0");
    return std::make_unique<UniformMatroid>(n, k);
  }

  if (family == "partition") {
    std::string a;
    if (!(head >> a)) throw ParseError(lineno, "expected: partition <n>");
    const int n = static_cast<int>(io_detail::parse_int(a, lineno));
    std::vector<std::vector<ElementId>> blocks;
    std::vector<int> caps;
    while (io_detail::next_content_line(in, line, lineno)) {
      std::istringstream ss(line);
      std::string kw;
      ss >> kw;
      if (kw != "block") throw ParseError(lineno, "expected a 'block' record");
      auto toks = rest_tokens(ss);
      if (toks.empty()) throw ParseError(lineno, "block needs a capacity");
      caps.push_back(static_cast<int>(io_detail::parse_int(toks[0], lineno)));
      std::vector<ElementId> ids;
      for (std::size_t i = 1; i < toks.size(); ++i)
        ids.push_back(static_cast<ElementId>(io_detail::parse_int(toks[i], lineno)));
      blocks.push_back(std::move(ids));
    }
    try {
      return std::make_unique<PartitionMatroid>(n, blocks, caps);
    } catch (const std::invalid_argument& ex) {
      throw ParseError(lineno, ex.what());
    }
  }

  if (family == "graphic") {
    std::string a;
    if (!(head >> a)) throw ParseError(lineno, "expected: graphic <n_vertices>");
    const int nv = static_cast<int>(io_detail::parse_int(a, lineno));
    std::vector<std::pair<int, int>> edges;
    std::vector<int> seen_line;
    while (io_detail::next_content_line(in, line, lineno)) {
      std::istringstream ss(line);
      std::string kw, id_s, u_s, v_s, extra;
      ss >> kw;
      if (kw != "edge") throw ParseError(lineno, "expected an 'edge' record");
      if (!(ss >> id_s >> u_s >> v_s) || (ss >> extra))
        throw ParseError(lineno, "expected: edge <id> <u> <v>");
      const auto id = io_detail::parse_int(id_s, lineno);
      const int u = static_cast<int>(io_detail::parse_int(u_s, lineno));
      const int v = static_cast<int>(io_detail::parse_int(v_s, lineno));
      if (id < 0) throw ParseError(lineno, "edge id must be >= 0");
      if (static_cast<std::size_t>(id) >= edges.size()) {
        edges.resize(static_cast<std::size_t>(id) + 1, {-1, -1});
        seen_line.resize(static_cast<std::size_t>(id) + 1, 0);
      }
      if (seen_line[static_cast<std::size_t>(id)])
        throw ParseError(lineno, "duplicate edge id");
      seen_line[static_cast<std::size_t>(id)] = lineno;
      edges[static_cast<std::size_t>(id)] = {u, v};
    }
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (!seen_line[i])
        throw ParseError(lineno, "edge ids must be contiguous from 0; missing " +
                                     std::to_string(i));
    try {
      return std::make_unique<GraphicMatroid>(nv, std::move(edges));
    } catch (const std::invalid_argument& ex) {
      throw ParseError(lineno, ex.what());
    }
  }

  if (family == "laminar") {
    std::string a;
    if (!(head >> a)) throw ParseError(lineno, "expected: laminar <n>");
    const int n = static_cast<int>(io_detail::parse_int(a, lineno));
    std::vector<LaminarMatroid::FamilySet> sets;
    while (io_detail::next_content_line(in, line, lineno)) {
      std::istringstream ss(line);
      std::string kw;
      ss >> kw;
      if (kw != "set") throw ParseError(lineno, "expected a 'set' record");
      auto toks = rest_tokens(ss);
      if (toks.empty()) throw ParseError(lineno, "set needs a capacity");
      LaminarMatroid::FamilySet fs;
      fs.capacity = static_cast<int>(io_detail::parse_int(toks[0], lineno));
      for (std::size_t i = 1; i < toks.size(); ++i)
        fs.members.push_back(
            static_cast<ElementId>(io_detail::parse_int(toks[i], lineno)));
      sets.push_back(std::move(fs));
    }
    try {
      return std::make_unique<LaminarMatroid>(n, std::move(sets));
    } catch (const std::invalid_argument& ex) {
      throw ParseError(lineno, ex.what());
    }
  }

  if (family == "transversal") {
    std::string a;
    if (!(head >> a)) throw ParseError(lineno, "expected: transversal <n>");
    const int n = static_cast<int>(io_detail::parse_int(a, lineno));
    std::vector<std::vector<ElementId>> adjacency;
    while (io_detail::next_content_line(in, line, lineno)) {
      std::istringstream ss(line);
      std::string kw;
      ss >> kw;
      if (kw != "left") throw ParseError(lineno, "expected a 'left' record");
      auto toks = rest_tokens(ss);
      std::vector<ElementId> ids;
      for (const auto& t : toks)
        ids.push_back(static_cast<ElementId>(io_detail::parse_int(t, lineno)));
      adjacency.push_back(std::move(ids));
    }
    try {
      return std::make_unique<TransversalMatroid>(n, std::move(adjacency));
    } catch (const std::invalid_argument& ex) {
      throw ParseError(lineno, ex.what());
    }
  }

  throw ParseError(lineno, "unknown family '" + family + "'");
}

inline std::unique_ptr<Matroid> parse_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open instance file: " + path);
  return parse_instance(in);
}

/// Weights file: one "<element_id> <weight>" record per line; every element
/// of [0, n) must appear exactly once.
inline WeightedGroundSet parse_weights(std::istream& in, int n) {
  int lineno = 0;
  std::string line;
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  int count = 0;
  while (io_detail::next_content_line(in, line, lineno)) {
    std::istringstream ss(line);
    std::string id_s, w_s, extra;
    if (!(ss >> id_s >> w_s) || (ss >> extra))
      throw ParseError(lineno, "expected: <element_id> <weight>");
    const auto id = io_detail::parse_int(id_s, lineno);
    const double weight = io_detail::parse_double(w_s, lineno);
    if (id < 0 || id >= n) throw ParseError(lineno, "element id out of range");
    if (seen[static_cast<std::size_t>(id)])
      throw ParseError(lineno, "duplicate element id");
    if (!(weight > 0.0)) throw ParseError(lineno, "weights must be positive");
    seen[static_cast<std::size_t>(id)] = 1;
    w[static_cast<std::size_t>(id)] = weight;
    ++count;
  }
  if (count == 0) throw ParseError(lineno, "no elements");
  if (count != n)
    throw ParseError(lineno, "expected " + std::to_string(n) + " weights, got " +
                                 std::to_string(count));
  return WeightedGroundSet(std::move(w));
}

inline WeightedGroundSet parse_weights_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open weights file: " + path);
  return parse_weights(in, n);
}

/// Number of elements named in a weights file, for use when no instance size
/// is known upfront.
inline int count_weight_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open weights file: " + path);
  int lineno = 0, count = 0;
  std::string line;
  while (io_detail::next_content_line(in, line, lineno)) ++count;
  return count;
}

}  // namespace matsec
