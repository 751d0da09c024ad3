#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace matsec {

/// Elements of a ground set are dense integer ids in [0, n).
using ElementId = int;

/// A query mentioned an element id outside the ground set (or outside the
/// restricted set of a minor).
class InvalidQueryError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A weight fell outside the admissible range of a weight classing.
class OutOfPromiseError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An exact computation was requested beyond its enumeration budget.
class BudgetExceededError : public std::length_error {
public:
  using std::length_error::length_error;
};

/// An oracle query touched an element that has not been revealed yet.
class AuditViolationError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Small helpers for element-id sets kept as sorted unique vectors.
namespace setops {

inline void normalize(std::vector<ElementId>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

inline bool contains(const std::vector<ElementId>& sorted, ElementId e) {
  return std::binary_search(sorted.begin(), sorted.end(), e);
}

inline std::vector<ElementId> unite(const std::vector<ElementId>& a,
                                    const std::vector<ElementId>& b) {
  std::vector<ElementId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

inline std::vector<ElementId> subtract(const std::vector<ElementId>& a,
                                       const std::vector<ElementId>& b) {
  std::vector<ElementId> out;
  out.reserve(a.size());
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

inline std::vector<ElementId> intersect(const std::vector<ElementId>& a,
                                        const std::vector<ElementId>& b) {
  std::vector<ElementId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

inline bool is_sorted_unique(const std::vector<ElementId>& ids) {
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (ids[i - 1] >= ids[i]) return false;
  return true;
}

}  // namespace setops

}  // namespace matsec
