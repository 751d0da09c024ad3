#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "matsec/core.hpp"
#include "matsec/matroid.hpp"

namespace matsec {

/// Process-wide tallies of audited oracle traffic. The test suites assert
/// that the violation counter stays at zero across every run.
struct AuditTotals {
  static std::atomic<std::uint64_t>& queries() {
    static std::atomic<std::uint64_t> q{0};
    return q;
  }
  static std::atomic<std::uint64_t>& violations() {
    static std::atomic<std::uint64_t> v{0};
    return v;
  }
};

/// Wraps a matroid oracle and answers only for elements that have been
/// revealed. Any query touching an unrevealed element counts as a violation
/// and throws. Handles are single-owner: they mutate their query log.
class AuditOracle {
public:
  explicit AuditOracle(const Matroid& m)
      : m_(&m), revealed_(static_cast<std::size_t>(m.size()), 0) {}

  int size() const { return m_->size(); }

  void reveal(ElementId e) {
    if (e < 0 || e >= size()) throw InvalidQueryError("unknown element id");
    revealed_[static_cast<std::size_t>(e)] = 1;
  }

  void reveal(std::span<const ElementId> ids) {
    for (ElementId e : ids) reveal(e);
  }

  void reveal_all() { revealed_.assign(revealed_.size(), 1); }

  bool is_revealed(ElementId e) const {
    return e >= 0 && e < size() && revealed_[static_cast<std::size_t>(e)];
  }

  bool is_independent(std::span<const ElementId> subset) const {
    check(subset);
    return m_->is_independent(subset);
  }

  int rank(std::span<const ElementId> subset) const {
    check(subset);
    return m_->rank(subset);
  }

  bool span_contains(std::span<const ElementId> subset, ElementId e) const {
    check(subset);
    check_one(e);
    return m_->span_contains(subset, e);
  }

  std::uint64_t query_count() const { return queries_; }
  std::uint64_t violation_count() const { return violations_; }

private:
  void check_one(ElementId e) const {
    if (!is_revealed(e)) {
      ++violations_;
      AuditTotals::violations().fetch_add(1, std::memory_order_relaxed);
      throw AuditViolationError("query touches an unrevealed element");
    }
  }

  void check(std::span<const ElementId> subset) const {
    ++queries_;
    AuditTotals::queries().fetch_add(1, std::memory_order_relaxed);
    for (ElementId e : subset) check_one(e);
  }

  const Matroid* m_;
  std::vector<char> revealed_;
  mutable std::uint64_t queries_ = 0;
  mutable std::uint64_t violations_ = 0;
};

}  // namespace matsec
