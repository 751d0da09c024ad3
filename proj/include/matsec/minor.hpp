#pragma once

#include <span>
#include <vector>

#include "matsec/core.hpp"
#include "matsec/matroid.hpp"

namespace matsec {

/// View of the minor M / contracted |_ restricted, evaluated through the
/// parent oracle: every rank answer is
///
///   rank_minor(U) = rank_parent(U ∪ contracted) − rank_parent(contracted)
///
/// with the contracted-set rank cached at construction. No minor is ever
/// materialized; the parent must outlive the view.
class MinorView {
public:
  MinorView(const Matroid& parent, std::vector<ElementId> contracted,
            std::vector<ElementId> restricted)
      : parent_(&parent),
        contracted_(std::move(contracted)),
        restricted_(std::move(restricted)) {
    setops::normalize(contracted_);
    setops::normalize(restricted_);
    for (ElementId e : restricted_)
      if (setops::contains(contracted_, e))
        throw std::invalid_argument(
            "contracted and restricted sets must be disjoint");
    contracted_rank_ = parent_->rank(contracted_);
  }

  const std::vector<ElementId>& elements() const { return restricted_; }
  const std::vector<ElementId>& contracted() const { return contracted_; }
  int contracted_rank() const { return contracted_rank_; }

  int rank(std::span<const ElementId> subset) const {
    std::vector<ElementId> joined(subset.begin(), subset.end());
    for (ElementId e : joined)
      if (!setops::contains(restricted_, e))
        throw InvalidQueryError("element outside the restricted set");
    joined.insert(joined.end(), contracted_.begin(), contracted_.end());
    return parent_->rank(joined) - contracted_rank_;
  }

  bool is_independent(std::span<const ElementId> subset) const {
    return rank(subset) == static_cast<int>(subset.size());
  }

  bool span_contains(std::span<const ElementId> subset, ElementId e) const {
    if (!setops::contains(restricted_, e))
      throw InvalidQueryError("element outside the restricted set");
    for (ElementId x : subset)
      if (x == e) return true;
    std::vector<ElementId> plus(subset.begin(), subset.end());
    plus.push_back(e);
    return rank(plus) == rank(subset);
  }

private:
  const Matroid* parent_;
  std::vector<ElementId> contracted_;
  std::vector<ElementId> restricted_;
  int contracted_rank_ = 0;
};

}  // namespace matsec
