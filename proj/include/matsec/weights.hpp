#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "matsec/core.hpp"

namespace matsec {

/// Positive weights over a ground set of n elements. Equal input weights are
/// legal; every comparison goes through the lexicographic (weight, id) order,
/// which makes all weights effectively distinct and every greedy outcome
/// deterministic.
class WeightedGroundSet {
public:
  explicit WeightedGroundSet(std::vector<double> weights)
      : w_(std::move(weights)) {
    for (double x : w_)
      if (!(x > 0.0))
        throw std::invalid_argument("weights must be strictly positive");
  }

  int size() const { return static_cast<int>(w_.size()); }

  double weight(ElementId e) const {
    if (e < 0 || e >= size()) throw InvalidQueryError("unknown element id");
    return w_[static_cast<std::size_t>(e)];
  }

  double total(const std::vector<ElementId>& ids) const {
    double sum = 0.0;
    for (ElementId e : ids) sum += weight(e);
    return sum;
  }

  /// Strict "heavier than" in the tie-broken order.
  bool heavier(ElementId a, ElementId b) const {
    const double wa = weight(a), wb = weight(b);
    if (wa != wb) return wa > wb;
    return a > b;
  }

  /// Candidates sorted by strictly decreasing (weight, id).
  std::vector<ElementId> by_decreasing_weight(std::vector<ElementId> ids) const {
    std::sort(ids.begin(), ids.end(),
              [this](ElementId a, ElementId b) { return heavier(a, b); });
    return ids;
  }

  double max_weight() const {
    double m = 0.0;
    for (double x : w_) m = std::max(m, x);
    return m;
  }

  double min_weight() const {
    double m = w_.empty() ? 0.0 : w_[0];
    for (double x : w_) m = std::min(m, x);
    return m;
  }

private:
  std::vector<double> w_;
};

}  // namespace matsec
