#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "matsec/core.hpp"
#include "matsec/matroid.hpp"
#include "matsec/minor.hpp"
#include "matsec/weights.hpp"

namespace matsec {

using SubsetMask = std::uint32_t;

inline std::vector<ElementId> mask_to_ids(SubsetMask mask) {
  std::vector<ElementId> ids;
  for (int e = 0; mask != 0; ++e, mask >>= 1)
    if (mask & 1u) ids.push_back(e);
  return ids;
}

inline SubsetMask ids_to_mask(const std::vector<ElementId>& ids) {
  SubsetMask mask = 0;
  for (ElementId e : ids) mask |= SubsetMask{1} << e;
  return mask;
}

/// Precomputed independence and rank of every subset of a small ground set.
/// Turns span tests, greedy runs and axiom checks into O(1) table lookups.
class MaskTable {
public:
  static constexpr int kMaxGroundSize = 20;

  explicit MaskTable(const Matroid& m) : n_(m.size()) {
    if (n_ > kMaxGroundSize)
      throw BudgetExceededError("ground set too large for subset enumeration");
    const std::size_t total = std::size_t{1} << n_;
    indep_.assign(total, 0);
    rank_.assign(total, 0);
    std::vector<ElementId> ids;
    for (std::size_t mask = 0; mask < total; ++mask) {
      ids = mask_to_ids(static_cast<SubsetMask>(mask));
      indep_[mask] = m.is_independent(ids) ? 1 : 0;
      if (indep_[mask]) {
        rank_[mask] = static_cast<std::uint8_t>(ids.size());
      } else {
        // rank(A) = max over e in A of rank(A - e) when A is dependent.
        std::uint8_t best = 0;
        for (ElementId e : ids) {
          const std::size_t sub = mask & ~(std::size_t{1} << e);
          best = std::max(best, rank_[sub]);
        }
        rank_[mask] = best;
      }
    }
  }

  int n() const { return n_; }
  SubsetMask full_mask() const {
    return n_ == 0 ? 0 : (SubsetMask{1} << n_) - 1;
  }

  bool independent(SubsetMask mask) const { return indep_[mask] != 0; }
  int rank(SubsetMask mask) const { return rank_[mask]; }

  bool in_span(SubsetMask mask, ElementId e) const {
    const SubsetMask bit = SubsetMask{1} << e;
    if (mask & bit) return true;
    return rank_[mask | bit] == rank_[mask];
  }

private:
  int n_;
  std::vector<std::uint8_t> indep_;
  std::vector<std::uint8_t> rank_;
};

struct AxiomCheckResult {
  bool pass = true;
  std::string detail;  // first counterexample, when any
};

/// Nonempty family + downward closure: every subset of an independent set is
/// independent.
inline AxiomCheckResult check_downward_closure(const MaskTable& t) {
  if (!t.independent(0)) return {false, "empty set is dependent"};
  const std::size_t total = std::size_t{1} << t.n();
  for (std::size_t mask = 1; mask < total; ++mask) {
    if (!t.independent(static_cast<SubsetMask>(mask))) continue;
    SubsetMask rest = static_cast<SubsetMask>(mask);
    while (rest) {
      const SubsetMask bit = rest & (~rest + 1);
      rest ^= bit;
      if (!t.independent(static_cast<SubsetMask>(mask) ^ bit))
        return {false, "removing one element broke independence"};
    }
  }
  return {};
}

/// Exchange axiom over all pairs of independent sets.
inline AxiomCheckResult check_exchange(const MaskTable& t) {
  const std::size_t total = std::size_t{1} << t.n();
  std::vector<SubsetMask> indep_masks;
  for (std::size_t mask = 0; mask < total; ++mask)
    if (t.independent(static_cast<SubsetMask>(mask)))
      indep_masks.push_back(static_cast<SubsetMask>(mask));
  // ext[A] = elements outside A whose addition keeps A independent.
  std::vector<SubsetMask> ext(indep_masks.size(), 0);
  for (std::size_t i = 0; i < indep_masks.size(); ++i) {
    const SubsetMask a = indep_masks[i];
    for (int e = 0; e < t.n(); ++e) {
      const SubsetMask bit = SubsetMask{1} << e;
      if ((a & bit) == 0 && t.independent(a | bit)) ext[i] |= bit;
    }
  }
  for (std::size_t i = 0; i < indep_masks.size(); ++i)
    for (std::size_t j = 0; j < indep_masks.size(); ++j) {
      const SubsetMask a = indep_masks[i], b = indep_masks[j];
      if (std::popcount(a) >= std::popcount(b)) continue;
      if ((ext[i] & (b & ~a)) == 0)
        return {false, "no augmenting element between two independent sets"};
    }
  return {};
}

/// Rank is monotone and submodular (diminishing marginal returns).
inline AxiomCheckResult check_rank_monotone_submodular(const MaskTable& t) {
  const std::size_t total = std::size_t{1} << t.n();
  for (std::size_t b = 0; b < total; ++b) {
    const SubsetMask bm = static_cast<SubsetMask>(b);
    // Enumerate subsets a of b.
    for (SubsetMask am = bm;; am = (am - 1) & bm) {
      if (t.rank(am) > t.rank(bm)) return {false, "rank not monotone"};
      for (int e = 0; e < t.n(); ++e) {
        const SubsetMask bit = SubsetMask{1} << e;
        if (bm & bit) continue;
        const int gain_a = t.rank(am | bit) - t.rank(am);
        const int gain_b = t.rank(bm | bit) - t.rank(bm);
        if (gain_a < gain_b) return {false, "rank not submodular"};
      }
      if (am == 0) break;
    }
  }
  return {};
}

/// Runs all axiom checks on a matroid.
inline AxiomCheckResult check_matroid_axioms(const Matroid& m) {
  MaskTable t(m);
  if (auto r = check_downward_closure(t); !r.pass) return r;
  if (auto r = check_exchange(t); !r.pass) return r;
  if (auto r = check_rank_monotone_submodular(t); !r.pass) return r;
  return {};
}

/// Adapter exposing a MinorView as a matroid over re-indexed elements so the
/// same axiom machinery applies to minors.
class MinorAsMatroid final : public Matroid {
public:
  explicit MinorAsMatroid(const MinorView& view)
      : Matroid(static_cast<int>(view.elements().size())), view_(&view) {}

  std::unique_ptr<Matroid> clone() const override {
    return std::make_unique<MinorAsMatroid>(*this);
  }
  std::string family_name() const override { return "minor"; }

protected:
  bool indep(std::span<const ElementId> subset) const override {
    std::vector<ElementId> mapped;
    mapped.reserve(subset.size());
    for (ElementId e : subset) mapped.push_back(view_->elements()[e]);
    return view_->is_independent(mapped);
  }

private:
  const MinorView* view_;
};

/// Maximum-weight independent set by enumerating every subset. Test oracle
/// for the greedy optimum; exponential, so guarded by the MaskTable budget.
///
/// Sets are compared by their sorted (weight, id) key sequences, largest key
/// first, with a longer sequence beating its own prefix. Under positive
/// weights this picks the same unique set the tie-broken greedy returns,
/// without ever comparing floating-point sums.
inline std::vector<ElementId> brute_force_max_weight(
    const Matroid& m, const WeightedGroundSet& w,
    const std::vector<ElementId>& candidates) {
  MaskTable t(m);
  const SubsetMask cand = ids_to_mask(candidates);
  auto key_sequence = [&](SubsetMask mask) {
    std::vector<ElementId> ids = w.by_decreasing_weight(mask_to_ids(mask));
    return ids;
  };
  auto better = [&](const std::vector<ElementId>& a,
                    const std::vector<ElementId>& b) {
    const std::size_t common = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < common; ++i) {
      if (a[i] == b[i]) continue;
      return w.heavier(a[i], b[i]);
    }
    return a.size() > b.size();
  };
  std::vector<ElementId> best;  // empty set is always independent
  for (SubsetMask mask = cand;; mask = (mask - 1) & cand) {
    if (mask != 0 && t.independent(mask)) {
      auto seq = key_sequence(mask);
      if (better(seq, best)) best = std::move(seq);
    }
    if (mask == 0) break;
  }
  setops::normalize(best);
  return best;
}

}  // namespace matsec
