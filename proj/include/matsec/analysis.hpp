#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matsec/core.hpp"
#include "matsec/exhaustive.hpp"
#include "matsec/matroid.hpp"
#include "matsec/rng.hpp"
#include "matsec/weight_classes.hpp"
#include "matsec/weights.hpp"

namespace matsec {

/// Class index of every element under a classing; throws when a weight is
/// outside the admissible range.
inline std::vector<int> classes_of_all(const WeightedGroundSet& w,
                                       const WeightClassing& classing) {
  std::vector<int> cls(static_cast<std::size_t>(w.size()));
  for (ElementId e = 0; e < w.size(); ++e)
    cls[static_cast<std::size_t>(e)] = classing.class_of(w.weight(e));
  return cls;
}

/// Table of span probabilities p(e, i): the probability that element e is
/// spanned by the sampled part of classes i and up, conditioned on e itself
/// being unsampled. p(e, 0) = 1 by convention, and values are non-increasing
/// in i in exact mode.
struct SpanProbabilityTable {
  int h = 0;
  std::vector<std::vector<double>> p;   // [element][class index 0..h]
  std::vector<std::vector<double>> se;  // standard errors; empty in exact mode
  std::string mode;
  std::uint64_t trials = 0;

  double value(ElementId e, int i) const {
    return p[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)];
  }
  double stderr_of(ElementId e, int i) const {
    return se.empty() ? 0.0
                      : se[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)];
  }
};

inline constexpr int kExactClassBudget = 20;

/// Exact table by enumerating, for each (e, i), every subset of the classed
/// elements of classes >= i with e excluded; each subset carries weight
/// 2^-(set size). Excluding e implements the conditioning exactly, because
/// the sampling coins are independent across elements.
inline SpanProbabilityTable exact_p_table(const Matroid& m,
                                          const WeightedGroundSet& w,
                                          const WeightClassing& classing) {
  const int n = m.size();
  const int h = classing.num_classes();
  const auto cls = classes_of_all(w, classing);
  if (n > kExactClassBudget)
    throw BudgetExceededError("too many classed elements for exact p-table");
  MaskTable table(m);

  std::vector<SubsetMask> class_suffix(static_cast<std::size_t>(h) + 2, 0);
  for (int i = h; i >= 1; --i) {
    SubsetMask mask = class_suffix[static_cast<std::size_t>(i) + 1];
    for (ElementId e = 0; e < n; ++e)
      if (cls[static_cast<std::size_t>(e)] == i) mask |= SubsetMask{1} << e;
    class_suffix[static_cast<std::size_t>(i)] = mask;
  }

  SpanProbabilityTable out;
  out.h = h;
  out.mode = "exact";
  out.p.assign(static_cast<std::size_t>(n),
               std::vector<double>(static_cast<std::size_t>(h) + 1, 0.0));
  for (ElementId e = 0; e < n; ++e) {
    out.p[static_cast<std::size_t>(e)][0] = 1.0;
    const SubsetMask bit = SubsetMask{1} << e;
    for (int i = 1; i <= h; ++i) {
      const SubsetMask universe = class_suffix[static_cast<std::size_t>(i)] & ~bit;
      std::uint64_t hits = 0;
      for (SubsetMask sub = universe;; sub = (sub - 1) & universe) {
        if (table.in_span(sub, e)) ++hits;
        if (sub == 0) break;
      }
      out.p[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)] =
          std::ldexp(static_cast<double>(hits), -std::popcount(universe));
    }
    out.trials = std::uint64_t{1} << std::popcount(class_suffix[1]);
  }
  return out;
}

/// Monte Carlo estimate of the same table. One coin vector is drawn per
/// trial; entry (e, i) uses the coins of all elements except e, which keeps
/// the conditioning exact while sharing trials across entries.
inline SpanProbabilityTable estimate_p_table(const Matroid& m,
                                             const WeightedGroundSet& w,
                                             const WeightClassing& classing,
                                             std::uint64_t trials, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  const int n = m.size();
  const int h = classing.num_classes();
  const auto cls = classes_of_all(w, classing);

  std::vector<std::vector<ElementId>> by_class(static_cast<std::size_t>(h) + 1);
  for (ElementId e = 0; e < n; ++e)
    by_class[static_cast<std::size_t>(cls[static_cast<std::size_t>(e)])].push_back(e);

  std::vector<std::vector<std::uint64_t>> hits(
      static_cast<std::size_t>(n),
      std::vector<std::uint64_t>(static_cast<std::size_t>(h) + 1, 0));
  std::vector<char> coin(static_cast<std::size_t>(n), 0);
  std::vector<char> in_basis(static_cast<std::size_t>(n), 0);
  std::vector<ElementId> basis, rebuilt, plus, sampled_suffix;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (ElementId e = 0; e < n; ++e)
      coin[static_cast<std::size_t>(e)] = rng.bernoulli(0.5) ? 1 : 0;
    basis.clear();
    sampled_suffix.clear();
    std::fill(in_basis.begin(), in_basis.end(), 0);
    for (int i = h; i >= 1; --i) {
      for (ElementId e : by_class[static_cast<std::size_t>(i)]) {
        if (!coin[static_cast<std::size_t>(e)]) continue;
        sampled_suffix.push_back(e);
        basis.push_back(e);
        if (m.is_independent(basis))
          in_basis[static_cast<std::size_t>(e)] = 1;
        else
          basis.pop_back();
      }
      // basis now spans the sampled part of classes >= i.
      for (ElementId e = 0; e < n; ++e) {
        bool in_span;
        const bool e_sampled_here =
            coin[static_cast<std::size_t>(e)] && cls[static_cast<std::size_t>(e)] >= i;
        if (!e_sampled_here) {
          plus = basis;
          plus.push_back(e);
          in_span = !m.is_independent(plus);
        } else if (!in_basis[static_cast<std::size_t>(e)]) {
          // Sampled but rejected by the greedy scan, so e is spanned by the
          // sampled elements scanned before it.
          in_span = true;
        } else {
          rebuilt.clear();
          for (ElementId f : sampled_suffix) {
            if (f == e) continue;
            rebuilt.push_back(f);
            if (!m.is_independent(rebuilt)) rebuilt.pop_back();
          }
          rebuilt.push_back(e);
          in_span = !m.is_independent(rebuilt);
        }
        if (in_span) ++hits[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)];
      }
    }
  }

  SpanProbabilityTable out;
  out.h = h;
  out.mode = "monte-carlo";
  out.trials = trials;
  out.p.assign(static_cast<std::size_t>(n),
               std::vector<double>(static_cast<std::size_t>(h) + 1, 0.0));
  out.se = out.p;
  for (ElementId e = 0; e < n; ++e) {
    out.p[static_cast<std::size_t>(e)][0] = 1.0;
    for (int i = 1; i <= h; ++i) {
      const double est = static_cast<double>(
                             hits[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)]) /
                         static_cast<double>(trials);
      out.p[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)] = est;
      out.se[static_cast<std::size_t>(e)][static_cast<std::size_t>(i)] =
          std::sqrt(std::max(est * (1.0 - est), 1.0 / static_cast<double>(trials)) /
                    static_cast<double>(trials));
    }
  }
  return out;
}

inline constexpr int kExactSelectionBudget = 14;

/// Counts from one enumerated cell: a fixed bucketing, with every sample set
/// and both parities run against a fixed arrival order. Each counter is out
/// of 2^(n+1) equally likely (sample, parity) pairs.
struct EnumerationCell {
  int tau = -1;    // -1 marks a caller-supplied fixed bucketing
  int delta = -1;
  std::vector<std::pair<int, int>> spans;       // bucketing spans
  std::vector<std::uint64_t> element_hits;      // [e]
  std::vector<std::uint64_t> class_hits;        // [1..h]
  std::vector<std::uint64_t> bucket_hits;       // [1..b]
  std::uint64_t infeasible_outputs = 0;         // should stay 0
};

struct SelectionEnumeration {
  int n = 0;
  int h = 0;
  int tau_limit = 0;            // max tau for the full mode
  std::uint64_t runs_per_cell = 0;  // 2^(n+1)
  std::vector<EnumerationCell> cells;

  const EnumerationCell* cell(int tau, int delta) const {
    for (const auto& c : cells)
      if (c.tau == tau && c.delta == delta) return &c;
    return nullptr;
  }
};

/// Runs the deterministic core of the bucketing-based greedy for every
/// sample set and both parities (and, in full mode, every (tau, delta)
/// draw), against one fixed arrival order. All decisions are table lookups,
/// evaluated through the contracted-view rank formula.
inline SelectionEnumeration enumerate_selection(
    const Matroid& m, const WeightedGroundSet& w, const WeightClassing& classing,
    const std::vector<ElementId>& arrival_order,
    const std::optional<Bucketing>& fixed = std::nullopt) {
  const int n = m.size();
  if (n > kExactSelectionBudget)
    throw BudgetExceededError("ground set too large for selection enumeration");
  const int h = classing.num_classes();
  const auto cls = classes_of_all(w, classing);
  MaskTable table(m);

  std::vector<SubsetMask> class_mask(static_cast<std::size_t>(h) + 1, 0);
  for (ElementId e = 0; e < n; ++e)
    class_mask[static_cast<std::size_t>(cls[static_cast<std::size_t>(e)])] |=
        SubsetMask{1} << e;

  SelectionEnumeration out;
  out.n = n;
  out.h = h;
  out.tau_limit = max_tau(h);
  out.runs_per_cell = std::uint64_t{1} << (n + 1);

  std::vector<RandomBucketingParams> draws;
  if (fixed) {
    draws.push_back({-1, -1});
  } else {
    for (int tau = 0; tau <= out.tau_limit; ++tau)
      for (int delta = 0; delta < (1 << tau); ++delta)
        draws.push_back({tau, delta});
  }

  const SubsetMask full = table.full_mask();
  for (const auto& params : draws) {
    const Bucketing bucketing =
        fixed ? *fixed : make_bucketing(h, {params.tau, params.delta});
    const int b = bucketing.num_buckets();

    EnumerationCell cell;
    cell.tau = params.tau;
    cell.delta = params.delta;
    for (int i = 1; i <= b; ++i)
      cell.spans.emplace_back(bucketing.first_class(i), bucketing.last_class(i));
    cell.element_hits.assign(static_cast<std::size_t>(n), 0);
    cell.class_hits.assign(static_cast<std::size_t>(h) + 1, 0);
    cell.bucket_hits.assign(static_cast<std::size_t>(b) + 1, 0);

    std::vector<SubsetMask> bucket_mask(static_cast<std::size_t>(b) + 2, 0);
    for (int c = 1; c <= h; ++c)
      bucket_mask[static_cast<std::size_t>(bucketing.bucket_of_class(c))] |=
          class_mask[static_cast<std::size_t>(c)];
    std::vector<SubsetMask> suffix_mask(static_cast<std::size_t>(b) + 2, 0);
    for (int i = b; i >= 1; --i)
      suffix_mask[static_cast<std::size_t>(i)] =
          suffix_mask[static_cast<std::size_t>(i) + 1] |
          bucket_mask[static_cast<std::size_t>(i)];

    std::vector<int> bucket_of(static_cast<std::size_t>(n));
    for (ElementId e = 0; e < n; ++e)
      bucket_of[static_cast<std::size_t>(e)] =
          bucketing.bucket_of_class(cls[static_cast<std::size_t>(e)]);

    std::vector<int> suffix_rank(static_cast<std::size_t>(b) + 2, 0);
    std::vector<SubsetMask> t_mask(static_cast<std::size_t>(b) + 1, 0);
    std::vector<int> t_size(static_cast<std::size_t>(b) + 1, 0);
    for (SubsetMask sample = 0;; ++sample) {
      for (int i = b; i >= 1; --i)
        suffix_rank[static_cast<std::size_t>(i)] =
            table.rank(sample & suffix_mask[static_cast<std::size_t>(i)]);
      for (int parity_odd = 0; parity_odd <= 1; ++parity_odd) {
        std::fill(t_mask.begin(), t_mask.end(), 0);
        std::fill(t_size.begin(), t_size.end(), 0);
        SubsetMask all_selected = 0;
        for (ElementId e : arrival_order) {
          const SubsetMask bit = SubsetMask{1} << e;
          if (sample & bit) continue;
          const int i = bucket_of[static_cast<std::size_t>(e)];
          if ((i % 2 == 1) != (parity_odd == 1)) continue;
          if (i != 1) {
            const SubsetMask above = sample & suffix_mask[static_cast<std::size_t>(i) - 1];
            if (table.rank(above | bit) != suffix_rank[static_cast<std::size_t>(i) - 1])
              continue;  // not spanned by the sample of buckets i-1 and up
          }
          const SubsetMask contracted =
              sample & suffix_mask[static_cast<std::size_t>(i) + 1];
          const int r_with =
              table.rank(t_mask[static_cast<std::size_t>(i)] | bit | contracted) -
              suffix_rank[static_cast<std::size_t>(i) + 1];
          if (r_with != t_size[static_cast<std::size_t>(i)] + 1) continue;
          t_mask[static_cast<std::size_t>(i)] |= bit;
          ++t_size[static_cast<std::size_t>(i)];
          all_selected |= bit;
        }
        if (!table.independent(all_selected)) ++cell.infeasible_outputs;
        SubsetMask rest = all_selected;
        while (rest) {
          const int e = std::countr_zero(rest);
          rest &= rest - 1;
          ++cell.element_hits[static_cast<std::size_t>(e)];
        }
        for (int c = 1; c <= h; ++c)
          cell.class_hits[static_cast<std::size_t>(c)] += static_cast<std::uint64_t>(
              std::popcount(all_selected & class_mask[static_cast<std::size_t>(c)]));
        for (int i = 1; i <= b; ++i)
          cell.bucket_hits[static_cast<std::size_t>(i)] += static_cast<std::uint64_t>(
              std::popcount(all_selected & bucket_mask[static_cast<std::size_t>(i)]));
      }
      if (sample == full) break;
    }
    out.cells.push_back(std::move(cell));
  }
  return out;
}

/// Exact per-element selection probabilities under a fixed arrival order:
/// marginal over every sample set and parity, and over every (tau, delta)
/// draw unless a fixed bucketing is supplied.
inline std::vector<double> exact_selection_probabilities(
    const Matroid& m, const WeightedGroundSet& w, const AidedPromise& promise,
    const std::vector<ElementId>& arrival_order,
    const std::optional<Bucketing>& fixed = std::nullopt) {
  const WeightClassing classing(promise.W, promise.rho_tilde);
  const auto enumeration =
      enumerate_selection(m, w, classing, arrival_order, fixed);
  const double denom = std::ldexp(1.0, enumeration.n + 1);
  std::vector<double> pr(static_cast<std::size_t>(enumeration.n), 0.0);
  const int L = enumeration.tau_limit;
  for (const auto& cell : enumeration.cells) {
    const double cell_weight =
        fixed ? 1.0 : 1.0 / ((L + 1) * std::ldexp(1.0, cell.tau));
    for (ElementId e = 0; e < enumeration.n; ++e)
      pr[static_cast<std::size_t>(e)] +=
          cell_weight * static_cast<double>(cell.element_hits[static_cast<std::size_t>(e)]) /
          denom;
  }
  return pr;
}

/// Competitive-ratio bound of the aided algorithm over h classes.
inline double competitive_bound_aided(int h) {
  return 16.0 * (max_tau(h) + 1);
}

/// End-to-end bound after both reductions, in terms of the true rank.
inline double competitive_bound_end_to_end(std::int64_t rho) {
  const double r = static_cast<double>(std::max<std::int64_t>(rho, 1));
  return 2560.0 * (std::log2(std::log2(4.0 * r)) + 5.0);
}

struct BoundRow {
  std::string check;
  int element = -1;
  int cls = -1;
  int bucket = -1;
  double observed = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  std::string mode;
  std::uint64_t trials = 0;
  bool pass = false;
};

struct BoundReport {
  std::vector<BoundRow> rows;

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t f = 0;
    for (const auto& r : rows)
      if (!r.pass) ++f;
    return f;
  }
};

namespace detail {

inline void push_row(BoundReport& report, std::string check, int element,
                     int cls, int bucket, double observed, double bound,
                     std::uint64_t trials, bool pass, const char* mode) {
  BoundRow row;
  row.check = std::move(check);
  row.element = element;
  row.cls = cls;
  row.bucket = bucket;
  row.observed = observed;
  row.bound = bound;
  row.slack = observed - bound;
  row.mode = mode;
  row.trials = trials;
  row.pass = pass;
  report.rows.push_back(std::move(row));
}

}  // namespace detail

/// The exact zero-tolerance bound suite for one instance and one arrival
/// order. All probabilities involved are dyadic rationals, so after clearing
/// denominators every comparison below is exact in double arithmetic.
///
/// Checks emitted:
///   element_gap     per element and bucketing: selection probability is at
///                   least a quarter of the drop in span probability between
///                   the previous bucket's first class and the own bucket's
///                   first class.
///   bucket_sum      per bucket and bucketing: expected selections from the
///                   bucket cover a quarter of the summed span probabilities
///                   of the bucket's optimum elements.
///   class_unit      per class, conditioned on unit-width buckets.
///   element_wide    per element, conditioned on width at least two.
///   class_marginal  per class, marginal over all bucketing draws.
inline BoundReport check_selection_bounds_exact(
    const Matroid& m, const WeightedGroundSet& w, const AidedPromise& promise,
    const std::vector<ElementId>& arrival_order) {
  const WeightClassing classing(promise.W, promise.rho_tilde);
  const int n = m.size();
  const int h = classing.num_classes();
  const int L = max_tau(h);
  const auto cls = classes_of_all(w, classing);
  const auto ptable = exact_p_table(m, w, classing);
  const auto opt = greedy_max_weight(m, w, all_elements(m));
  const auto enumeration = enumerate_selection(m, w, classing, arrival_order);
  const double denom = std::ldexp(1.0, n + 1);

  BoundReport report;
  for (const auto& cell : enumeration.cells) {
    const Bucketing bucketing{std::vector<std::pair<int, int>>(cell.spans)};
    const int b = bucketing.num_buckets();
    // Per-element gap bound within this bucketing.
    for (ElementId e = 0; e < n; ++e) {
      const int i = bucketing.bucket_of_class(cls[static_cast<std::size_t>(e)]);
      const double pa = ptable.value(e, bucketing.first_class(i - 1));
      const double pb = ptable.value(e, bucketing.first_class(i));
      const double hits = static_cast<double>(cell.element_hits[static_cast<std::size_t>(e)]);
      const bool pass = 4.0 * hits >= denom * (pa - pb);
      detail::push_row(report, "element_gap", e, cls[static_cast<std::size_t>(e)], i,
                       hits / denom, (pa - pb) / 4.0, enumeration.runs_per_cell,
                       pass, "exact");
    }
    // Per-bucket sum bound within this bucketing.
    for (int i = 1; i <= b; ++i) {
      double sum_p = 0.0;
      for (ElementId e : opt)
        if (bucketing.bucket_of_class(cls[static_cast<std::size_t>(e)]) == i)
          sum_p += ptable.value(e, bucketing.first_class(i - 1));
      const double hits = static_cast<double>(cell.bucket_hits[static_cast<std::size_t>(i)]);
      const bool pass = 4.0 * hits >= denom * sum_p;
      detail::push_row(report, "bucket_sum", -1, -1, i, hits / denom, sum_p / 4.0,
                       enumeration.runs_per_cell, pass, "exact");
    }
  }

  // Unit-width conditional per class.
  if (const auto* unit = enumeration.cell(0, 0)) {
    for (int c = 1; c <= h; ++c) {
      double sum_p = 0.0;
      for (ElementId e : opt)
        if (cls[static_cast<std::size_t>(e)] == c) sum_p += ptable.value(e, c);
      const double hits = static_cast<double>(unit->class_hits[static_cast<std::size_t>(c)]);
      const bool pass = 4.0 * hits >= denom * sum_p;
      detail::push_row(report, "class_unit", -1, c, -1, hits / denom, sum_p / 4.0,
                       enumeration.runs_per_cell, pass, "exact");
    }
  }

  // Wide-width conditional per element: sum the per-width conditional
  // probabilities; cleared by the 2^L * 2^(n+1) common denominator.
  const std::uint64_t wide_combos =
      enumeration.runs_per_cell * ((std::uint64_t{1} << (L + 1)) - 2);
  for (ElementId e = 0; e < n; ++e) {
    const int c = cls[static_cast<std::size_t>(e)];
    double lhs_cleared = 0.0;  // sum over tau >= 1 of hits * 2^(L - tau)
    double conditional_sum = 0.0;
    for (int tau = 1; tau <= L; ++tau) {
      std::uint64_t hits = 0;
      for (int delta = 0; delta < (1 << tau); ++delta)
        hits += enumeration.cell(tau, delta)->element_hits[static_cast<std::size_t>(e)];
      lhs_cleared += std::ldexp(static_cast<double>(hits), L - tau);
      conditional_sum += static_cast<double>(hits) / (denom * std::ldexp(1.0, tau));
    }
    const double one_minus_p = 1.0 - ptable.value(e, c);
    const double rhs_cleared = std::ldexp(denom * one_minus_p, L - 3);
    const bool pass = lhs_cleared >= rhs_cleared;
    const int width_count = std::max(L, 1);
    detail::push_row(report, "element_wide", e, c, -1, conditional_sum / width_count,
                     one_minus_p / (8.0 * width_count), wide_combos, pass, "exact");
  }

  // Marginal per class over the full draw distribution.
  for (int c = 1; c <= h; ++c) {
    std::uint64_t opt_in_class = 0;
    for (ElementId e : opt)
      if (cls[static_cast<std::size_t>(e)] == c) ++opt_in_class;
    double lhs_cleared = 0.0;  // sum over tau of E[.|tau] * 2^L * denom
    double marginal = 0.0;
    for (int tau = 0; tau <= L; ++tau) {
      std::uint64_t hits = 0;
      for (int delta = 0; delta < (1 << tau); ++delta)
        hits += enumeration.cell(tau, delta)->class_hits[static_cast<std::size_t>(c)];
      lhs_cleared += std::ldexp(static_cast<double>(hits), L - tau);
      marginal += static_cast<double>(hits) / (denom * std::ldexp(1.0, tau));
    }
    marginal /= (L + 1);
    const double rhs_cleared =
        std::ldexp(denom * static_cast<double>(opt_in_class), L - 3);
    const bool pass = lhs_cleared >= rhs_cleared;
    detail::push_row(report, "class_marginal", -1, c, -1, marginal,
                     static_cast<double>(opt_in_class) / (8.0 * (L + 1)),
                     enumeration.runs_per_cell * (L + 1), pass, "exact");
  }

  // Feasibility across every enumerated run.
  std::uint64_t infeasible = 0, runs = 0;
  for (const auto& cell : enumeration.cells) {
    infeasible += cell.infeasible_outputs;
    runs += enumeration.runs_per_cell;
  }
  detail::push_row(report, "feasible_outputs", -1, -1, -1,
                   static_cast<double>(runs - infeasible), static_cast<double>(runs),
                   runs, infeasible == 0, "exact");

  // p-table structural properties.
  bool base_ok = true, monotone_ok = true;
  for (ElementId e = 0; e < n; ++e) {
    base_ok = base_ok && ptable.value(e, 0) == 1.0;
    for (int i = 1; i <= h; ++i)
      monotone_ok = monotone_ok && ptable.value(e, i - 1) >= ptable.value(e, i);
  }
  detail::push_row(report, "ptable_base", -1, 0, -1, base_ok ? 1.0 : 0.0, 1.0,
                   ptable.trials, base_ok, "exact");
  detail::push_row(report, "ptable_monotone", -1, -1, -1, monotone_ok ? 1.0 : 0.0,
                   1.0, ptable.trials, monotone_ok, "exact");
  return report;
}

}  // namespace matsec
