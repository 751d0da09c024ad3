#pragma once

#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matsec/core.hpp"
#include "matsec/weights.hpp"

namespace matsec {

/// Independence oracle over a fixed ground set [0, n). Instances are
/// immutable after construction; concurrent read-only queries are safe.
///
/// Query subsets are passed as element-id sequences without duplicates
/// (any order). Unknown ids raise InvalidQueryError.
class Matroid {
public:
  virtual ~Matroid() = default;

  int size() const { return n_; }

  bool is_independent(std::span<const ElementId> subset) const {
    validate(subset);
    return indep(subset);
  }

  /// Rank of a subset: size of a maximum independent subset. The default
  /// runs the greedy scan; families with cheaper formulas override it.
  int rank(std::span<const ElementId> subset) const {
    validate(subset);
    return rank_impl(subset);
  }

  /// True iff rank(subset + e) == rank(subset).
  bool span_contains(std::span<const ElementId> subset, ElementId e) const {
    validate_id(e);
    validate(subset);
    for (ElementId x : subset)
      if (x == e) return true;
    std::vector<ElementId> plus(subset.begin(), subset.end());
    plus.push_back(e);
    return rank_impl(plus) == rank_impl(subset);
  }

  virtual std::unique_ptr<Matroid> clone() const = 0;
  virtual std::string family_name() const = 0;

protected:
  explicit Matroid(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("ground set size must be >= 0");
  }

  virtual bool indep(std::span<const ElementId> subset) const = 0;

  virtual int rank_impl(std::span<const ElementId> subset) const {
    // Greedy: scan the subset, keep elements that stay independent.
    std::vector<ElementId> kept;
    kept.reserve(subset.size());
    for (ElementId e : subset) {
      kept.push_back(e);
      if (!indep(kept)) kept.pop_back();
    }
    return static_cast<int>(kept.size());
  }

  void validate_id(ElementId e) const {
    if (e < 0 || e >= n_) throw InvalidQueryError("unknown element id");
  }

  void validate(std::span<const ElementId> subset) const {
    for (ElementId e : subset) validate_id(e);
  }

private:
  int n_;
};

/// All subsets of size at most k are independent.
class UniformMatroid final : public Matroid {
public:
  UniformMatroid(int n, int k) : Matroid(n), k_(k) {
    if (k < 0) throw std::invalid_argument("uniform matroid needs k >= 0");
  }

  int k() const { return k_; }

  std::unique_ptr<Matroid> clone() const override {
    return std::make_unique<UniformMatroid>(*this);
  }
  std::string family_name() const override { return "uniform"; }

protected:
  bool indep(std::span<const ElementId> subset) const override {
    return static_cast<int>(subset.size()) <= k_;
  }

  int rank_impl(std::span<const ElementId> subset) const override {
    return std::min(static_cast<int>(subset.size()), k_);
  }

private:
  int k_;
};

/// Disjoint blocks covering the ground set, each with a capacity.
class PartitionMatroid final : public Matroid {
public:
  PartitionMatroid(int n, const std::vector<std::vector<ElementId>>& blocks,
                   const std::vector<int>& capacities)
      : Matroid(n), block_of_(n, -1), capacities_(capacities) {
    if (blocks.size() != capacities.size())
      throw std::invalid_argument("one capacity per block required");
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (capacities[b] < 0)
        throw std::invalid_argument("block capacity must be >= 0");
      for (ElementId e : blocks[b]) {
        validate_id(e);
        if (block_of_[e] != -1)
          throw std::invalid_argument("blocks must be disjoint");
        block_of_[e] = static_cast<int>(b);
      }
    }
    for (ElementId e = 0; e < n; ++e)
      if (block_of_[e] == -1)
        throw std::invalid_argument("blocks must cover the ground set");
  }

  std::unique_ptr<Matroid> clone() const override {
    return std::make_unique<PartitionMatroid>(*this);
  }
  std::string family_name() const override { return "partition"; }

protected:
  bool indep(std::span<const ElementId> subset) const override {
    counts_scratch_.assign(capacities_.size(), 0);
    for (ElementId e : subset) {
      const int b = block_of_[e];
      if (++counts_scratch_[b] > capacities_[b]) return false;
    }
    return true;
  }

  int rank_impl(std::span<const ElementId> subset) const override {
    counts_scratch_.assign(capacities_.size(), 0);
    for (ElementId e : subset) ++counts_scratch_[block_of_[e]];
    int r = 0;
    for (std::size_t b = 0; b < capacities_.size(); ++b)
      r += std::min(counts_scratch_[b], capacities_[b]);
    return r;
  }

private:
  std::vector<int> block_of_;
  std::vector<int> capacities_;
  // Scratch for counting; guarded by thread_local use pattern below.
  static thread_local std::vector<int> counts_scratch_;
};

inline thread_local std::vector<int> PartitionMatroid::counts_scratch_;

/// Ground set elements are edges of a multigraph; independent = forest.
/// Self-loops are legal and behave as loop elements of the matroid.
class GraphicMatroid final : public Matroid {
public:
  /// edges[e] = (u, v) endpoints of element e.
  GraphicMatroid(int num_vertices, std::vector<std::pair<int, int>> edges)
      : Matroid(static_cast<int>(edges.size())),
        num_vertices_(num_vertices),
        edges_(std::move(edges)) {
    for (const auto& [u, v] : edges_)
      if (u < 0 || v < 0 || u >= num_vertices_ || v >= num_vertices_)
        throw std::invalid_argument("edge endpoint out of range");
  }

  int num_vertices() const { return num_vertices_; }
  std::pair<int, int> edge(ElementId e) const { return edges_[e]; }

  std::unique_ptr<Matroid> clone() const override {
    return std::make_unique<GraphicMatroid>(*this);
  }
  std::string family_name() const override { return "graphic"; }

protected:
  bool indep(std::span<const ElementId> subset) const override {
    return forest_size(subset) == static_cast<int>(subset.size());
  }

  int rank_impl(std::span<const ElementId> subset) const override {
    return forest_size(subset);
  }

private:
  // Union-find with path halving; returns the number of cycle-free edges.
  int forest_size(std::span<const ElementId> subset) const {
    auto& parent = uf_scratch_;
    parent.resize(num_vertices_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    int kept = 0;
    for (ElementId e : subset) {
      const auto [u, v] = edges_[e];
      const int ru = find(u), rv = find(v);
      if (ru != rv) {
        parent[ru] = rv;
        ++kept;
      }
    }
    return kept;
  }

  int num_vertices_;
  std::vector<std::pair<int, int>> edges_;
  static thread_local std::vector<int> uf_scratch_;
};

inline thread_local std::vector<int> GraphicMatroid::uf_scratch_;

/// Capacity constraints over a laminar set family: a subset is independent
/// iff it meets every family set within its capacity.
class LaminarMatroid final : public Matroid {
public:
  struct FamilySet {
    int capacity;
    std::vector<ElementId> members;  // sorted
  };

  LaminarMatroid(int n, std::vector<FamilySet> sets)
      : Matroid(n), sets_(std::move(sets)) {
    for (auto& s : sets_) {
      if (s.capacity < 0)
        throw std::invalid_argument("set capacity must be >= 0");
      setops::normalize(s.members);
      for (ElementId e : s.members) validate_id(e);
    }
    if (!laminar())
      throw std::invalid_argument("set family is not laminar");
  }

  const std::vector<FamilySet>& sets() const { return sets_; }

  std::unique_ptr<Matroid> clone() const override {
    return std::make_unique<LaminarMatroid>(*this);
  }
  std::string family_name() const override { return "laminar"; }

protected:
  bool indep(std::span<const ElementId> subset) const override {
    auto& in = member_scratch_;
    in.assign(size(), 0);
    for (ElementId e : subset) in[e] = 1;
    for (const auto& s : sets_) {
      int hit = 0;
      for (ElementId e : s.members)
        if (in[e] && ++hit > s.capacity) return false;
    }
    return true;
  }

private:
  bool laminar() const {
    for (std::size_t i = 0; i < sets_.size(); ++i)
      for (std::size_t j = i + 1; j < sets_.size(); ++j) {
        const auto& a = sets_[i].members;
        const auto& b = sets_[j].members;
        const auto common = setops::intersect(a, b);
        if (common.empty()) continue;
        if (common.size() != a.size() && common.size() != b.size())
          return false;
      }
    return true;
  }

  std::vector<FamilySet> sets_;
  static thread_local std::vector<char> member_scratch_;
};

inline thread_local std::vector<char> LaminarMatroid::member_scratch_;

/// Ground set elements are the right side of a bipartite graph; a subset is
/// independent iff it can be matched into distinct left vertices.
class TransversalMatroid final : public Matroid {
public:
  /// left_adjacency[l] lists the ground-set elements adjacent to left vertex l.
  TransversalMatroid(int n, std::vector<std::vector<ElementId>> left_adjacency)
      : Matroid(n), lefts_of_(n) {
    const int L = static_cast<int>(left_adjacency.size());
    for (int l = 0; l < L; ++l)
      for (ElementId e : left_adjacency[l]) {
        validate_id(e);
        lefts_of_[e].push_back(l);
      }
    num_left_ = L;
  }

  int num_left() const { return num_left_; }

  std::unique_ptr<Matroid> clone() const override {
    return std::make_unique<TransversalMatroid>(*this);
  }
  std::string family_name() const override { return "transversal"; }

protected:
  bool indep(std::span<const ElementId> subset) const override {
    return matching_size(subset) == static_cast<int>(subset.size());
  }

  int rank_impl(std::span<const ElementId> subset) const override {
    return matching_size(subset);
  }

private:
  // Augmenting-path bipartite matching from subset elements into left
  // vertices.
  int matching_size(std::span<const ElementId> subset) const {
    std::vector<int> match_left(num_left_, -1);
    std::vector<char> visited(num_left_, 0);
    int matched = 0;
    std::vector<ElementId> order(subset.begin(), subset.end());
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
      std::fill(visited.begin(), visited.end(), 0);
      if (augment(order, static_cast<int>(idx), match_left, visited)) ++matched;
    }
    return matched;
  }

  bool augment(const std::vector<ElementId>& order, int idx,
               std::vector<int>& match_left, std::vector<char>& visited) const {
    for (int l : lefts_of_[order[idx]]) {
      if (visited[l]) continue;
      visited[l] = 1;
      if (match_left[l] == -1 ||
          augment(order, match_left[l], match_left, visited)) {
        match_left[l] = idx;
        return true;
      }
    }
    return false;
  }

  int num_left_ = 0;
  std::vector<std::vector<int>> lefts_of_;  // element -> adjacent left vertices
};

/// Greedy maximum-weight independent subset of `candidates`: scan in strictly
/// decreasing (weight, id) order, keep an element iff it stays independent.
/// With candidates = the whole ground set this is the offline optimum.
inline std::vector<ElementId> greedy_max_weight(
    const Matroid& m, const WeightedGroundSet& w,
    std::vector<ElementId> candidates) {
  candidates = w.by_decreasing_weight(std::move(candidates));
  std::vector<ElementId> kept;
  kept.reserve(candidates.size());
  for (ElementId e : candidates) {
    kept.push_back(e);
    if (!m.is_independent(kept)) kept.pop_back();
  }
  setops::normalize(kept);
  return kept;
}

inline std::vector<ElementId> all_elements(const Matroid& m) {
  std::vector<ElementId> ids(static_cast<std::size_t>(m.size()));
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

/// Greedy basis of the whole ground set, scanning by id.
inline std::vector<ElementId> greedy_basis_of(const Matroid& m) {
  std::vector<ElementId> kept;
  for (ElementId e = 0; e < m.size(); ++e) {
    kept.push_back(e);
    if (!m.is_independent(kept)) kept.pop_back();
  }
  return kept;
}

}  // namespace matsec
