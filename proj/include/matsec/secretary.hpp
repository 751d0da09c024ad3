#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "matsec/audit.hpp"
#include "matsec/core.hpp"
#include "matsec/rng.hpp"
#include "matsec/weight_classes.hpp"
#include "matsec/weights.hpp"

namespace matsec {

enum class Parity { kOdd, kEven };

inline const char* parity_name(Parity p) {
  return p == Parity::kOdd ? "odd" : "even";
}

struct RevealedElement {
  ElementId id;
  double weight;
};

/// Two-phase online selection contract. The sampling probability must be
/// declared before any element is seen. Phase 1 reveals a sample that cannot
/// be selected; phase 2 elements arrive one by one in an arbitrary order and
/// each decision is irrevocable. Implementations may query the matroid only
/// through an audited oracle over revealed elements.
class SbmspAlgorithm {
public:
  virtual ~SbmspAlgorithm() = default;
  virtual double sampling_probability() const = 0;
  virtual void observe_sample(std::span<const RevealedElement> sample) = 0;
  /// Returns true iff the element is selected.
  virtual bool on_arrival(ElementId e, double weight) = 0;
  virtual std::vector<ElementId> selected() const = 0;
};

/// Greedy selection over a fixed bucketing of the weight classes.
///
/// After the sample S is revealed, bucket i defines a contracted view of the
/// matroid: contract S over buckets above i, restrict to the elements of
/// bucket i spanned by the sample of buckets i-1 and up (bucket 1 keeps all
/// its elements). A random parity activates either the odd or the even
/// buckets, and each active bucket greedily accepts arrivals that keep its
/// selection independent in its view. The union over active buckets is
/// independent in the parent matroid.
class BucketingBasedAlgorithm final : public SbmspAlgorithm {
public:
  BucketingBasedAlgorithm(AuditOracle& oracle, WeightClassing classing,
                          Bucketing bucketing, Parity parity,
                          bool cross_check = false)
      : oracle_(&oracle),
        classing_(std::move(classing)),
        bucketing_(std::move(bucketing)),
        parity_(parity),
        cross_check_(cross_check) {}

  static Parity draw_parity(Rng& rng) {
    return rng.bernoulli(0.5) ? Parity::kOdd : Parity::kEven;
  }

  double sampling_probability() const override { return 0.5; }

  void observe_sample(std::span<const RevealedElement> sample) override {
    if (phase_ != Phase::kAwaitingSample)
      throw std::logic_error("sample already observed");
    phase_ = Phase::kStreaming;
    const int b = bucketing_.num_buckets();
    sample_by_bucket_.assign(static_cast<std::size_t>(b) + 2, {});
    for (const auto& [id, weight] : sample) {
      ++sample_size_;
      int cls;
      try {
        cls = classing_.class_of(weight);
      } catch (const OutOfPromiseError&) {
        ++promise_violations_;
        continue;  // out-of-promise sample elements take part in nothing
      }
      sample_by_bucket_[static_cast<std::size_t>(bucketing_.bucket_of_class(cls))]
          .push_back(id);
    }
    for (auto& ids : sample_by_bucket_) setops::normalize(ids);

    // Suffix structures over buckets: the sample above each bucket, a basis
    // of it (one basis extends the next), and the cached rank used by the
    // per-bucket contracted view.
    suffix_sample_.assign(static_cast<std::size_t>(b) + 2, {});
    suffix_basis_.assign(static_cast<std::size_t>(b) + 2, {});
    for (int i = b; i >= 1; --i) {
      suffix_sample_[i] = setops::unite(suffix_sample_[i + 1], sample_by_bucket_[i]);
      auto basis = suffix_basis_[i + 1];
      for (ElementId e : sample_by_bucket_[i]) {
        basis.push_back(e);
        if (!oracle_->is_independent(basis)) basis.pop_back();
      }
      suffix_basis_[i] = std::move(basis);
    }
    selected_by_bucket_.assign(static_cast<std::size_t>(b) + 2, {});
    combined_.assign(static_cast<std::size_t>(b) + 2, {});
    contracted_rank_.assign(static_cast<std::size_t>(b) + 2, 0);
    for (int i = 1; i <= b; ++i) {
      if (!bucket_active(i)) continue;
      combined_[i] = suffix_basis_[i + 1];
      contracted_rank_[i] =
          cross_check_ ? oracle_->rank(suffix_sample_[i + 1])
                       : static_cast<int>(suffix_basis_[i + 1].size());
    }
  }

  bool on_arrival(ElementId e, double weight) override {
    if (phase_ != Phase::kStreaming)
      throw std::logic_error("arrival outside the streaming phase");
    int cls;
    try {
      cls = classing_.class_of(weight);
    } catch (const OutOfPromiseError&) {
      ++promise_violations_;
      return false;
    }
    const int i = bucketing_.bucket_of_class(cls);
    if (!bucket_active(i)) return false;
    const bool accept = accept_test(e, i);
    if (cross_check_) {
      ++decisions_;
      if (accept != direct_decision(e, i)) ++cross_check_mismatches_;
    }
    if (accept) {
      selected_by_bucket_[i].push_back(e);
      combined_[i].push_back(e);
      selected_.push_back(e);
    }
    return accept;
  }

  /// The two streaming acceptance conditions for an arrival e in active
  /// bucket i, answered through bases of the already-revealed sample:
  ///  (a) i == 1, or e is spanned by the sample of buckets i-1 and up;
  ///  (b) e is not spanned by the current selection plus the sample of
  ///      buckets i+1 and up.
  bool accept_test(ElementId e, int i) const {
    bool cond_a = (i == 1);
    if (!cond_a) {
      scratch_ = suffix_basis_[i - 1];
      scratch_.push_back(e);
      cond_a = !oracle_->is_independent(scratch_);
    }
    if (!cond_a) return false;
    scratch_ = combined_[i];
    scratch_.push_back(e);
    return oracle_->is_independent(scratch_);
  }

  /// Direct route for the same decision: membership in the bucket's ground
  /// set via a span query against the full suffix sample, then the rank
  /// formula of the contracted view,
  ///   rank_i(U) = rank(U ∪ S_above) − rank(S_above),
  /// asking whether the selection grows by one.
  bool direct_decision(ElementId e, int i) const {
    if (i != 1 && !oracle_->span_contains(suffix_sample_[i - 1], e))
      return false;
    scratch_ = selected_by_bucket_[i];
    scratch_.push_back(e);
    scratch_.insert(scratch_.end(), suffix_sample_[i + 1].begin(),
                    suffix_sample_[i + 1].end());
    const int minor_rank = oracle_->rank(scratch_) - contracted_rank_[i];
    return minor_rank == static_cast<int>(selected_by_bucket_[i].size()) + 1;
  }

  std::vector<ElementId> selected() const override {
    auto out = selected_;
    setops::normalize(out);
    return out;
  }

  bool bucket_active(int i) const {
    return (i % 2 == 1) == (parity_ == Parity::kOdd);
  }

  Parity parity() const { return parity_; }
  const Bucketing& bucketing() const { return bucketing_; }
  const WeightClassing& classing() const { return classing_; }
  int sample_size() const { return sample_size_; }
  std::uint64_t promise_violations() const { return promise_violations_; }
  std::uint64_t decisions() const { return decisions_; }
  std::uint64_t cross_check_mismatches() const { return cross_check_mismatches_; }
  const std::vector<ElementId>& sample_above_bucket(int i) const {
    return suffix_sample_[static_cast<std::size_t>(i) + 1];
  }

private:
  enum class Phase { kAwaitingSample, kStreaming };

  AuditOracle* oracle_;
  WeightClassing classing_;
  Bucketing bucketing_;
  Parity parity_;
  bool cross_check_;
  Phase phase_ = Phase::kAwaitingSample;

  int sample_size_ = 0;
  std::vector<std::vector<ElementId>> sample_by_bucket_;
  std::vector<std::vector<ElementId>> suffix_sample_;  // S over buckets >= i
  std::vector<std::vector<ElementId>> suffix_basis_;
  std::vector<std::vector<ElementId>> selected_by_bucket_;
  std::vector<std::vector<ElementId>> combined_;  // T_i plus basis above
  std::vector<int> contracted_rank_;
  std::vector<ElementId> selected_;
  mutable std::vector<ElementId> scratch_;

  std::uint64_t promise_violations_ = 0;
  std::uint64_t decisions_ = 0;
  std::uint64_t cross_check_mismatches_ = 0;
};

/// The full aided algorithm: draw a bucket width 2^tau and shift delta at
/// random, build the bucketing over the h = ceil(3 + log2(rho_tilde)) weight
/// classes, and run the bucketing-based greedy on it.
class FullAlgorithm final : public SbmspAlgorithm {
public:
  FullAlgorithm(AuditOracle& oracle, AidedPromise promise, Rng& rng,
                std::optional<RandomBucketingParams> forced_params = std::nullopt,
                std::optional<Parity> forced_parity = std::nullopt,
                bool cross_check = false)
      : classing_(promise.W, promise.rho_tilde) {
    params_ = forced_params ? *forced_params
                            : sample_params(classing_.num_classes(), rng);
    const Parity parity = forced_parity
                              ? *forced_parity
                              : BucketingBasedAlgorithm::draw_parity(rng);
    inner_.emplace(oracle, classing_,
                   make_bucketing(classing_.num_classes(), params_), parity,
                   cross_check);
  }

  double sampling_probability() const override { return 0.5; }

  void observe_sample(std::span<const RevealedElement> sample) override {
    inner_->observe_sample(sample);
  }

  bool on_arrival(ElementId e, double weight) override {
    return inner_->on_arrival(e, weight);
  }

  std::vector<ElementId> selected() const override { return inner_->selected(); }

  int tau() const { return params_.tau; }
  int delta() const { return params_.delta; }
  int num_classes() const { return classing_.num_classes(); }
  Parity parity() const { return inner_->parity(); }
  const Bucketing& bucketing() const { return inner_->bucketing(); }
  std::uint64_t promise_violations() const { return inner_->promise_violations(); }
  std::uint64_t decisions() const { return inner_->decisions(); }
  std::uint64_t cross_check_mismatches() const {
    return inner_->cross_check_mismatches();
  }

private:
  WeightClassing classing_;
  RandomBucketingParams params_;
  std::optional<BucketingBasedAlgorithm> inner_;
};

struct SbmspRunResult {
  std::vector<ElementId> selected;
  int sample_size = 0;
};

/// Drives one two-phase run: reveals the sample, then feeds phase-2 arrivals
/// in the given order. All oracle traffic stays behind the audit.
inline SbmspRunResult run_sbmsp(SbmspAlgorithm& alg, AuditOracle& oracle,
                                const WeightedGroundSet& w,
                                const std::vector<ElementId>& sample,
                                const std::vector<ElementId>& phase2) {
  std::vector<RevealedElement> revealed;
  revealed.reserve(sample.size());
  for (ElementId e : sample) {
    oracle.reveal(e);
    revealed.push_back({e, w.weight(e)});
  }
  alg.observe_sample(revealed);
  for (ElementId e : phase2) {
    oracle.reveal(e);
    alg.on_arrival(e, w.weight(e));
  }
  return {alg.selected(), static_cast<int>(sample.size())};
}

/// Per-element coin sample: returns (sample, rest), both in id order.
inline std::pair<std::vector<ElementId>, std::vector<ElementId>> draw_sample(
    int n, double p_s, Rng& rng) {
  std::vector<ElementId> sample, rest;
  for (ElementId e = 0; e < n; ++e)
    (rng.bernoulli(p_s) ? sample : rest).push_back(e);
  return {std::move(sample), std::move(rest)};
}

/// Runs a two-phase algorithm on a uniformly random arrival permutation by
/// treating the first X arrivals as the sample, X ~ Binomial(n, p_s). The
/// resulting prefix contains every element independently with probability
/// p_s, so the two-phase contract is met; everything after the prefix is
/// phase 2 in permutation order.
inline SbmspRunResult sbmsp_to_msp(SbmspAlgorithm& alg, AuditOracle& oracle,
                                   const WeightedGroundSet& w,
                                   const std::vector<ElementId>& permutation,
                                   Rng& rng) {
  const int n = static_cast<int>(permutation.size());
  const int x = rng.binomial_count(n, alg.sampling_probability());
  std::vector<ElementId> sample(permutation.begin(), permutation.begin() + x);
  std::vector<ElementId> phase2(permutation.begin() + x, permutation.end());
  return run_sbmsp(alg, oracle, w, sample, phase2);
}

/// Wraps an aided two-phase algorithm into an unaided one. The promises are
/// estimated from the observed sample: W as its maximum weight and rho_tilde
/// as four times its rank. A fair coin, tossed before anything is seen,
/// picks between a max-element hunt (declare a plain 1/2 sample; select the
/// first arrival worth at least W) and running the aided algorithm (declare
/// (1 + p)/2 where p is the inner sampling probability; split the observed
/// sample back into the estimation part and the inner algorithm's own sample,
/// and forward arrivals heavier than W / (8 rho_tilde)).
///
/// When the estimation sample comes out empty, W and rho_tilde are set to 0
/// and only the max-element hunt runs, which then selects the first arrival.
class AidedToUnaided final : public SbmspAlgorithm {
public:
  using Factory =
      std::function<std::unique_ptr<SbmspAlgorithm>(const AidedPromise&)>;

  AidedToUnaided(AuditOracle& oracle, Factory make_aided,
                 double inner_sampling_probability, Rng& rng)
      : oracle_(&oracle),
        make_aided_(std::move(make_aided)),
        inner_ps_(inner_sampling_probability),
        run_max_branch_(rng.bernoulli(0.5)),
        split_rng_(rng.next_u64()) {}

  double sampling_probability() const override {
    return run_max_branch_ ? 0.5 : (1.0 + inner_ps_) / 2.0;
  }

  bool max_element_branch() const { return run_max_branch_; }
  bool fallback_used() const { return fallback_; }
  std::int64_t rho_tilde() const { return rho_tilde_; }
  double estimated_W() const { return W_; }
  double ignore_threshold() const { return threshold_; }
  std::uint64_t ignored_light_arrivals() const { return ignored_light_; }

  void observe_sample(std::span<const RevealedElement> sample) override {
    std::vector<RevealedElement> inner_sample;
    std::vector<ElementId> estimation_ids;
    for (const auto& el : sample) {
      // Within the declared sample, an element belongs to the estimation
      // part with probability (1/2) / p_declared, which keeps its marginal
      // estimation-sample probability at exactly 1/2.
      const bool estimation =
          run_max_branch_ || split_rng_.bernoulli(1.0 / (1.0 + inner_ps_));
      if (estimation) {
        estimation_ids.push_back(el.id);
        if (W_ < el.weight) W_ = el.weight;
      } else {
        inner_sample.push_back(el);
      }
    }
    setops::normalize(estimation_ids);
    if (estimation_ids.empty()) {
      fallback_ = true;
      W_ = 0.0;
      rho_tilde_ = 0;
      return;
    }
    rho_tilde_ = 4 * static_cast<std::int64_t>(oracle_->rank(estimation_ids));
    if (run_max_branch_) return;
    if (rho_tilde_ == 0) {
      // Rank-0 sample: the aided run could select nothing anyway.
      fallback_ = true;
      return;
    }
    threshold_ = W_ / (8.0 * static_cast<double>(rho_tilde_));
    inner_ = make_aided_(AidedPromise{rho_tilde_, W_});
    std::vector<RevealedElement> filtered;
    for (const auto& el : inner_sample)
      if (el.weight > threshold_) filtered.push_back(el);
    inner_->observe_sample(filtered);
  }

  bool on_arrival(ElementId e, double weight) override {
    if (run_max_branch_ || fallback_) {
      if (picked_ || weight < W_) return false;
      scratch_.assign(1, e);
      if (!oracle_->is_independent(scratch_)) return false;  // skip loops
      picked_ = e;
      return true;
    }
    if (weight <= threshold_) {
      ++ignored_light_;
      return false;
    }
    return inner_->on_arrival(e, weight);
  }

  std::vector<ElementId> selected() const override {
    if (run_max_branch_ || fallback_)
      return picked_ ? std::vector<ElementId>{*picked_} : std::vector<ElementId>{};
    return inner_ ? inner_->selected() : std::vector<ElementId>{};
  }

  const SbmspAlgorithm* inner() const { return inner_.get(); }

private:
  AuditOracle* oracle_;
  Factory make_aided_;
  double inner_ps_;
  bool run_max_branch_;
  Rng split_rng_;

  bool fallback_ = false;
  double W_ = 0.0;
  std::int64_t rho_tilde_ = 0;
  double threshold_ = 0.0;
  std::optional<ElementId> picked_;
  std::unique_ptr<SbmspAlgorithm> inner_;
  std::uint64_t ignored_light_ = 0;
  std::vector<ElementId> scratch_;
};

/// The classical single-choice baseline: observe floor(n / e) arrivals, then
/// take the first one beating everything observed (skipping loops). Used to
/// calibrate the harness; selects the best element with probability about
/// 1/e under a uniformly random order.
inline std::optional<ElementId> classical_secretary(
    AuditOracle& oracle, const WeightedGroundSet& w,
    const std::vector<ElementId>& permutation) {
  const int n = static_cast<int>(permutation.size());
  const int sample_len =
      static_cast<int>(static_cast<double>(n) / std::numbers::e);
  std::optional<ElementId> best;
  for (int pos = 0; pos < n; ++pos) {
    const ElementId e = permutation[static_cast<std::size_t>(pos)];
    oracle.reveal(e);
    if (pos < sample_len) {
      if (!best || w.heavier(e, *best)) best = e;
      continue;
    }
    if (!best || w.heavier(e, *best)) {
      const std::vector<ElementId> single{e};
      if (oracle.is_independent(single)) return e;
      best = e;
    }
  }
  return std::nullopt;
}

}  // namespace matsec
