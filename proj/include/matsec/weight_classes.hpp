#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "matsec/core.hpp"
#include "matsec/rng.hpp"

namespace matsec {

/// Smallest t with 2^t >= x, for x >= 1.
inline int ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0 : std::bit_width(x - 1);
}

/// The two promises handed to an aided algorithm: rho_tilde bounds the rank
/// from above, and every admissible weight lies in (W / (8 rho_tilde), W].
struct AidedPromise {
  std::int64_t rho_tilde = 1;
  double W = 1.0;
};

/// Geometric weight classes derived from the promises (W, rho_tilde):
/// h = ceil(3 + log2(rho_tilde)) classes, class i covering the half-open
/// band (W / 2^(h-i+1), W / 2^(h-i)]. Class 1 holds the lightest admissible
/// weights and class h ends at W. Every weight in (W / (8 rho_tilde), W]
/// receives a class because 2^h >= 8 rho_tilde.
class WeightClassing {
public:
  WeightClassing(double max_weight_promise, std::int64_t rank_promise)
      : W_(max_weight_promise), rho_tilde_(rank_promise) {
    if (!(W_ > 0.0)) throw std::invalid_argument("W must be positive");
    if (rho_tilde_ < 1)
      throw std::invalid_argument("rank promise must be a positive integer");
    h_ = 3 + ceil_log2(static_cast<std::uint64_t>(rho_tilde_));
  }

  double W() const { return W_; }
  std::int64_t rho_tilde() const { return rho_tilde_; }
  int num_classes() const { return h_; }

  /// Lower (exclusive) and upper (inclusive) boundary of class i.
  double class_lower(int i) const { return std::ldexp(W_, -(h_ - i + 1)); }
  double class_upper(int i) const { return std::ldexp(W_, -(h_ - i)); }

  /// The unique class index in [1, h] whose band contains the weight.
  /// A log2-based guess is validated and corrected against the exact
  /// half-open intervals, so boundary weights land deterministically.
  int class_of(double weight) const {
    if (!(weight > class_lower(1)) || !(weight <= W_))
      throw OutOfPromiseError("weight outside the admissible range");
    int i = h_ - static_cast<int>(std::floor(std::log2(W_ / weight)));
    if (i < 1) i = 1;
    if (i > h_) i = h_;
    while (i > 1 && weight <= class_lower(i)) --i;
    while (i < h_ && weight > class_upper(i)) ++i;
    return i;
  }

  bool in_promise_range(double weight) const {
    return weight > class_lower(1) && weight <= W_;
  }

private:
  double W_;
  std::int64_t rho_tilde_;
  int h_;
};

/// The randomized bucketing draw: a bucket width 2^tau and a shift delta.
struct RandomBucketingParams {
  int tau = 0;
  int delta = 0;
};

/// Upper end of the tau range for h classes.
inline int max_tau(int h) { return ceil_log2(static_cast<std::uint64_t>(h) + 1); }

/// tau uniform on {0, ..., max_tau(h)}, then delta uniform on {0, ..., 2^tau - 1}.
inline RandomBucketingParams sample_params(int h, Rng& rng) {
  RandomBucketingParams p;
  p.tau = static_cast<int>(rng.uniform_int(0, max_tau(h)));
  p.delta = static_cast<int>(rng.uniform_int(0, (std::int64_t{1} << p.tau) - 1));
  return p;
}

/// An ordered partition of the class indices [1, h] into buckets of
/// consecutive classes. Bucket i spans classes first(i)..last(i), with
/// first(1) = 1, last(i) + 1 = first(i+1), and last(b) = h.
class Bucketing {
public:
  explicit Bucketing(std::vector<std::pair<int, int>> spans)
      : spans_(std::move(spans)) {
    if (spans_.empty()) throw std::invalid_argument("bucketing must be nonempty");
    if (spans_.front().first != 1)
      throw std::invalid_argument("first bucket must start at class 1");
    for (std::size_t i = 0; i < spans_.size(); ++i) {
      if (spans_[i].first > spans_[i].second)
        throw std::invalid_argument("bucket spans must be nonempty");
      if (i + 1 < spans_.size() && spans_[i].second + 1 != spans_[i + 1].first)
        throw std::invalid_argument("buckets must cover consecutive classes");
    }
    class_to_bucket_.assign(static_cast<std::size_t>(num_classes()) + 1, 0);
    for (std::size_t i = 0; i < spans_.size(); ++i)
      for (int c = spans_[i].first; c <= spans_[i].second; ++c)
        class_to_bucket_[static_cast<std::size_t>(c)] = static_cast<int>(i) + 1;
  }

  int num_buckets() const { return static_cast<int>(spans_.size()); }
  int num_classes() const { return spans_.back().second; }

  /// First class index of bucket i; 0 for i <= 0 by convention.
  int first_class(int i) const {
    if (i <= 0) return 0;
    return spans_[static_cast<std::size_t>(i) - 1].first;
  }

  /// Last class index of bucket i; 0 for i <= 0 by convention.
  int last_class(int i) const {
    if (i <= 0) return 0;
    return spans_[static_cast<std::size_t>(i) - 1].second;
  }

  int bucket_of_class(int c) const {
    if (c < 1 || c > num_classes())
      throw InvalidQueryError("class index outside [1, h]");
    return class_to_bucket_[static_cast<std::size_t>(c)];
  }

  /// Serialized as "f:l,f:l,...".
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < spans_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(spans_[i].first);
      out += ':';
      out += std::to_string(spans_[i].second);
    }
    return out;
  }

private:
  std::vector<std::pair<int, int>> spans_;
  std::vector<int> class_to_bucket_;
};

/// Bucketing with ceil((h + delta) / 2^tau) buckets where bucket i covers
/// classes [2^tau (i-1) - delta + 1, 2^tau i - delta], clipped to [1, h]
/// (class indices outside [1, h] denote empty classes and are dropped).
inline Bucketing make_bucketing(int h, RandomBucketingParams params) {
  if (h < 1) throw std::invalid_argument("need at least one class");
  if (params.tau < 0 || params.tau > max_tau(h))
    throw std::invalid_argument("tau outside its legal range");
  const std::int64_t width = std::int64_t{1} << params.tau;
  if (params.delta < 0 || params.delta >= width)
    throw std::invalid_argument("delta outside its legal range");
  const std::int64_t b = (h + params.delta + width - 1) / width;
  std::vector<std::pair<int, int>> spans;
  spans.reserve(static_cast<std::size_t>(b));
  for (std::int64_t i = 1; i <= b; ++i) {
    const std::int64_t lo = width * (i - 1) - params.delta + 1;
    const std::int64_t hi = width * i - params.delta;
    spans.emplace_back(static_cast<int>(std::max<std::int64_t>(lo, 1)),
                       static_cast<int>(std::min<std::int64_t>(hi, h)));
  }
  return Bucketing(std::move(spans));
}

/// One bucket per class (the tau = 0 draw).
inline Bucketing singleton_bucketing(int h) {
  return make_bucketing(h, RandomBucketingParams{0, 0});
}

}  // namespace matsec
