#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <vector>

#include "matsec/analysis.hpp"
#include "matsec/audit.hpp"
#include "matsec/matroid.hpp"
#include "matsec/minor.hpp"
#include "matsec/rng.hpp"
#include "matsec/secretary.hpp"
#include "matsec/weight_classes.hpp"

using namespace matsec;

namespace {

/// Weights drawn inside the admissible window of a promise, spread across
/// several classes.
WeightedGroundSet window_weights(int n, const AidedPromise& promise, Rng& rng) {
  const double lo = promise.W / (8.0 * static_cast<double>(promise.rho_tilde));
  std::vector<double> w(static_cast<std::size_t>(n));
  for (auto& x : w) {
    const double u = rng.uniform_double();
    x = lo * std::pow(promise.W / lo, 0.02 + 0.96 * u);  // log-uniform inside
  }
  return WeightedGroundSet(std::move(w));
}

std::vector<std::unique_ptr<Matroid>> small_family_zoo() {
  std::vector<std::unique_ptr<Matroid>> zoo;
  zoo.push_back(std::make_unique<UniformMatroid>(10, 3));
  zoo.push_back(std::make_unique<PartitionMatroid>(
      9, std::vector<std::vector<ElementId>>{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}},
      std::vector<int>{1, 2, 1}));
  zoo.push_back(std::make_unique<GraphicMatroid>(
      5, std::vector<std::pair<int, int>>{
             {0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}, {1, 3}, {2, 4}}));
  zoo.push_back(std::make_unique<LaminarMatroid>(
      8, std::vector<LaminarMatroid::FamilySet>{{4, {0, 1, 2, 3, 4, 5, 6, 7}},
                                                {2, {0, 1, 2, 3}},
                                                {1, {0, 1}},
                                                {2, {4, 5, 6}}}));
  zoo.push_back(std::make_unique<TransversalMatroid>(
      8, std::vector<std::vector<ElementId>>{
             {0, 1, 2}, {2, 3, 4}, {4, 5}, {5, 6, 7}, {1, 7}}));
  return zoo;
}

}  // namespace

TEST_CASE("free matroid accepts exactly the first-bucket arrivals") {
  const int n = 6;
  UniformMatroid m(n, n);  // span(A) = A, so only condition (a) filters
  AidedPromise promise{4, 1.0};
  WeightClassing classing(promise.W, promise.rho_tilde);
  REQUIRE(classing.num_classes() == 5);
  // Weights hitting classes 1..5 deterministically.
  std::vector<double> ws;
  for (int e = 0; e < n; ++e)
    ws.push_back(classing.class_upper(1 + (e % 5)));
  WeightedGroundSet w(std::move(ws));
  const auto bucketing = make_bucketing(5, {1, 0});  // [1,2], [3,4], [5,5]

  const std::vector<ElementId> sample{0, 3};
  const std::vector<ElementId> phase2{5, 4, 2, 1};
  for (const Parity parity : {Parity::kOdd, Parity::kEven}) {
    AuditOracle oracle(m);
    BucketingBasedAlgorithm alg(oracle, classing, bucketing, parity);
    const auto result = run_sbmsp(alg, oracle, w, sample, phase2);
    std::vector<ElementId> expected;
    if (parity == Parity::kOdd) {
      for (ElementId e : phase2)
        if (bucketing.bucket_of_class(classing.class_of(w.weight(e))) == 1)
          expected.push_back(e);
      setops::normalize(expected);
    }
    CHECK(result.selected == expected);
    CHECK(alg.promise_violations() == 0);
  }
}

TEST_CASE("sampling everything leaves nothing to select") {
  UniformMatroid m(5, 5);
  AidedPromise promise{2, 1.0};
  Rng wrng(5);
  const auto w = window_weights(5, promise, wrng);
  AuditOracle oracle(m);
  Rng rng(17);
  FullAlgorithm alg(oracle, promise, rng);
  const auto result = run_sbmsp(alg, oracle, w, all_elements(m), {});
  CHECK(result.selected.empty());
}

TEST_CASE("rank-zero matroids always come back empty") {
  UniformMatroid m(5, 0);  // every element is a loop
  AidedPromise promise{1, 1.0};
  Rng wrng(2);
  const auto w = window_weights(5, promise, wrng);
  for (std::uint64_t s = 0; s < 20; ++s) {
    AuditOracle oracle(m);
    Rng rng(s);
    FullAlgorithm alg(oracle, promise, rng);
    auto [sample, rest] = draw_sample(5, 0.5, rng);
    const auto result = run_sbmsp(alg, oracle, w, sample, rest);
    CHECK(result.selected.empty());
  }
}

TEST_CASE("arrivals outside the promised window are rejected and counted") {
  UniformMatroid m(3, 3);
  AidedPromise promise{1, 1.0};
  WeightedGroundSet w(std::vector<double>{1.0, 0.5, 10.0});  // 10 breaks (ii)
  AuditOracle oracle(m);
  Rng rng(3);
  FullAlgorithm alg(oracle, promise, rng);
  const auto result = run_sbmsp(alg, oracle, w, {1}, {2, 0});
  CHECK(alg.promise_violations() == 1);
  for (ElementId e : result.selected) CHECK(e != 2);
}

TEST_CASE("streaming accept test matches the contracted-view rank test") {
  // Every accept/reject decision is double-checked against the direct rank
  // formula inside the algorithm when cross_check is on.
  Rng master(424242);
  std::uint64_t decisions = 0;
  for (auto& m : small_family_zoo()) {
    const AidedPromise promise{2 * std::max<std::int64_t>(1, m->rank(all_elements(*m))),
                               1.0};
    for (int rep = 0; rep < 60; ++rep) {
      Rng wrng(master.next_u64());
      const auto w = window_weights(m->size(), promise, wrng);
      Rng srng(master.next_u64());
      auto [sample, rest] = draw_sample(m->size(), 0.5, srng);
      if (rep % 3 == 1) {
        std::sort(rest.begin(), rest.end(),
                  [&](ElementId a, ElementId b) { return w.heavier(a, b); });
      } else if (rep % 3 == 2) {
        srng.shuffle(rest);
      }
      AuditOracle oracle(*m);
      Rng arng(master.next_u64());
      FullAlgorithm alg(oracle, promise, arng, std::nullopt, std::nullopt,
                        /*cross_check=*/true);
      const auto result = run_sbmsp(alg, oracle, w, sample, rest);
      CHECK(m->is_independent(result.selected));
      CHECK(alg.cross_check_mismatches() == 0);
      decisions += alg.decisions();
    }
  }
  CHECK(decisions > 500);
}

TEST_CASE("unions of independent sets from same-parity views stay independent") {
  Rng master(777);
  int draws = 0;
  for (auto& m : small_family_zoo()) {
    const std::int64_t rho = std::max<std::int64_t>(1, m->rank(all_elements(*m)));
    const AidedPromise promise{rho, 1.0};
    const WeightClassing classing(promise.W, promise.rho_tilde);
    const int h = classing.num_classes();
    for (int rep = 0; rep < 40; ++rep) {
      Rng wrng(master.next_u64());
      const auto w = window_weights(m->size(), promise, wrng);
      Rng rng(master.next_u64());
      const auto params = sample_params(h, rng);
      const auto bucketing = make_bucketing(h, params);
      auto [sample, rest] = draw_sample(m->size(), 0.5, rng);
      const Parity parity = BucketingBasedAlgorithm::draw_parity(rng);

      // Build each active bucket's view straight from its definition.
      const int b = bucketing.num_buckets();
      std::vector<std::vector<ElementId>> bucket_members(
          static_cast<std::size_t>(b) + 2);
      for (ElementId e = 0; e < m->size(); ++e)
        bucket_members[static_cast<std::size_t>(
                           bucketing.bucket_of_class(classing.class_of(w.weight(e))))]
            .push_back(e);
      std::vector<std::vector<ElementId>> sample_suffix(
          static_cast<std::size_t>(b) + 2);
      for (int i = b; i >= 1; --i) {
        sample_suffix[static_cast<std::size_t>(i)] = setops::unite(
            sample_suffix[static_cast<std::size_t>(i) + 1],
            setops::intersect(bucket_members[static_cast<std::size_t>(i)], sample));
      }
      std::vector<ElementId> united;
      for (int i = 1; i <= b; ++i) {
        if ((i % 2 == 1) != (parity == Parity::kOdd)) continue;
        std::vector<ElementId> ground;
        for (ElementId e : bucket_members[static_cast<std::size_t>(i)]) {
          if (i == 1 ||
              m->span_contains(sample_suffix[static_cast<std::size_t>(i) - 1], e))
            ground.push_back(e);
        }
        MinorView view(*m, sample_suffix[static_cast<std::size_t>(i) + 1], ground);
        // Random independent set in the view, not necessarily maximal.
        auto order = ground;
        rng.shuffle(order);
        std::vector<ElementId> picked;
        for (ElementId e : order) {
          if (!rng.bernoulli(0.67)) continue;
          picked.push_back(e);
          if (!view.is_independent(picked)) picked.pop_back();
        }
        united.insert(united.end(), picked.begin(), picked.end());
        ++draws;
      }
      setops::normalize(united);
      CHECK(m->is_independent(united));
    }
  }
  CHECK(draws > 100);
}

TEST_CASE("binomial prefix sampling edge cases") {
  UniformMatroid m(6, 3);
  AidedPromise promise{3, 1.0};
  Rng wrng(11);
  const auto w = window_weights(6, promise, wrng);

  struct FixedPs final : SbmspAlgorithm {
    explicit FixedPs(double p) : p_(p) {}
    double sampling_probability() const override { return p_; }
    void observe_sample(std::span<const RevealedElement> sample) override {
      for (const auto& el : sample) seen.push_back(el.id);
    }
    bool on_arrival(ElementId, double) override { return false; }
    std::vector<ElementId> selected() const override { return {}; }
    double p_;
    std::vector<ElementId> seen;
  };

  Rng rng(99);
  {
    FixedPs alg(0.0);
    AuditOracle oracle(m);
    const auto res = sbmsp_to_msp(alg, oracle, w, rng.permutation(6), rng);
    CHECK(res.sample_size == 0);
    CHECK(alg.seen.empty());
  }
  {
    FixedPs alg(1.0);
    AuditOracle oracle(m);
    const auto res = sbmsp_to_msp(alg, oracle, w, rng.permutation(6), rng);
    CHECK(res.sample_size == 6);
    CHECK(res.selected.empty());
  }
  {
    // Membership frequency smoke check at p_s = 1/2.
    const int trials = 20000;
    std::vector<int> hits(6, 0);
    for (int t = 0; t < trials; ++t) {
      FixedPs alg(0.5);
      AuditOracle oracle(m);
      Rng trng(derive_seed(31337, static_cast<std::uint64_t>(t)));
      auto perm = trng.permutation(6);
      sbmsp_to_msp(alg, oracle, w, perm, trng);
      for (ElementId e : alg.seen) ++hits[static_cast<std::size_t>(e)];
    }
    const double sigma = std::sqrt(trials * 0.25);
    for (int e = 0; e < 6; ++e)
      CHECK(std::abs(hits[static_cast<std::size_t>(e)] - trials / 2.0) <=
            4.0 * sigma);
  }
}

TEST_CASE("promise estimation of the unaided wrapper") {
  UniformMatroid m(10, 3);
  WeightedGroundSet w(std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 0.55,
                                          0.65, 0.75, 0.85});
  auto factory = [](AuditOracle& oracle) {
    return [&oracle](const AidedPromise& promise) {
      Rng inner_rng(1);
      return std::make_unique<FullAlgorithm>(oracle, promise, inner_rng);
    };
  };

  // Find deterministic seeds for each branch.
  std::optional<std::uint64_t> seed_max, seed_aided;
  for (std::uint64_t s = 0; s < 64 && (!seed_max || !seed_aided); ++s) {
    Rng rng(s);
    AuditOracle oracle(m);
    AidedToUnaided alg(oracle, factory(oracle), 0.5, rng);
    (alg.max_element_branch() ? seed_max : seed_aided) = s;
  }
  REQUIRE(seed_max);
  REQUIRE(seed_aided);

  {
    // Max-element branch: the whole sample estimates the promises, and a
    // rank-3 sample reports a rank promise of 12.
    Rng rng(*seed_max);
    AuditOracle oracle(m);
    AidedToUnaided alg(oracle, factory(oracle), 0.5, rng);
    CHECK(alg.sampling_probability() == 0.5);
    run_sbmsp(alg, oracle, w, {0, 1, 2, 3, 4}, {5, 6});
    CHECK(alg.rho_tilde() == 12);
    CHECK(alg.estimated_W() == 0.9);
    // First arrival at least as heavy as W is taken.
    CHECK(alg.selected() == std::vector<ElementId>{5});
  }
  {
    // Aided branch: declared sampling probability (1 + 1/2) / 2, light
    // arrivals at or below W / (8 rho_tilde) never reach the inner run.
    Rng rng(*seed_aided);
    AuditOracle oracle(m);
    AidedToUnaided alg(oracle, factory(oracle), 0.5, rng);
    CHECK(alg.sampling_probability() == 0.75);
    std::vector<RevealedElement> sample;
    for (ElementId e : {0, 1, 2, 3, 4, 5}) {
      oracle.reveal(e);
      sample.push_back({e, w.weight(e)});
    }
    alg.observe_sample(sample);
    REQUIRE(alg.rho_tilde() > 0);
    CHECK(alg.ignore_threshold() ==
          alg.estimated_W() / (8.0 * static_cast<double>(alg.rho_tilde())));
    oracle.reveal(6);
    const auto ignored_before = alg.ignored_light_arrivals();
    // Weight exactly at the threshold: ignored.
    CHECK_FALSE(alg.on_arrival(6, alg.ignore_threshold()));
    CHECK(alg.ignored_light_arrivals() == ignored_before + 1);
    // Just above the threshold: forwarded (decision may go either way).
    oracle.reveal(7);
    alg.on_arrival(7, alg.ignore_threshold() * 1.0001);
    CHECK(alg.ignored_light_arrivals() == ignored_before + 1);
  }
}

TEST_CASE("wrapper takes the heaviest of two when it hides in phase two") {
  // Two elements; when the heaviest reaches phase 2, the second-heaviest is
  // sampled, and the max-element branch runs, the heaviest is always taken.
  // That joint event has probability 1/2 * 1/2 * 1/2 = 1/8.
  UniformMatroid m(2, 1);
  WeightedGroundSet w(std::vector<double>{5.0, 3.0});
  const int trials = 20000;
  int event_count = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = derive_seed(311000, static_cast<std::uint64_t>(t));
    Rng brng(derive_seed(ts, stream::kBranch));
    AuditOracle oracle(m);
    AidedToUnaided alg(
        oracle,
        [&oracle](const AidedPromise& promise) {
          Rng inner(1);
          return std::make_unique<FullAlgorithm>(oracle, promise, inner);
        },
        0.5, brng);
    Rng srng(derive_seed(ts, stream::kSample));
    auto [sample, rest] = draw_sample(2, alg.sampling_probability(), srng);
    const auto res = run_sbmsp(alg, oracle, w, sample, rest);
    const bool event = alg.max_element_branch() &&
                       sample == std::vector<ElementId>{1} &&
                       rest == std::vector<ElementId>{0};
    if (event) {
      ++event_count;
      CHECK(res.selected == std::vector<ElementId>{0});
    }
  }
  const double freq = static_cast<double>(event_count) / trials;
  const double sigma = std::sqrt(0.125 * 0.875 / trials);
  CHECK(std::abs(freq - 0.125) <= 4.0 * sigma);
}

TEST_CASE("wrapper branch coin is roughly fair") {
  UniformMatroid m(2, 1);
  int max_branch = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(909, static_cast<std::uint64_t>(t)));
    AuditOracle oracle(m);
    AidedToUnaided alg(
        oracle,
        [&oracle](const AidedPromise& promise) {
          Rng inner_rng(0);
          return std::make_unique<FullAlgorithm>(oracle, promise, inner_rng);
        },
        0.5, rng);
    if (alg.max_element_branch()) ++max_branch;
  }
  const double sigma = std::sqrt(trials * 0.25);
  CHECK(std::abs(max_branch - trials / 2.0) <= 4.0 * sigma);
}

TEST_CASE("wrapper on a single element selects it exactly when selectable") {
  UniformMatroid m(1, 1);
  WeightedGroundSet w(std::vector<double>{1.0});
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    AuditOracle oracle(m);
    AidedToUnaided alg(
        oracle,
        [&oracle](const AidedPromise& promise) {
          Rng inner_rng(5);
          return std::make_unique<FullAlgorithm>(oracle, promise, inner_rng);
        },
        0.5, rng);
    Rng srng(derive_seed(s, stream::kSample));
    auto [sample, rest] = draw_sample(1, alg.sampling_probability(), srng);
    const auto res = run_sbmsp(alg, oracle, w, sample, rest);
    // Selected iff the element reached phase 2.
    CHECK(res.selected == rest);
  }
}

TEST_CASE("empty estimation sample falls back to the max-element hunt") {
  UniformMatroid m(3, 2);
  WeightedGroundSet w(std::vector<double>{0.3, 0.8, 0.5});
  Rng rng(4);
  AuditOracle oracle(m);
  AidedToUnaided alg(
      oracle,
      [&oracle](const AidedPromise& promise) {
        Rng inner_rng(6);
        return std::make_unique<FullAlgorithm>(oracle, promise, inner_rng);
      },
      0.5, rng);
  const auto res = run_sbmsp(alg, oracle, w, {}, {2, 1, 0});
  CHECK(alg.fallback_used());
  CHECK(alg.estimated_W() == 0.0);
  CHECK(alg.rho_tilde() == 0);
  CHECK(res.selected == std::vector<ElementId>{2});  // first arrival, W = 0
}

TEST_CASE("classical baseline on one element selects it") {
  UniformMatroid m(1, 1);
  WeightedGroundSet w(std::vector<double>{3.0});
  AuditOracle oracle(m);
  const auto pick = classical_secretary(oracle, w, {0});
  REQUIRE(pick.has_value());
  CHECK(*pick == 0);
}

TEST_CASE("classical baseline hits the best element at about 1/e") {
  const int n = 100;
  UniformMatroid m(n, 1);
  const int trials = 20000;

  auto hit_rate = [&](auto&& weight_for_trial) {
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
      Rng rng(derive_seed(6021, static_cast<std::uint64_t>(t)));
      const WeightedGroundSet w = weight_for_trial(rng);
      ElementId best = 0;
      for (ElementId e = 1; e < n; ++e)
        if (w.heavier(e, best)) best = e;
      AuditOracle oracle(m);
      const auto pick = classical_secretary(oracle, w, rng.permutation(n));
      if (pick && *pick == best) ++hits;
    }
    return static_cast<double>(hits) / trials;
  };

  const double random_rate = hit_rate([&](Rng& rng) {
    std::vector<double> ws(n);
    for (auto& x : ws) x = 1.0 - rng.uniform_double();
    return WeightedGroundSet(std::move(ws));
  });
  CHECK(random_rate >= 0.33);
  CHECK(random_rate <= 0.41);

  // Decreasing weights: same guarantee, the arrival order is still random.
  std::vector<double> decreasing(n);
  for (int e = 0; e < n; ++e) decreasing[static_cast<std::size_t>(e)] = std::pow(0.99, e);
  const double adversarial_rate = hit_rate([&](Rng&) {
    return WeightedGroundSet(std::vector<double>(decreasing));
  });
  CHECK(adversarial_rate >= 0.33);
  CHECK(adversarial_rate <= 0.41);
}
