#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "matsec/analysis.hpp"
#include "matsec/matroid.hpp"
#include "matsec/rng.hpp"
#include "matsec/weight_classes.hpp"

using namespace matsec;

TEST_CASE("span probability table on a one-slot pair") {
  // Two elements in the same class of a rank-1 uniform matroid: each is
  // spanned exactly when the other is sampled.
  UniformMatroid m(2, 1);
  WeightedGroundSet w(std::vector<double>{1.0, 0.9});
  WeightClassing classing(1.0, 1);
  const auto table = exact_p_table(m, w, classing);
  REQUIRE(table.h == 3);
  const int top = classing.class_of(1.0);
  for (ElementId e = 0; e < 2; ++e) {
    CHECK(table.value(e, 0) == 1.0);
    CHECK(table.value(e, top) == 0.5);
    for (int i = 1; i <= table.h; ++i)
      CHECK(table.value(e, i - 1) >= table.value(e, i));
  }
}

TEST_CASE("empty class suffix spans nothing but loops") {
  // All weights sit in class 1, so the suffix from class 2 up is empty.
  UniformMatroid m(3, 2);
  WeightClassing classing(1.0, 2);  // four classes
  WeightedGroundSet w(std::vector<double>{
      classing.class_upper(1), classing.class_upper(1) * 0.9,
      classing.class_upper(1) * 0.8});
  const auto table = exact_p_table(m, w, classing);
  for (ElementId e = 0; e < 3; ++e) {
    CHECK(table.value(e, 2) == 0.0);
    CHECK(table.value(e, classing.num_classes()) == 0.0);
  }
}

TEST_CASE("monte carlo table agrees with the exact table within four sigma") {
  GraphicMatroid m(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}});
  AidedPromise promise{3, 1.0};
  WeightClassing classing(promise.W, promise.rho_tilde);
  Rng wrng(8);
  std::vector<double> ws;
  const double lo = promise.W / (8.0 * 3.0);
  for (int e = 0; e < 6; ++e)
    ws.push_back(lo + (promise.W - lo) * (1.0 - wrng.uniform_double()));
  WeightedGroundSet w(std::move(ws));

  const auto exact = exact_p_table(m, w, classing);
  Rng rng(31);
  const auto mc = estimate_p_table(m, w, classing, 20000, rng);
  for (ElementId e = 0; e < 6; ++e)
    for (int i = 0; i <= exact.h; ++i) {
      const double tol = 4.0 * mc.stderr_of(e, i) + 1e-12;
      CHECK(std::abs(mc.value(e, i) - exact.value(e, i)) <= tol);
    }
}

TEST_CASE("single-trial estimates are indicators") {
  UniformMatroid m(4, 2);
  AidedPromise promise{2, 1.0};
  WeightClassing classing(promise.W, promise.rho_tilde);
  Rng wrng(12);
  std::vector<double> ws;
  for (int e = 0; e < 4; ++e)
    ws.push_back(promise.W * (0.2 + 0.1 * e));
  WeightedGroundSet w(std::move(ws));
  Rng rng(5);
  const auto table = estimate_p_table(m, w, classing, 1, rng);
  for (ElementId e = 0; e < 4; ++e)
    for (int i = 1; i <= table.h; ++i) {
      const double v = table.value(e, i);
      CHECK((v == 0.0 || v == 1.0));
    }
  CHECK_THROWS_AS(estimate_p_table(m, w, classing, 0, rng),
                  std::invalid_argument);
}

TEST_CASE("estimator error shrinks like the inverse square root of trials") {
  UniformMatroid m(6, 2);
  AidedPromise promise{2, 1.0};
  WeightClassing classing(promise.W, promise.rho_tilde);
  std::vector<double> ws;
  for (int e = 0; e < 6; ++e)
    ws.push_back(classing.class_upper(1 + (e % classing.num_classes())));
  WeightedGroundSet w(std::move(ws));
  const auto exact = exact_p_table(m, w, classing);

  std::vector<double> log_trials, log_rmse;
  for (const std::uint64_t trials : {200u, 800u, 3200u, 12800u}) {
    double sq = 0.0;
    int cells = 0;
    for (int rep = 0; rep < 10; ++rep) {
      Rng rng(derive_seed(1000 + rep, trials));
      const auto mc = estimate_p_table(m, w, classing, trials, rng);
      for (ElementId e = 0; e < 6; ++e)
        for (int i = 1; i <= exact.h; ++i) {
          const double d = mc.value(e, i) - exact.value(e, i);
          sq += d * d;
          ++cells;
        }
    }
    log_trials.push_back(std::log(static_cast<double>(trials)));
    log_rmse.push_back(0.5 * std::log(sq / cells));
  }
  // Least-squares slope of log rmse against log trials.
  const auto k = static_cast<double>(log_trials.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_trials.size(); ++i) {
    sx += log_trials[i];
    sy += log_rmse[i];
    sxx += log_trials[i] * log_trials[i];
    sxy += log_trials[i] * log_rmse[i];
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  CHECK(slope >= -0.6);
  CHECK(slope <= -0.4);
}

TEST_CASE("shared-basis estimator equals the naive estimator coin for coin") {
  // The estimator reuses one greedy basis per class suffix instead of
  // rebuilding a set per (element, class) pair. Replaying the same coins
  // through a from-scratch evaluation must reproduce every count exactly.
  GraphicMatroid m(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {0, 1}});
  AidedPromise promise{3, 1.0};
  WeightClassing classing(promise.W, promise.rho_tilde);
  std::vector<double> ws;
  Rng wrng(77);
  const double lo = promise.W / 24.0;
  for (int e = 0; e < 6; ++e)
    ws.push_back(lo + (promise.W - lo) * (1.0 - wrng.uniform_double()));
  WeightedGroundSet w(std::move(ws));
  const auto cls = classes_of_all(w, classing);
  const int h = classing.num_classes();
  const std::uint64_t trials = 400;

  Rng rng_fast(90210);
  const auto fast = estimate_p_table(m, w, classing, trials, rng_fast);

  Rng rng_naive(90210);
  std::vector<std::vector<std::uint64_t>> hits(
      6, std::vector<std::uint64_t>(static_cast<std::size_t>(h) + 1, 0));
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::vector<char> coin(6);
    for (ElementId e = 0; e < 6; ++e) coin[e] = rng_naive.bernoulli(0.5);
    for (int i = 1; i <= h; ++i)
      for (ElementId e = 0; e < 6; ++e) {
        std::vector<ElementId> others;
        for (ElementId f = 0; f < 6; ++f)
          if (f != e && coin[f] && cls[f] >= i) others.push_back(f);
        if (m.span_contains(others, e)) ++hits[e][static_cast<std::size_t>(i)];
      }
  }
  for (ElementId e = 0; e < 6; ++e)
    for (int i = 1; i <= h; ++i)
      CHECK(fast.value(e, i) ==
            static_cast<double>(hits[e][static_cast<std::size_t>(i)]) / trials);
}

TEST_CASE("selection probabilities of a single-element instance") {
  UniformMatroid m(1, 1);
  WeightedGroundSet w(std::vector<double>{1.0});
  AidedPromise promise{1, 1.0};
  const std::vector<ElementId> order{0};

  // One wide bucket covering all classes: only the sample coin and the
  // parity coin matter.
  const auto single =
      exact_selection_probabilities(m, w, promise, order,
                                    make_bucketing(3, {2, 0}));
  CHECK(single[0] == 0.25);

  // Unit-width buckets: the element's bucket never satisfies the entry
  // condition, because nothing below can span it.
  const auto unit = exact_selection_probabilities(m, w, promise, order,
                                                  singleton_bucketing(3));
  CHECK(unit[0] == 0.0);

  // Marginal over all draws: only the two one-bucket draws select, each with
  // probability 1/4, at draw weight 1/12 each.
  const auto marginal = exact_selection_probabilities(m, w, promise, order);
  CHECK(marginal[0] == 1.0 / 24.0);
}

TEST_CASE("competitive bound formulas") {
  CHECK(competitive_bound_aided(6) == 64.0);
  CHECK(competitive_bound_aided(4) == 64.0);
  CHECK(competitive_bound_aided(3) == 48.0);
  CHECK(competitive_bound_end_to_end(1) == 15360.0);
}

TEST_CASE("exact bound suite passes and is tight on the single element") {
  UniformMatroid m(1, 1);
  WeightedGroundSet w(std::vector<double>{1.0});
  const auto report =
      check_selection_bounds_exact(m, w, AidedPromise{1, 1.0}, {0});
  CHECK(report.all_pass());
  // The class-marginal and wide-width bounds hold with equality here.
  for (const auto& row : report.rows) {
    if (row.check == "class_marginal" && row.cls == 3) CHECK(row.slack == 0.0);
    if (row.check == "element_wide" && row.element == 0) CHECK(row.slack == 0.0);
  }
}

TEST_CASE("exact bound suite passes on small instances") {
  GraphicMatroid graphic(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}});
  PartitionMatroid partition(
      8, {{0, 1, 2}, {3, 4}, {5, 6, 7}}, {1, 1, 2});
  const std::vector<const Matroid*> instances{&graphic, &partition};
  Rng master(5150);
  for (const Matroid* m : instances) {
    const std::int64_t rho = m->rank(all_elements(*m));
    AidedPromise promise{rho, 1.0};
    const double lo = promise.W / (8.0 * static_cast<double>(rho));
    std::vector<double> ws;
    for (int e = 0; e < m->size(); ++e)
      ws.push_back(lo + (promise.W - lo) * (1.0 - master.uniform_double()));
    WeightedGroundSet w(std::move(ws));
    auto order = all_elements(*m);
    for (int rep = 0; rep < 2; ++rep) {
      const auto report = check_selection_bounds_exact(*m, w, promise, order);
      INFO(m->family_name() << " order " << rep);
      CHECK(report.all_pass());
      master.shuffle(order);
    }
  }
}

TEST_CASE("enumeration budgets are enforced") {
  UniformMatroid big(15, 5);
  std::vector<double> ws(15, 0.5);
  WeightedGroundSet w(std::move(ws));
  WeightClassing classing(1.0, 4);
  CHECK_THROWS_AS(enumerate_selection(big, w, classing, all_elements(big)),
                  BudgetExceededError);
  UniformMatroid huge(21, 5);
  std::vector<double> ws2(21, 0.5);
  WeightedGroundSet w2(std::move(ws2));
  CHECK_THROWS_AS(exact_p_table(huge, w2, classing), BudgetExceededError);
}
