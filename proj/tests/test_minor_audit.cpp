#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <vector>

#include "matsec/audit.hpp"
#include "matsec/exhaustive.hpp"
#include "matsec/matroid.hpp"
#include "matsec/minor.hpp"
#include "matsec/rng.hpp"

using namespace matsec;

TEST_CASE("minor rank follows the contraction formula on a triangle") {
  GraphicMatroid m(3, {{0, 1}, {1, 2}, {2, 0}});
  MinorView view(m, {0}, {1, 2});
  CHECK(view.contracted_rank() == 1);
  CHECK(view.rank(std::vector<ElementId>{1}) == 1);
  CHECK(view.rank(std::vector<ElementId>{1, 2}) == 1);
  CHECK(view.is_independent(std::vector<ElementId>{1}));
  CHECK_FALSE(view.is_independent(std::vector<ElementId>{1, 2}));
  CHECK_THROWS_AS(view.rank(std::vector<ElementId>{0}), InvalidQueryError);
}

TEST_CASE("contracting nothing reproduces the parent rank") {
  GraphicMatroid m(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
  MinorView view(m, {}, all_elements(m));
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<ElementId> subset;
    for (ElementId e = 0; e < m.size(); ++e)
      if (rng.bernoulli(0.5)) subset.push_back(e);
    CHECK(view.rank(subset) == m.rank(subset));
  }
}

TEST_CASE("contracted and restricted sets must be disjoint") {
  UniformMatroid m(4, 2);
  CHECK_THROWS_AS(MinorView(m, {0, 1}, {1, 2}), std::invalid_argument);
}

TEST_CASE("minors of matroids are matroids") {
  std::vector<std::unique_ptr<Matroid>> parents;
  parents.push_back(std::make_unique<GraphicMatroid>(
      4, std::vector<std::pair<int, int>>{
             {0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}}));
  parents.push_back(std::make_unique<PartitionMatroid>(
      6, std::vector<std::vector<ElementId>>{{0, 1, 2}, {3, 4, 5}},
      std::vector<int>{2, 1}));
  parents.push_back(std::make_unique<LaminarMatroid>(
      6, std::vector<LaminarMatroid::FamilySet>{
             {3, {0, 1, 2, 3, 4, 5}}, {1, {0, 1}}, {1, {3, 4}}}));
  Rng rng(99);
  for (const auto& parent : parents) {
    for (int rep = 0; rep < 8; ++rep) {
      std::vector<ElementId> contracted, restricted;
      for (ElementId e = 0; e < parent->size(); ++e) {
        const auto coin = rng.uniform_int(0, 3);
        if (coin == 0)
          contracted.push_back(e);
        else if (coin != 1)
          restricted.push_back(e);
      }
      MinorView view(*parent, contracted, restricted);
      MinorAsMatroid as_matroid(view);
      const auto result = check_matroid_axioms(as_matroid);
      INFO(parent->family_name() << " rep " << rep << ": " << result.detail);
      CHECK(result.pass);
    }
  }
}

TEST_CASE("audit oracle passes through for fully revealed ground sets") {
  GraphicMatroid m(3, {{0, 1}, {1, 2}, {2, 0}});
  AuditOracle oracle(m);
  oracle.reveal_all();
  CHECK(oracle.is_independent(std::vector<ElementId>{0, 1}));
  CHECK(oracle.rank(std::vector<ElementId>{0, 1, 2}) == 2);
  CHECK(oracle.span_contains(std::vector<ElementId>{0, 1}, 2));
  CHECK(oracle.violation_count() == 0);
  CHECK(oracle.query_count() > 0);
}

TEST_CASE("audit oracle rejects queries about unrevealed elements") {
  UniformMatroid m(3, 2);
  AuditOracle oracle(m);
  const auto before = AuditTotals::violations().load();
  CHECK_THROWS_AS(oracle.is_independent(std::vector<ElementId>{0}),
                  AuditViolationError);
  CHECK(oracle.violation_count() == 1);
  CHECK(AuditTotals::violations().load() == before + 1);

  oracle.reveal(0);
  oracle.reveal(1);
  CHECK(oracle.is_independent(std::vector<ElementId>{0, 1}));
  CHECK_THROWS_AS(oracle.span_contains(std::vector<ElementId>{0}, 2),
                  AuditViolationError);
}
