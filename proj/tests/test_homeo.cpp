#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cantor/error.hpp"
#include "cantor/homeo.hpp"
#include "oracles.hpp"

using namespace cantor;

namespace {

AlgebraicField r4() { return AlgebraicField::make(MinimalPolynomial::parse("x^4+x-1"), 0, 1); }

HomeoSetup flagship() {
  auto f = r4();
  auto e = derive_subfield(f.generator() * f.generator());
  return HomeoSetup{f, e.source(), e, BinomialRep{2, {1, 2, 0}}, BinomialRep{2, {0, 0, 1}}, {}, {}};
}

// Measures of a cell through the polynomial oracle: the r side directly,
// the s side with s replaced by x^2.
std::pair<oracle::Poly, oracle::Poly> oracle_measures(const ClopenCell& p, const ClopenCell& q) {
  const oracle::Poly m = oracle::ints({-1, 1, 0, 0, 1});
  oracle::Poly mr, ms;
  for (const auto& a : p.addresses) mr = oracle::add(mr, oracle::cyl(a.size().a, a.size().b));
  for (const auto& a : q.addresses) ms = oracle::add(ms, oracle::cyl(a.size().a, a.size().b));
  return {oracle::mod(mr, m), oracle::mod(oracle::compose(ms, oracle::ints({0, 0, 1})), m)};
}

}  // namespace

TEST_CASE("identity setup copies cylinders") {
  auto setup = HomeoSetup::identity(r4());
  auto stages = build(setup, 4);
  REQUIRE(stages.size() == 5);
  for (std::size_t i = 0; i < stages.back().p.size(); ++i) CHECK(stages.back().p[i] == stages.back().q[i]);
}

TEST_CASE("flagship pair to depth 4") {
  auto setup = flagship();
  std::vector<StageSummary> seen;
  auto stages = build(setup, 4, [&](const StageSummary& s) { seen.push_back(s); });
  REQUIRE(seen.size() == 4);
  CHECK(seen[0].cells == 2);
  CHECK(seen[1].cells == 3);
  CHECK(seen[2].cells == 6);
  CHECK(seen[3].cells == 17);
  for (const auto& st : stages)
    for (std::size_t i = 0; i < st.p.size(); ++i) {
      auto [mr, ms] = oracle_measures(st.p[i], st.q[i]);
      CHECK(mr == ms);
    }
  auto rows = export_table(stages.back(), setup);
  FieldElement tr = setup.r_field.zero(), ts = setup.s_field.zero();
  for (const auto& row : rows) {
    tr += row.measure_r;
    ts += row.measure_s;
    CHECK(row.measure_r == setup.s_to_r(row.measure_s));
  }
  CHECK(tr == setup.r_field.one());
  CHECK(ts == setup.s_field.one());
}

TEST_CASE("verification catches broken stages") {
  auto setup = flagship();
  auto stages = build(setup, 3);
  HomeoStage bad = stages.back();
  std::swap(bad.q.front(), bad.q.back());
  CHECK_THROWS_AS(verify_stage(bad, setup), Error);
  HomeoStage gap = stages.back();
  gap.p.back().addresses.pop_back();
  CHECK_THROWS_AS(verify_stage(gap, setup), Error);
  // A cell straddling two cells of the previous stage.
  HomeoStage wide = stages[2];
  wide.p[0] = ClopenCell{{Address()}};
  CHECK_THROWS_AS(verify_refines(stages[1], wide), Error);
  CHECK_NOTHROW(verify_refines(stages[2], stages[3]));
}

TEST_CASE("complement map and composition") {
  auto f = r4();
  auto flip = complement_map(f);
  REQUIRE(flip.size() == 2);
  // [1] has measure r, its image [0] has measure r under mu(1-r).
  for (const auto& row : flip) CHECK(row.measure_r == row.measure_s);
  auto twice = compose(flip, flip);
  for (const auto& row : twice) CHECK(row.src == row.dst);
  CHECK_THROWS_AS(compose(flip, {}), Error);
}
