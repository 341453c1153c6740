#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "cantor/error.hpp"
#include "cantor/refiner.hpp"
#include "oracles.hpp"

using namespace cantor;

namespace {

AlgebraicField r4() { return AlgebraicField::make(MinimalPolynomial::parse("x^4+x-1"), 0, 1); }
AlgebraicField s4() { return AlgebraicField::make(r4s_minpoly(), 0, 1); }

// Per-part sums and the witness against the leaves, without the library's
// own witness code.
void check_sound(const AlgebraicField& f, const Cylinder& c, const std::vector<FieldElement>& parts,
                 const TreePartition& t, const std::vector<std::size_t>& grouping, const RefinementWitness& w) {
  REQUIRE(tree_partition_violation(t).empty());
  CHECK(t.root.size() == c);
  REQUIRE(grouping.size() == t.leaves.size());
  std::vector<FieldElement> sums(parts.size(), f.zero());
  std::vector<std::vector<oracle::Z>> expect(w.n + 1, std::vector<oracle::Z>(parts.size(), 0));
  for (std::size_t k = 0; k < t.leaves.size(); ++k) {
    REQUIRE(grouping[k] < parts.size());
    Cylinder rel = t.leaves[k].relative_to(t.root).size();
    sums[grouping[k]] += f.eval_cylinder(c.a + rel.a, c.b + rel.b);
    REQUIRE(rel.length() <= w.n);
    for (unsigned i = 0; i <= w.n - rel.length(); ++i) expect[rel.a + i][grouping[k]] += oracle::choose(w.n - rel.length(), i);
  }
  for (std::size_t j = 0; j < parts.size(); ++j) CHECK(sums[j] == parts[j]);
  CHECK(w.p == expect);
}

std::vector<FieldElement> values(const AlgebraicField& f, const std::vector<Cylinder>& parts) {
  std::vector<FieldElement> out;
  for (const auto& p : parts) out.push_back(f.eval_cylinder(p.a, p.b));
  return out;
}

}  // namespace

TEST_CASE("the cube identity with the selmer strategy") {
  auto f = r4();
  std::vector<Cylinder> parts{{3, 0}, {0, 3}, {1, 1}, {1, 1}, {1, 1}};
  auto ref = refine_partition(f, {0, 0}, parts, {StrategyKind::Selmer});
  CHECK(ref.used == StrategyKind::Selmer);
  REQUIRE(ref.tree_trace);
  REQUIRE(ref.split_trace);
  check_sound(f, {0, 0}, values(f, parts), ref.partition, ref.grouping, ref.witness);
  CHECK_NOTHROW(check_witness(ref.witness, {0, 0}, parts, f));
}

TEST_CASE("eqc as a refinement with the r4s strategy") {
  auto f = s4();
  std::vector<Cylinder> parts{{0, 2}, {1, 2}, {1, 2}, {2, 2}};
  auto ref = refine_partition(f, {1, 0}, parts, {StrategyKind::R4Square});
  CHECK(ref.used == StrategyKind::R4Square);
  check_sound(f, {1, 0}, values(f, parts), ref.partition, ref.grouping, ref.witness);
}

TEST_CASE("common factors are divided out") {
  auto f = r4();
  std::vector<Cylinder> parts{{4, 2}, {3, 3}};
  auto ref = refine_partition(f, {3, 2}, parts, {StrategyKind::Selmer});
  CHECK(ref.scale == Cylinder{3, 2});
  check_sound(f, {3, 2}, values(f, parts), ref.partition, ref.grouping, ref.witness);
}

TEST_CASE("refinement errors") {
  auto f = r4();
  CHECK_THROWS_WITH_AS(refine_partition(f, {0, 0}, {{1, 0}}), doctest::Contains("SumMismatch"), Error);
  CHECK_THROWS_WITH_AS(refine_partition(f, {0, 0}, {{1, 0}, {0, 1}}, {StrategyKind::R4Square}),
                       doctest::Contains("StrategyInapplicable"), Error);
  auto g = s4();
  CHECK_THROWS_WITH_AS(refine_partition(g, {0, 0}, {{1, 0}, {0, 1}}, {StrategyKind::Selmer}),
                       doctest::Contains("StrategyInapplicable"), Error);
  CHECK_THROWS_AS(parse_strategy("magic"), Error);
  // The cube identity needs depth 5 or so; depth 1 is not enough.
  std::vector<Cylinder> cube{{3, 0}, {0, 3}, {1, 1}, {1, 1}, {1, 1}};
  CHECK_THROWS_WITH_AS(generic_search(f, {0, 0}, cube, {1, 1000}), doctest::Contains("NotFoundWithinBounds"), Error);
  CHECK_THROWS_WITH_AS(generic_search(f, {0, 0}, cube, {8, 3}), doctest::Contains("FuelExhausted"), Error);
}

TEST_CASE("generic search finds shallow refinements") {
  auto f = r4();
  std::vector<Cylinder> parts{{3, 0}, {0, 3}, {1, 1}, {1, 1}, {1, 1}};
  auto ref = generic_search(f, {0, 0}, parts);
  CHECK(ref.used == StrategyKind::GenericSearch);
  check_sound(f, {0, 0}, values(f, parts), ref.partition, ref.grouping, ref.witness);
  auto byval = generic_search_values(f, {0, 0}, values(f, parts));
  check_sound(f, {0, 0}, values(f, parts), byval.partition, byval.grouping, byval.witness);
  CHECK_THROWS_WITH_AS(generic_search_values(f, {0, 0}, {f.constant(Rational(1, 2)), f.constant(Rational(1, 2))}),
                       doctest::Contains("StrategyInapplicable"), Error);
}

TEST_CASE("tree_from_witness realizes random witnesses") {
  std::mt19937_64 rng(17);
  auto trees = oracle::all_trees(4);
  for (int trial = 0; trial < 300; ++trial) {
    const auto& leaves = trees[rng() % trees.size()];
    const std::size_t m = 1 + rng() % 3;
    TreePartition t{Address(), {}};
    std::vector<std::size_t> g;
    for (const auto& l : leaves) {
      t.leaves.emplace_back(l);
      g.push_back(rng() % m);
    }
    // Every part must own something.
    for (std::size_t j = 0; j < m && j < g.size(); ++j) g[j] = j;
    const std::size_t parts = std::min<std::size_t>(m, g.size());
    auto u = uniformize(t);
    RefinementWitness w{u.n, std::vector<std::vector<Integer>>(u.n + 1, std::vector<Integer>(parts, 0))};
    for (std::size_t k = 0; k < g.size(); ++k)
      for (unsigned i = 0; i <= u.n; ++i) w.p[i][g[k]] += u.per_leaf[k][i];
    Address root("10");
    auto [tree, grouping] = tree_from_witness(root, w);
    REQUIRE(tree_partition_violation(tree).empty());
    CHECK(tree.root == root);
    RefinementWitness back{w.n, std::vector<std::vector<Integer>>(w.n + 1, std::vector<Integer>(parts, 0))};
    for (std::size_t k = 0; k < tree.leaves.size(); ++k) {
      Cylinder rel = tree.leaves[k].relative_to(root).size();
      REQUIRE(rel.length() <= w.n);
      for (unsigned i = 0; i <= w.n - rel.length(); ++i) back.p[rel.a + i][grouping[k]] += binomial(w.n - rel.length(), i);
    }
    CHECK(back == w);
  }
}

TEST_CASE("tree_from_witness rejects impossible rows") {
  RefinementWitness w{2, {{Integer(1), Integer(0)}, {Integer(1), Integer(0)}, {Integer(0), Integer(1)}}};
  CHECK_THROWS_WITH_AS(tree_from_witness(Address(), w), doctest::Contains("RowSumMismatch"), Error);
}

TEST_CASE("balanced witnesses split a cylinder by measure") {
  auto f = r4();
  auto r = f.generator(), one = f.one();
  auto u = one - r;
  for (const Cylinder c : {Cylinder{0, 0}, Cylinder{2, 1}}) {
    auto whole = f.eval_cylinder(c.a, c.b);
    std::vector<FieldElement> cells{whole * r * r * r, whole * r * u * u};
    cells.push_back(whole - cells[0] - cells[1]);
    auto w = balanced_witness(f, c, cells);
    REQUIRE(w);
    for (unsigned i = 0; i <= w->n; ++i) {
      Integer row = 0;
      for (const auto& x : w->p[i]) {
        CHECK(x >= 0);
        row += x;
      }
      CHECK(row == binomial(w->n, i));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      FieldElement col = f.zero();
      for (unsigned i = 0; i <= w->n; ++i) col += f.eval_cylinder(c.a + i, c.b + w->n - i) * Rational(w->p[i][j]);
      CHECK(col == cells[j]);
    }
  }
  // Not integral: 1/2 is no combination of cylinders with integer counts.
  CHECK(!balanced_witness(f, {0, 0}, {f.constant(Rational(1, 2)), f.constant(Rational(1, 2))}));
  // r = sqrt(3) - 1 is not a unit.
  auto g = AlgebraicField::make(MinimalPolynomial::parse("x^2+2x-2"), 0, 1);
  CHECK(!balanced_witness(g, {0, 0}, {g.generator(), g.one() - g.generator()}));
}

TEST_CASE("refine_to_measures deals cells when the search gives up") {
  auto f = r4();
  auto r = f.generator(), one = f.one();
  auto u = one - r;
  std::vector<FieldElement> cells{power(r, 3) * u, r * u * u + power(r, 5), power(r, 2) * power(u, 3)};
  cells.push_back(one - cells[0] - cells[1] - cells[2]);
  REQUIRE(cells.back().sign() > 0);
  for (SearchBounds b : {SearchBounds{8, 1'000'000}, SearchBounds{1, 50}}) {
    auto ref = refine_to_measures(f, {0, 0}, cells, b);
    check_sound(f, {0, 0}, cells, ref.partition, ref.grouping, ref.witness);
  }
  CHECK_THROWS_WITH_AS(refine_to_measures(f, {0, 0}, {r, r}), doctest::Contains("SumMismatch"), Error);
}

TEST_CASE("explicit tree enumeration matches the oracle") {
  for (unsigned d = 0; d <= 4; ++d) {
    std::set<std::vector<std::string>> lib;
    for_each_tree_partition(d, [&](const std::vector<std::string>& leaves) {
      auto sorted = leaves;
      std::sort(sorted.begin(), sorted.end());
      lib.insert(sorted);
    });
    auto want = oracle::all_trees(d);
    CHECK(lib == std::set<std::vector<std::string>>(want.begin(), want.end()));
    CHECK(lib.size() == want.size());
  }
  CHECK_THROWS_WITH_AS(for_each_tree_partition(6, [](const auto&) {}), doctest::Contains("DepthTooLarge"), Error);
}

TEST_CASE("all-ones leaf histogram") {
  auto h = all_ones_leaf_histogram(4);
  for (unsigned d = 0; d <= 4; ++d) {
    std::map<unsigned, Integer> want;
    for (const auto& leaves : oracle::all_trees(d)) {
      unsigned ones = 0;
      for (const auto& l : leaves) ones += l.find('0') == std::string::npos;
      want[ones] += 1;
    }
    CHECK(h[d] == want);
  }
}

TEST_CASE("rational obstruction") {
  auto third = check_rational_obstruction(Rational(1, 3), CylinderMultiset{{{1, 0}, 3}}, 10);
  CHECK(!third.refinable);
  CHECK(third.depth == 10);
  // r = 1/2: the three parts 1/2, 1/4, 1/4 are refinable at depth 2.
  auto half = check_rational_obstruction(Rational(1, 2), CylinderMultiset{{{1, 0}, 1}, {{2, 0}, 1}, {{1, 1}, 1}}, 5);
  CHECK(half.refinable);
  REQUIRE(half.partition);
  CHECK(tree_partition_violation(*half.partition).empty());
  // r = 1/3 split as 1/3 + 2/3 is a tree split.
  auto split = check_rational_obstruction(Rational(1, 3), CylinderMultiset{{{1, 0}, 1}, {{0, 1}, 1}}, 3);
  CHECK(split.refinable);
  CHECK(split.depth == 1);
  CHECK_THROWS_WITH_AS(check_rational_obstruction(Rational(1, 3), CylinderMultiset{{{1, 0}, 3}}, 31),
                       doctest::Contains("DepthTooLarge"), Error);
  CHECK_THROWS_WITH_AS(check_rational_obstruction(Rational(1, 3), CylinderMultiset{{{1, 0}, 2}}, 3),
                       doctest::Contains("SumMismatch"), Error);
}
