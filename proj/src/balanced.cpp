#include <algorithm>
#include <cmath>

#include "cantor/error.hpp"
#include "cantor/refiner.hpp"

namespace cantor {

namespace {

bool integral(const std::vector<Rational>& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x.get_den() == 1; });
}

Integer round_nearest(const Rational& x) {
  Integer num = 2 * x.get_num() + x.get_den(), den = 2 * x.get_den(), out;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return out;
}

// Coefficients of x^i (1-x)^{deg-i} in the integer polynomial p.
std::vector<Integer> counts_of(const std::vector<Integer>& p, unsigned deg) {
  std::vector<Integer> out(deg + 1, 0);
  for (unsigned t = 0; t < p.size() && t <= deg; ++t) {
    if (p[t] == 0) continue;
    for (unsigned i = t; i <= deg; ++i) out[i] += p[t] * binomial(deg - t, i - t);
  }
  return out;
}

// Integer counts on rows 0..n whose polynomial equals `target` modulo the
// minimal polynomial and which stay close to lambda C(n, i). Empty when no
// nonnegative choice was found.
std::vector<Integer> cell_counts(const AlgebraicField& field, const FieldElement& target, unsigned n,
                                 const std::vector<Integer>& mc) {
  const unsigned d = field.degree();
  std::vector<unsigned> ends;
  for (unsigned p = 0; p < d; ++p) ends.push_back(p);
  for (unsigned p = n + 1 - d; p <= n; ++p) ends.push_back(p);

  // A real profile: lambda C(n, i) plus corrections on d-1 end rows, chosen
  // so the smallest row is as large as possible.
  std::vector<Rational> best;
  std::vector<unsigned> best_rows;
  double best_score = -1e300;
  std::vector<bool> mask(ends.size(), false);
  std::fill(mask.begin(), mask.begin() + (d - 1), true);
  do {
    std::vector<unsigned> rows;
    std::vector<FieldElement> basis{field.one()};
    for (std::size_t q = 0; q < ends.size(); ++q)
      if (mask[q]) {
        rows.push_back(ends[q]);
        basis.push_back(field.eval_cylinder(ends[q], n - ends[q]));
      }
    if (rank(basis) < static_cast<int>(d)) continue;
    auto sol = solve_linear(basis, target);
    if (!sol) continue;
    const double lambda = (*sol)[0].get_d();
    double score = lambda;
    for (std::size_t q = 0; q < rows.size(); ++q)
      score = std::min(score, lambda * binomial(n, rows[q]).get_d() + (*sol)[q + 1].get_d());
    if (score > best_score) {
      best_score = score;
      best = std::move(*sol);
      best_rows = std::move(rows);
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  if (best.empty() || best_score < -0.5) return {};

  std::vector<Rational> real(n + 1);
  for (unsigned i = 0; i <= n; ++i) real[i] = best[0] * Rational(binomial(n, i));
  for (std::size_t q = 0; q < best_rows.size(); ++q) real[best_rows[q]] += best[q + 1];

  // Any integer solution differs from another by multiples of the minimal
  // polynomial, i.e. shifted copies of mc. Start from the target itself and
  // solve for the real multipliers g.
  std::vector<Integer> poly;
  for (const auto& c : target.coeffs()) poly.push_back(c.get_num());
  const std::vector<Integer> base = counts_of(poly, n);
  const unsigned shifts = n + 1 - d;
  std::vector<Rational> g(shifts);
  for (unsigned j = 0; j < shifts; ++j) {
    Rational acc = real[j] - Rational(base[j]);
    for (unsigned t = 1; t <= d && t <= j; ++t) acc -= Rational(mc[t]) * g[j - t];
    g[j] = acc / Rational(mc[0]);
  }

  // Rounding every multiplier moves each row by at most half the weight of
  // mc, too much where the profile is thin. There the rows are fixed one at
  // a time from either end instead (mc starts and ends with a unit).
  auto build = [&](unsigned low, unsigned high) {
    std::vector<Integer> gi(shifts);
    for (unsigned j = low; j + high < shifts; ++j) gi[j] = round_nearest(g[j]);
    for (unsigned j = 0; j < low; ++j) {
      Integer acc = round_nearest(real[j]) - base[j];
      for (unsigned t = 1; t <= d && t <= j; ++t) acc -= mc[t] * gi[j - t];
      gi[j] = acc * mc[0];
    }
    for (unsigned u = 0; u < high; ++u) {
      const unsigned row = n - u, j = shifts - 1 - u;
      Integer acc = round_nearest(real[row]) - base[row];
      for (unsigned t = 0; t < d; ++t)
        if (row - t < shifts) acc -= mc[t] * gi[row - t];
      gi[j] = acc * mc[d];
    }
    std::vector<Integer> out = base;
    for (unsigned j = 0; j < shifts; ++j) {
      if (gi[j] == 0) continue;
      for (unsigned t = 0; t <= d; ++t) out[j + t] += mc[t] * gi[j];
    }
    return out;
  };
  std::vector<Integer> chosen;
  double chosen_dev = 1e300;
  const unsigned reach = std::min(shifts / 2, 16u);
  for (unsigned low = 0; low <= reach; ++low)
    for (unsigned high = 0; high <= reach; ++high) {
      auto out = build(low, high);
      double dev = 0;
      bool ok = true;
      for (unsigned i = 0; i <= n && ok; ++i) {
        if (out[i] < 0) ok = false;
        dev = std::max(dev, std::abs(out[i].get_d() - real[i].get_d()));
      }
      if (ok && dev < chosen_dev) {
        chosen_dev = dev;
        chosen = std::move(out);
      }
    }
  return chosen;
}

}  // namespace

std::optional<RefinementWitness> balanced_witness(const AlgebraicField& field, const Cylinder& c,
                                                  const std::vector<FieldElement>& measures, unsigned max_depth) {
  const auto& m = field.minpoly().coefficients();
  const unsigned d = static_cast<unsigned>(field.degree());
  const std::size_t k = measures.size();
  if (d < 2 || k < 2 || m.back() != 1) return std::nullopt;
  Integer at_one = 0;
  for (const auto& x : m) at_one += x;
  // r and 1-r must be units so every target stays integral.
  if (abs(m[0]) != 1 || abs(at_one) != 1) return std::nullopt;
  for (const auto& v : measures)
    if (!integral(v.coeffs()) || v.sign() <= 0) return std::nullopt;

  // The minimal polynomial on rows 0..d.
  const std::vector<Integer> mc = counts_of(m, d);

  std::size_t last = 0;
  for (std::size_t j = 1; j < k; ++j)
    if (measures[j].approx() > measures[last].approx()) last = j;
  // Each measure relative to c; integral since r and 1-r are units.
  const FieldElement whole = field.eval_cylinder(c.a, c.b);
  std::vector<FieldElement> basis;
  FieldElement x = whole;
  for (unsigned t = 0; t < d; ++t) {
    basis.push_back(x);
    x *= field.generator();
  }
  std::vector<std::optional<FieldElement>> targets(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (j == last) continue;
    auto w = solve_linear(basis, measures[j]);
    if (!w || !integral(*w)) return std::nullopt;
    targets[j] = field.element(std::move(*w));
  }

  for (unsigned depth = 2 * d; depth <= max_depth; ++depth) {
    std::vector<std::vector<Integer>> p(depth + 1, std::vector<Integer>(k, 0));
    bool ok = true;
    for (std::size_t j = 0; j < k && ok; ++j) {
      if (j == last) continue;
      auto col = cell_counts(field, *targets[j], depth, mc);
      if (col.empty()) ok = false;
      for (unsigned i = 0; i < col.size(); ++i) p[i][j] = col[i];
    }
    if (!ok) continue;
    for (unsigned i = 0; i <= depth && ok; ++i) {
      Integer left = binomial(depth, i);
      for (std::size_t j = 0; j < k; ++j)
        if (j != last) left -= p[i][j];
      if (left < 0) ok = false;
      p[i][last] = left;
    }
    if (!ok) continue;
    for (std::size_t j = 0; j < k; ++j) {
      FieldElement sum = field.zero();
      for (unsigned i = 0; i <= depth; ++i)
        if (p[i][j] != 0) sum += field.eval_cylinder(c.a + i, c.b + depth - i) * Rational(p[i][j]);
      if (sum != measures[j]) throw Error(ErrorCode::PartSumMismatch, "balanced split lost exactness");
    }
    return RefinementWitness{depth, std::move(p)};
  }
  return std::nullopt;
}

}  // namespace cantor
