#include "cantor/binomial.hpp"

#include <cmath>

#include "cantor/cylinder.hpp"
#include "cantor/error.hpp"

namespace cantor {

void check_rep(const BinomialRep& rep) {
  if (rep.a.size() != rep.n + 1)
    throw Error(ErrorCode::InvalidArgument, "representation of order " + std::to_string(rep.n) + " needs " +
                                                std::to_string(rep.n + 1) + " coefficients");
  for (unsigned i = 0; i <= rep.n; ++i)
    if (rep.a[i] < 0 || rep.a[i] > binomial(rep.n, i))
      throw Error(ErrorCode::CoefficientOutOfRange, "a_" + std::to_string(i) + " = " + rep.a[i].get_str() +
                                                        " is outside [0, C(" + std::to_string(rep.n) + "," +
                                                        std::to_string(i) + ")]");
}

FieldElement rep_value(const BinomialRep& rep, const AlgebraicField& field) {
  FieldElement acc = field.zero();
  for (unsigned i = 0; i <= rep.n; ++i)
    if (rep.a[i] != 0) acc += field.eval_cylinder(i, rep.n - i) * Rational(rep.a[i]);
  return acc;
}

bool verify_rep(const BinomialRep& rep, const FieldElement& target) {
  check_rep(rep);
  return rep_value(rep, target.field()) == target;
}

BinomialRep complement_rep(const BinomialRep& rep) {
  check_rep(rep);
  BinomialRep out{rep.n, rep.a};
  for (unsigned i = 0; i <= rep.n; ++i) out.a[i] = binomial(rep.n, i) - rep.a[i];
  return out;
}

BinomialRep product_rep(const BinomialRep& x, const BinomialRep& y) {
  check_rep(x);
  check_rep(y);
  BinomialRep out{x.n + y.n, std::vector<Integer>(x.n + y.n + 1, 0)};
  for (unsigned i = 0; i <= x.n; ++i)
    for (unsigned j = 0; j <= y.n; ++j) out.a[i + j] += x.a[i] * y.a[j];
  return out;
}

BinomialRep identity_rep() { return {1, {0, 1}}; }

bool is_identity_rep(const BinomialRep& rep) { return rep == identity_rep(); }

BinomialRep cylinder_rep(unsigned p, unsigned q, const BinomialRep& rep) {
  BinomialRep out{0, {1}};
  if (p + q == 0) return out;
  BinomialRep comp = complement_rep(rep);
  for (unsigned k = 0; k < p; ++k) out = product_rep(out, rep);
  for (unsigned k = 0; k < q; ++k) out = product_rep(out, comp);
  return out;
}

namespace {

struct RepSearch {
  unsigned n;
  std::vector<FieldElement> weights;
  std::vector<double> approx;
  std::vector<Integer> caps;
  std::vector<double> rest;  // max value of rows i..n
  double tol;
  std::uint64_t budget;
  std::uint64_t spent = 0;
  std::vector<Integer> a;

  bool dfs(unsigned i, double residual, const FieldElement& target) {
    if (++spent > budget) return false;
    if (i == n + 1) {
      if (std::abs(residual) > tol) return false;
      FieldElement acc = target.field().zero();
      for (unsigned k = 0; k <= n; ++k)
        if (a[k] != 0) acc += weights[k] * Rational(a[k]);
      return acc == target;
    }
    double lo_d = std::ceil((residual - rest[i + 1] - tol) / approx[i]);
    double hi_d = std::floor((residual + tol) / approx[i]);
    Integer lo = lo_d > 0 ? Integer(lo_d) : Integer(0);
    Integer hi = caps[i];
    if (hi_d < hi.get_d()) hi = Integer(std::max(hi_d, -1.0));
    for (Integer v = lo; v <= hi; ++v) {
      a[i] = v;
      if (dfs(i + 1, residual - v.get_d() * approx[i], target)) return true;
    }
    a[i] = 0;
    return false;
  }
};

}  // namespace

std::optional<BinomialRep> search_rep(const FieldElement& target, unsigned n_max, std::uint64_t node_budget) {
  const AlgebraicField& field = target.field();
  const double value = target.approx();
  std::uint64_t spent = 0;
  for (unsigned n = 0; n <= n_max; ++n) {
    RepSearch s;
    s.n = n;
    for (unsigned i = 0; i <= n; ++i) {
      s.weights.push_back(field.eval_cylinder(i, n - i));
      s.approx.push_back(s.weights.back().approx());
      s.caps.push_back(binomial(n, i));
    }
    s.rest.assign(n + 2, 0.0);
    for (unsigned i = n + 1; i-- > 0;) s.rest[i] = s.rest[i + 1] + s.caps[i].get_d() * s.approx[i];
    s.tol = 1e-10;
    s.budget = node_budget > spent ? node_budget - spent : 0;
    s.a.assign(n + 1, 0);
    bool found = s.dfs(0, value, target);
    spent += s.spent;
    if (found) return BinomialRep{n, s.a};
    if (spent >= node_budget) break;
  }
  return std::nullopt;
}

}  // namespace cantor
