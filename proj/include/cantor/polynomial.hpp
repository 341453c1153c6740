#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cantor {

using Integer = mpz_class;
using Rational = mpq_class;

/// Dense univariate polynomial over Q, coefficients in ascending degree.
/// The zero polynomial is the empty vector; trailing zeros are never kept.
using RatPoly = std::vector<Rational>;

namespace poly {

void trim(RatPoly& p);
int degree(const RatPoly& p);  // -1 for the zero polynomial
bool is_zero(const RatPoly& p);

RatPoly add(const RatPoly& x, const RatPoly& y);
RatPoly sub(const RatPoly& x, const RatPoly& y);
RatPoly mul(const RatPoly& x, const RatPoly& y);
RatPoly scale(const RatPoly& x, const Rational& c);
RatPoly derivative(const RatPoly& p);

/// Quotient and remainder; `divisor` must be nonzero.
std::pair<RatPoly, RatPoly> divmod(const RatPoly& dividend, const RatPoly& divisor);
RatPoly rem(const RatPoly& dividend, const RatPoly& divisor);

/// Monic greatest common divisor (zero if both inputs are zero).
RatPoly gcd(RatPoly x, RatPoly y);
RatPoly monic(const RatPoly& p);

Rational eval(const RatPoly& p, const Rational& x);
int sign_at(const RatPoly& p, const Rational& x);

/// Sturm chain of a square-free polynomial.
std::vector<RatPoly> sturm_chain(const RatPoly& squarefree);

/// Number of distinct real roots of `p` in the open interval (lo, hi).
int count_roots_open(RatPoly p, const Rational& lo, const Rational& hi);

/// `p / gcd(p, p')`.
RatPoly squarefree_part(const RatPoly& p);

std::string to_string(const RatPoly& p, char var = 'x');

/// Parses a sum of monomials such as "x^4+x-1", "2x - 1", "1/2*r^2 + 3".
/// Any single lowercase letter is accepted as the variable; mixing letters is
/// a parse error.
RatPoly parse(std::string_view text);

}  // namespace poly

/// "p/q", an integer, or a finite decimal such as "0.725".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

}  // namespace cantor
