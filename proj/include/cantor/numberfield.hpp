#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cantor/polynomial.hpp"

namespace cantor {

/// Integer polynomial with coprime coefficients and positive leading
/// coefficient, defining the parameter r.
class MinimalPolynomial {
 public:
  /// Coefficients in ascending degree. Content is divided out and the sign
  /// fixed so the leading coefficient is positive.
  explicit MinimalPolynomial(std::vector<Integer> ascending);

  /// Clears denominators of a rational polynomial.
  static MinimalPolynomial from_rational(const RatPoly& p);
  static MinimalPolynomial parse(std::string_view text);

  const std::vector<Integer>& coefficients() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  RatPoly as_rational() const;
  std::string to_string(char var = 'x') const;

  /// n when the polynomial is x^n + x - 1 with n >= 2.
  std::optional<unsigned> selmer_exponent() const;

  bool operator==(const MinimalPolynomial&) const = default;

 private:
  std::vector<Integer> coeffs_;
};

enum class Irreducibility { Irreducible, Reducible, Unverified };

struct RootInterval {
  Rational lo;
  Rational hi;
};

class FieldElement;

namespace detail {
struct FieldData;
}

/// Q(r) for the unique root r of the minimal polynomial inside a rational
/// isolating interval contained in [0, 1]. Cheap to copy; copies share the
/// memoized root interval and power caches.
class AlgebraicField {
 public:
  /// Throws NoRootInInterval, MultipleRootsInInterval or DegenerateInterval.
  static AlgebraicField make(const MinimalPolynomial& minpoly, const Rational& lo, const Rational& hi);

  int degree() const;
  const MinimalPolynomial& minpoly() const;
  Irreducibility irreducibility() const;
  /// True when irreducibility could not be certified (the warning flag).
  bool irreducibility_unverified() const { return irreducibility() != Irreducibility::Irreducible; }
  std::optional<unsigned> selmer_exponent() const { return minpoly().selmer_exponent(); }

  /// Current memoized isolating interval (width < 2^-20 after construction).
  RootInterval root_interval() const;
  /// Refines the shared interval until its width is below `width`.
  RootInterval refine_root(const Rational& width) const;
  std::optional<Rational> exact_root() const;
  double approx_root() const;

  FieldElement zero() const;
  FieldElement one() const;
  FieldElement generator() const;
  FieldElement constant(const Rational& c) const;
  FieldElement element(std::vector<Rational> coeffs) const;
  /// Canonical representative of `p(r)`.
  FieldElement reduce(const RatPoly& p) const;
  /// r^a (1-r)^b.
  FieldElement eval_cylinder(unsigned a, unsigned b) const;

  /// Same minimal polynomial and same designated root.
  bool same_as(const AlgebraicField& other) const;
  bool operator==(const AlgebraicField& other) const { return same_as(other); }

  std::string describe() const;

 private:
  explicit AlgebraicField(std::shared_ptr<detail::FieldData> data) : data_(std::move(data)) {}
  friend class FieldElement;
  std::shared_ptr<detail::FieldData> data_;
};

/// c0 + c1 r + ... + c_{d-1} r^{d-1}; always reduced, so equality is
/// coefficient-wise.
class FieldElement {
 public:
  FieldElement(AlgebraicField field, std::vector<Rational> coeffs);

  const AlgebraicField& field() const { return field_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  RatPoly as_poly() const;

  bool is_zero() const;
  /// Exact sign of the real number.
  int sign() const;
  double approx() const;

  FieldElement operator-() const;
  FieldElement& operator+=(const FieldElement& y);
  FieldElement& operator-=(const FieldElement& y);
  FieldElement& operator*=(const FieldElement& y);
  FieldElement& operator*=(const Rational& c);
  friend FieldElement operator+(FieldElement x, const FieldElement& y) { return x += y; }
  friend FieldElement operator-(FieldElement x, const FieldElement& y) { return x -= y; }
  friend FieldElement operator*(const FieldElement& x, const FieldElement& y);
  friend FieldElement operator*(FieldElement x, const Rational& c) { return x *= c; }
  friend FieldElement operator*(const Rational& c, FieldElement x) { return x *= c; }

  bool operator==(const FieldElement& y) const;
  bool operator!=(const FieldElement& y) const { return !(*this == y); }

  /// Total order on coefficient vectors; not the order of the reals.
  static bool coeff_less(const FieldElement& x, const FieldElement& y);

  std::string to_string() const;

 private:
  void check_same_field(const FieldElement& y) const;
  AlgebraicField field_;
  std::vector<Rational> coeffs_;
};

enum class ArithOp { Add, Sub, Mul, Power };

/// `y` is ignored for Power; `exponent` is ignored otherwise.
FieldElement arith(ArithOp op, const FieldElement& x, const FieldElement& y, unsigned exponent = 0);
FieldElement power(const FieldElement& x, unsigned exponent);

struct SignInterval {
  int sign;
  Rational lo;
  Rational hi;
};

/// Exact sign plus an enclosing interval of width < eps. Zero is reported only
/// for the zero element.
SignInterval sign_and_interval(const FieldElement& x, const Rational& eps);

/// Rank over Q of the coefficient vectors.
int rank(const std::vector<FieldElement>& elements);

/// Rational coefficients c with sum c_i basis_i = target, if any.
std::optional<std::vector<Rational>> solve_linear(const std::vector<FieldElement>& basis,
                                                  const FieldElement& target);

/// Minimal polynomial over Q of an element (monic, rational).
RatPoly element_minimal_polynomial(const FieldElement& x);

/// Ring map Q(s) -> Q(r) sending the generator s to a fixed element of Q(r).
class FieldEmbedding {
 public:
  FieldEmbedding(AlgebraicField source, FieldElement image_of_generator);

  const AlgebraicField& source() const { return source_; }
  const AlgebraicField& target() const { return image_.field(); }
  const FieldElement& image_of_generator() const { return image_; }
  FieldElement operator()(const FieldElement& x) const;
  /// Preimage of a target element lying in the image, or nullopt.
  std::optional<FieldElement> preimage(const FieldElement& y) const;

 private:
  AlgebraicField source_;
  FieldElement image_;
  std::vector<FieldElement> image_powers_;
};

/// The field Q(x) for x in Q(r), with its root interval isolated from r's,
/// together with the embedding Q(x) -> Q(r). Throws InvalidArgument when x is
/// not inside (0, 1).
FieldEmbedding derive_subfield(const FieldElement& x);

}  // namespace cantor
