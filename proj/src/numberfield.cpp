#include "cantor/numberfield.hpp"

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cantor/error.hpp"

namespace cantor {

// ---------------------------------------------------------------------------
// MinimalPolynomial

MinimalPolynomial::MinimalPolynomial(std::vector<Integer> ascending) : coeffs_(std::move(ascending)) {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  if (coeffs_.size() < 2) throw Error(ErrorCode::InvalidArgument, "minimal polynomial must have degree >= 1");
  Integer content = 0;
  for (const auto& c : coeffs_) content = gcd(content, c);
  if (coeffs_.back() < 0) content = -content;
  for (auto& c : coeffs_) c /= content;
}

MinimalPolynomial MinimalPolynomial::from_rational(const RatPoly& p) {
  Integer den = 1;
  for (const auto& c : p) den = lcm(den, Integer(c.get_den()));
  std::vector<Integer> out;
  out.reserve(p.size());
  for (const auto& c : p) out.emplace_back(Integer(c.get_num() * (den / c.get_den())));
  return MinimalPolynomial(std::move(out));
}

MinimalPolynomial MinimalPolynomial::parse(std::string_view text) { return from_rational(poly::parse(text)); }

RatPoly MinimalPolynomial::as_rational() const {
  RatPoly out;
  out.reserve(coeffs_.size());
  for (const auto& c : coeffs_) out.emplace_back(c);
  return out;
}

std::string MinimalPolynomial::to_string(char var) const { return poly::to_string(as_rational(), var); }

std::optional<unsigned> MinimalPolynomial::selmer_exponent() const {
  const int n = degree();
  if (n < 2) return std::nullopt;
  for (int k = 0; k <= n; ++k) {
    const Integer want = k == 0 ? -1 : (k == 1 || k == n) ? 1 : 0;
    if (coeffs_[k] != want) return std::nullopt;
  }
  return static_cast<unsigned>(n);
}

// ---------------------------------------------------------------------------
// Irreducibility heuristic

namespace {

using ModPoly = std::vector<std::uint64_t>;

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1;
  b %= p;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

void mtrim(ModPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

ModPoly mmul(const ModPoly& x, const ModPoly& y, std::uint64_t p) {
  if (x.empty() || y.empty()) return {};
  ModPoly out(x.size() + y.size() - 1, 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] = (out[i + j] + x[i] * y[j]) % p;
  mtrim(out);
  return out;
}

std::pair<ModPoly, ModPoly> mdivmod(ModPoly r, const ModPoly& d, std::uint64_t p) {
  mtrim(r);
  if (r.size() < d.size()) return {{}, r};
  ModPoly q(r.size() - d.size() + 1, 0);
  const std::uint64_t inv = pow_mod(d.back(), p - 2, p);
  for (std::size_t k = r.size(); k-- >= d.size();) {
    if (r[k] == 0) continue;
    std::uint64_t c = r[k] * inv % p;
    std::size_t shift = k - (d.size() - 1);
    q[shift] = c;
    for (std::size_t j = 0; j < d.size(); ++j) r[shift + j] = (r[shift + j] + p - c * d[j] % p) % p;
  }
  mtrim(q);
  mtrim(r);
  return {q, r};
}

ModPoly mgcd(ModPoly a, ModPoly b, std::uint64_t p) {
  mtrim(a);
  mtrim(b);
  while (!b.empty()) {
    ModPoly r = mdivmod(a, b, p).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    std::uint64_t inv = pow_mod(a.back(), p - 2, p);
    for (auto& c : a) c = c * inv % p;
  }
  return a;
}

ModPoly mpowmod(ModPoly base, std::uint64_t e, const ModPoly& f, std::uint64_t p) {
  ModPoly result{1};
  base = mdivmod(base, f, p).second;
  while (e) {
    if (e & 1) result = mdivmod(mmul(result, base, p), f, p).second;
    base = mdivmod(mmul(base, base, p), f, p).second;
    e >>= 1;
  }
  return result;
}

/// Degrees of the irreducible factors of a square-free f over F_p.
std::vector<int> factor_degrees_mod(ModPoly f, std::uint64_t p) {
  std::vector<int> degrees;
  ModPoly h{0, 1};
  for (int i = 1; 2 * i <= static_cast<int>(f.size()) - 1; ++i) {
    h = mpowmod(h, p, f, p);
    ModPoly hx = h;
    if (hx.size() < 2) hx.resize(2, 0);
    hx[1] = (hx[1] + p - 1) % p;
    mtrim(hx);
    ModPoly g = mgcd(hx, f, p);
    int gd = static_cast<int>(g.size()) - 1;
    if (gd > 0) {
      for (int k = 0; k < gd / i; ++k) degrees.push_back(i);
      f = mdivmod(f, g, p).first;
      h = mdivmod(h, f, p).second;
    }
  }
  if (f.size() > 1) degrees.push_back(static_cast<int>(f.size()) - 1);
  return degrees;
}

std::vector<Integer> positive_divisors(Integer n) {
  n = abs(n);
  std::vector<Integer> out;
  for (Integer k = 1; k * k <= n; ++k) {
    if (n % k == 0) {
      out.push_back(k);
      if (k * k != n) out.push_back(n / k);
    }
  }
  return out;
}

bool has_rational_root(const MinimalPolynomial& m) {
  const auto& c = m.coefficients();
  if (c.front() == 0) return true;
  const RatPoly p = m.as_rational();
  for (const auto& num : positive_divisors(c.front()))
    for (const auto& den : positive_divisors(c.back())) {
      Rational q(num, den);
      q.canonicalize();
      if (poly::eval(p, q) == 0 || poly::eval(p, -q) == 0) return true;
    }
  return false;
}

constexpr int kIrreducibilityDegreeCap = 12;

Irreducibility classify(const MinimalPolynomial& m) {
  const int d = m.degree();
  if (d == 1) return Irreducibility::Irreducible;
  const auto& c = m.coefficients();
  if (abs(c.front()) > Integer("1000000000000") || abs(c.back()) > Integer("1000000000000"))
    return Irreducibility::Unverified;
  if (has_rational_root(m)) return Irreducibility::Reducible;
  if (d <= 3) return Irreducibility::Irreducible;
  if (d > kIrreducibilityDegreeCap) return Irreducibility::Unverified;

  // Factor degrees that are still possible over Z: a factor of degree k over
  // Z reduces to a product of mod-p factors whose degrees sum to k.
  std::set<int> possible;
  for (int k = 2; k <= d - 2; ++k) possible.insert(k);
  int primes_used = 0;
  for (std::uint64_t p = 3; p < 2000 && primes_used < 40 && !possible.empty(); p += 2) {
    bool prime = true;
    for (std::uint64_t q = 3; q * q <= p; q += 2)
      if (p % q == 0) prime = false;
    if (!prime) continue;
    ModPoly f;
    for (const auto& coef : c) f.push_back(mpz_fdiv_ui(coef.get_mpz_t(), p));
    if (f.back() == 0) continue;
    ModPoly df;
    for (std::size_t k = 1; k < f.size(); ++k) df.push_back(f[k] * k % p);
    mtrim(df);
    if (mgcd(f, df, p).size() != 1) continue;
    ++primes_used;
    std::vector<int> degrees = factor_degrees_mod(f, p);
    std::set<int> sums{0};
    for (int deg : degrees) {
      std::set<int> next = sums;
      for (int s : sums) next.insert(s + deg);
      sums = std::move(next);
    }
    std::set<int> kept;
    for (int k : possible)
      if (sums.count(k)) kept.insert(k);
    possible = std::move(kept);
  }
  return possible.empty() ? Irreducibility::Irreducible : Irreducibility::Unverified;
}

}  // namespace

// ---------------------------------------------------------------------------
// Field data

namespace detail {

struct FieldData {
  MinimalPolynomial minpoly;
  RatPoly monic;
  RatPoly isolating;  // square-free, nonzero at the interval ends, simple root inside
  Irreducibility irreducibility = Irreducibility::Unverified;
  int lo_sign = 0;

  mutable std::mutex mu;
  mutable Rational lo, hi;
  mutable std::optional<Rational> exact;
  mutable std::vector<std::vector<Rational>> r_pows;
  mutable std::vector<std::vector<Rational>> s_pows;
  mutable std::unordered_map<std::uint64_t, std::vector<Rational>> cylinders;

  explicit FieldData(MinimalPolynomial m) : minpoly(std::move(m)) {}

  int degree() const { return minpoly.degree(); }

  void reduce(std::vector<Rational>& v) const {
    const std::size_t d = static_cast<std::size_t>(degree());
    for (std::size_t k = v.size(); k-- > d;) {
      if (v[k] == 0) continue;
      Rational c = v[k];
      for (std::size_t j = 0; j < d; ++j) v[k - d + j] -= c * monic[j];
      v[k] = 0;
    }
    v.resize(d);
  }

  std::vector<Rational> multiply(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
    std::vector<Rational> out(x.size() + y.size() - 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < y.size(); ++j)
        if (y[j] != 0) out[i + j] += x[i] * y[j];
    }
    reduce(out);
    return out;
  }

  // Caller holds mu.
  void bisect_locked(const Rational& width) const {
    while (!exact && hi - lo >= width) {
      Rational mid = (lo + hi) / 2;
      int s = poly::sign_at(isolating, mid);
      if (s == 0) {
        exact = mid;
        lo = hi = mid;
        return;
      }
      if (s == lo_sign) lo = mid;
      else hi = mid;
    }
  }
};

}  // namespace detail

namespace {

RatPoly deflate(RatPoly p, const Rational& at) {
  const RatPoly linear{-at, Rational(1)};
  while (!p.empty() && poly::eval(p, at) == 0) p = poly::divmod(p, linear).first;
  return p;
}

Rational pow2_inverse(unsigned k) {
  Integer den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, k);
  return Rational(1, den);
}

}  // namespace

AlgebraicField AlgebraicField::make(const MinimalPolynomial& minpoly, const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw Error(ErrorCode::DegenerateInterval, "root interval must satisfy lo < hi");
  if (lo < 0 || hi > 1) throw Error(ErrorCode::DegenerateInterval, "root interval must lie within [0, 1]");

  const RatPoly p = minpoly.as_rational();
  const int count = poly::count_roots_open(p, lo, hi);
  if (count == 0)
    throw Error(ErrorCode::NoRootInInterval, minpoly.to_string() + " has no root in (" + to_string(lo) + ", " + to_string(hi) + ")");
  if (count > 1)
    throw Error(ErrorCode::MultipleRootsInInterval,
                minpoly.to_string() + " has " + std::to_string(count) + " roots in the interval");
  RatPoly g = poly::gcd(p, poly::derivative(p));
  if (poly::degree(g) > 0 && poly::count_roots_open(g, lo, hi) > 0)
    throw Error(ErrorCode::MultipleRootsInInterval, "the root inside the interval is repeated");

  auto data = std::make_shared<detail::FieldData>(minpoly);
  data->monic = poly::monic(p);
  data->isolating = deflate(deflate(poly::squarefree_part(p), lo), hi);
  data->irreducibility = classify(minpoly);
  data->lo = lo;
  data->hi = hi;
  if (minpoly.degree() == 1) {
    Rational root = -p[0] / p[1];
    data->exact = root;
    data->lo = data->hi = root;
  } else {
    data->lo_sign = poly::sign_at(data->isolating, lo);
    std::lock_guard lock(data->mu);
    data->bisect_locked(pow2_inverse(20));
  }
  return AlgebraicField(std::move(data));
}

int AlgebraicField::degree() const { return data_->degree(); }
const MinimalPolynomial& AlgebraicField::minpoly() const { return data_->minpoly; }
Irreducibility AlgebraicField::irreducibility() const { return data_->irreducibility; }

RootInterval AlgebraicField::root_interval() const {
  std::lock_guard lock(data_->mu);
  return {data_->lo, data_->hi};
}

RootInterval AlgebraicField::refine_root(const Rational& width) const {
  std::lock_guard lock(data_->mu);
  data_->bisect_locked(width);
  return {data_->lo, data_->hi};
}

std::optional<Rational> AlgebraicField::exact_root() const {
  std::lock_guard lock(data_->mu);
  return data_->exact;
}

double AlgebraicField::approx_root() const {
  RootInterval iv = refine_root(pow2_inverse(64));
  return Rational((iv.lo + iv.hi) / 2).get_d();
}

FieldElement AlgebraicField::zero() const { return constant(0); }
FieldElement AlgebraicField::one() const { return constant(1); }

FieldElement AlgebraicField::generator() const { return reduce(RatPoly{Rational(0), Rational(1)}); }

FieldElement AlgebraicField::constant(const Rational& c) const {
  std::vector<Rational> v(degree());
  v[0] = c;
  v[0].canonicalize();
  return FieldElement(*this, std::move(v));
}

FieldElement AlgebraicField::element(std::vector<Rational> coeffs) const {
  for (auto& c : coeffs) c.canonicalize();
  data_->reduce(coeffs);
  return FieldElement(*this, std::move(coeffs));
}

FieldElement AlgebraicField::reduce(const RatPoly& p) const {
  std::vector<Rational> v(p.begin(), p.end());
  if (v.size() < static_cast<std::size_t>(degree())) v.resize(degree());
  return element(std::move(v));
}

FieldElement AlgebraicField::eval_cylinder(unsigned a, unsigned b) const {
  const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
  auto& d = *data_;
  std::vector<Rational> ra, sb;
  {
    std::lock_guard lock(d.mu);
    if (auto it = d.cylinders.find(key); it != d.cylinders.end()) return FieldElement(*this, it->second);
    if (d.r_pows.empty()) {
      std::vector<Rational> one(degree());
      one[0] = 1;
      d.r_pows.push_back(one);
      d.s_pows.push_back(one);
    }
    std::vector<Rational> r(2), s(2);
    r[1] = 1;
    s[0] = 1;
    s[1] = -1;
    while (d.r_pows.size() <= a) d.r_pows.push_back(d.multiply(d.r_pows.back(), r));
    while (d.s_pows.size() <= b) d.s_pows.push_back(d.multiply(d.s_pows.back(), s));
    ra = d.r_pows[a];
    sb = d.s_pows[b];
  }
  std::vector<Rational> value = d.multiply(ra, sb);
  std::lock_guard lock(d.mu);
  d.cylinders.emplace(key, value);
  return FieldElement(*this, std::move(value));
}

bool AlgebraicField::same_as(const AlgebraicField& other) const {
  if (data_ == other.data_) return true;
  if (!(minpoly() == other.minpoly())) return false;
  RootInterval a = root_interval(), b = other.root_interval();
  auto ea = exact_root(), eb = other.exact_root();
  if (ea && eb) return *ea == *eb;
  if (ea || eb) return false;
  Rational lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
  if (!(lo < hi)) return false;
  return poly::count_roots_open(data_->isolating, lo, hi) == 1;
}

std::string AlgebraicField::describe() const {
  RootInterval iv = root_interval();
  std::ostringstream out;
  out << minpoly().to_string() << " with root in [" << to_string(iv.lo) << ", " << to_string(iv.hi) << "]";
  return out.str();
}

// ---------------------------------------------------------------------------
// FieldElement

FieldElement::FieldElement(AlgebraicField field, std::vector<Rational> coeffs)
    : field_(std::move(field)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<std::size_t>(field_.degree()))
    throw Error(ErrorCode::InvalidArgument, "element has the wrong number of coefficients");
}

RatPoly FieldElement::as_poly() const {
  RatPoly p(coeffs_.begin(), coeffs_.end());
  poly::trim(p);
  return p;
}

bool FieldElement::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c == 0; });
}

void FieldElement::check_same_field(const FieldElement& y) const {
  if (field_.data_ != y.field_.data_ && !field_.same_as(y.field_))
    throw Error(ErrorCode::FieldMismatch, "operands belong to different fields");
}

FieldElement FieldElement::operator-() const {
  FieldElement out(*this);
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

FieldElement& FieldElement::operator+=(const FieldElement& y) {
  check_same_field(y);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += y.coeffs_[i];
  return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& y) {
  check_same_field(y);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= y.coeffs_[i];
  return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& y) {
  check_same_field(y);
  coeffs_ = field_.data_->multiply(coeffs_, y.coeffs_);
  return *this;
}

FieldElement& FieldElement::operator*=(const Rational& c) {
  for (auto& v : coeffs_) v *= c;
  return *this;
}

FieldElement operator*(const FieldElement& x, const FieldElement& y) {
  FieldElement out(x);
  out *= y;
  return out;
}

bool FieldElement::operator==(const FieldElement& y) const {
  check_same_field(y);
  return coeffs_ == y.coeffs_;
}

bool FieldElement::coeff_less(const FieldElement& x, const FieldElement& y) {
  return std::lexicographical_compare(x.coeffs_.begin(), x.coeffs_.end(), y.coeffs_.begin(), y.coeffs_.end());
}

std::string FieldElement::to_string() const { return poly::to_string(as_poly(), 'r'); }

namespace {

struct Bounds {
  Rational lo, hi;
};

// Value range of sum c_i x^i over x in [lo, hi] with 0 <= lo.
Bounds enclose(const std::vector<Rational>& c, const Rational& lo, const Rational& hi) {
  Rational pos_lo = 0, pos_hi = 0, neg_lo = 0, neg_hi = 0;
  Rational plo = 1, phi = 1;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] > 0) {
      pos_lo += c[i] * plo;
      pos_hi += c[i] * phi;
    } else if (c[i] < 0) {
      neg_lo -= c[i] * plo;
      neg_hi -= c[i] * phi;
    }
    plo *= lo;
    phi *= hi;
  }
  return {pos_lo - neg_hi, pos_hi - neg_lo};
}

void check_not_zero_divisor(const FieldElement& x) {
  const AlgebraicField& f = x.field();
  RatPoly g = poly::gcd(x.as_poly(), f.minpoly().as_rational());
  if (poly::degree(g) <= 0) return;
  RootInterval iv = f.root_interval();
  bool vanishes = iv.lo == iv.hi ? poly::eval(g, iv.lo) == 0 : poly::count_roots_open(g, iv.lo, iv.hi) > 0;
  if (vanishes)
    throw Error(ErrorCode::ReducibleMinpoly,
                "nonzero representative vanishes at the root; the minimal polynomial is reducible");
}

}  // namespace

SignInterval sign_and_interval(const FieldElement& x, const Rational& eps) {
  if (x.is_zero()) return {0, Rational(0), Rational(0)};
  const AlgebraicField& f = x.field();
  if (auto root = f.exact_root()) {
    Rational v = poly::eval(x.as_poly(), *root);
    if (v == 0) check_not_zero_divisor(x);
    return {sgn(v), v, v};
  }
  RootInterval iv = f.root_interval();
  Rational width = iv.hi - iv.lo;
  bool zero_checked = false;
  for (;;) {
    if (auto root = f.exact_root()) return sign_and_interval(x, eps);
    Bounds b = enclose(x.coeffs(), iv.lo, iv.hi);
    int s = b.lo > 0 ? 1 : (b.hi < 0 ? -1 : 0);
    if (s != 0 && b.hi - b.lo < eps) return {s, b.lo, b.hi};
    if (!zero_checked && width < pow2_inverse(256)) {
      check_not_zero_divisor(x);
      zero_checked = true;
    }
    width /= 256;
    iv = f.refine_root(width);
  }
}

int FieldElement::sign() const {
  if (is_zero()) return 0;
  return sign_and_interval(*this, Rational(2)).sign;
}

double FieldElement::approx() const {
  SignInterval si = sign_and_interval(*this, pow2_inverse(60));
  return Rational((si.lo + si.hi) / 2).get_d();
}

FieldElement power(const FieldElement& x, unsigned exponent) {
  FieldElement result = x.field().one();
  FieldElement base = x;
  while (exponent) {
    if (exponent & 1) result *= base;
    exponent >>= 1;
    if (exponent) base *= base;
  }
  return result;
}

FieldElement arith(ArithOp op, const FieldElement& x, const FieldElement& y, unsigned exponent) {
  switch (op) {
    case ArithOp::Add: return x + y;
    case ArithOp::Sub: return x - y;
    case ArithOp::Mul: return x * y;
    case ArithOp::Power: return power(x, exponent);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown arithmetic operation");
}

// ---------------------------------------------------------------------------
// Linear algebra over Q

namespace {

using Matrix = std::vector<std::vector<Rational>>;

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> row_reduce(Matrix& m, std::size_t ncols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < m.size(); ++col) {
    std::size_t pick = row;
    while (pick < m.size() && m[pick][col] == 0) ++pick;
    if (pick == m.size()) continue;
    std::swap(m[row], m[pick]);
    Rational inv = 1 / Rational(m[row][col]);
    for (auto& v : m[row]) v *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      Rational factor = m[r][col];
      for (std::size_t c = 0; c < m[r].size(); ++c) m[r][c] -= factor * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

int rank(const std::vector<FieldElement>& elements) {
  if (elements.empty()) return 0;
  Matrix m;
  for (const auto& e : elements) m.push_back(e.coeffs());
  return static_cast<int>(row_reduce(m, elements.front().coeffs().size()).size());
}

std::optional<std::vector<Rational>> solve_linear(const std::vector<FieldElement>& basis, const FieldElement& target) {
  const std::size_t d = target.coeffs().size();
  const std::size_t k = basis.size();
  Matrix m(d, std::vector<Rational>(k + 1));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < d; ++i) m[i][j] = basis[j].coeffs()[i];
  for (std::size_t i = 0; i < d; ++i) m[i][k] = target.coeffs()[i];
  auto pivots = row_reduce(m, k + 1);
  if (!pivots.empty() && pivots.back() == k) return std::nullopt;
  std::vector<Rational> out(k);
  for (std::size_t r = 0; r < pivots.size(); ++r) out[pivots[r]] = m[r][k];
  return out;
}

RatPoly element_minimal_polynomial(const FieldElement& x) {
  std::vector<FieldElement> powers{x.field().one()};
  for (;;) {
    FieldElement next = powers.back() * x;
    if (auto c = solve_linear(powers, next)) {
      RatPoly out(powers.size() + 1);
      for (std::size_t i = 0; i < powers.size(); ++i) out[i] = -(*c)[i];
      out.back() = 1;
      return out;
    }
    powers.push_back(std::move(next));
  }
}

FieldEmbedding::FieldEmbedding(AlgebraicField source, FieldElement image_of_generator)
    : source_(std::move(source)), image_(std::move(image_of_generator)) {
  FieldElement p = image_.field().one();
  for (int i = 0; i < source_.degree(); ++i) {
    image_powers_.push_back(p);
    p *= image_;
  }
  // The defining polynomial must vanish on the image.
  FieldElement check = image_.field().zero();
  const auto m = source_.minpoly().as_rational();
  FieldElement q = image_.field().one();
  for (const auto& c : m) {
    check += q * c;
    q *= image_;
  }
  if (!check.is_zero()) throw Error(ErrorCode::FieldMismatch, "embedding image does not satisfy the source minimal polynomial");
}

FieldElement FieldEmbedding::operator()(const FieldElement& x) const {
  if (!x.field().same_as(source_)) throw Error(ErrorCode::FieldMismatch, "element is not in the embedding source");
  FieldElement out = target().zero();
  for (std::size_t i = 0; i < image_powers_.size(); ++i)
    if (x.coeffs()[i] != 0) out += image_powers_[i] * x.coeffs()[i];
  return out;
}

std::optional<FieldElement> FieldEmbedding::preimage(const FieldElement& y) const {
  auto c = solve_linear(image_powers_, y);
  if (!c) return std::nullopt;
  return source_.element(std::move(*c));
}

FieldEmbedding derive_subfield(const FieldElement& x) {
  const AlgebraicField& f = x.field();
  if (x.sign() <= 0 || (f.one() - x).sign() <= 0)
    throw Error(ErrorCode::InvalidArgument, "derived parameter must lie strictly inside (0, 1)");
  MinimalPolynomial mp = MinimalPolynomial::from_rational(element_minimal_polynomial(x));
  Rational eps = pow2_inverse(10);
  for (;;) {
    SignInterval si = sign_and_interval(x, eps);
    Rational lo = std::max(Rational(0), Rational(si.lo - eps));
    Rational hi = std::min(Rational(1), Rational(si.hi + eps));
    if (mp.degree() == 1 || poly::count_roots_open(mp.as_rational(), lo, hi) == 1) {
      if (mp.degree() == 1) {
        lo = 0;
        hi = 1;
      }
      return FieldEmbedding(AlgebraicField::make(mp, lo, hi), x);
    }
    eps /= 16;
  }
}

}  // namespace cantor
