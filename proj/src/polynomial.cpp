#include "cantor/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "cantor/error.hpp"

namespace cantor {

namespace poly {

void trim(RatPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const RatPoly& p) { return static_cast<int>(p.size()) - 1; }

bool is_zero(const RatPoly& p) { return p.empty(); }

RatPoly add(const RatPoly& x, const RatPoly& y) {
  RatPoly out(std::max(x.size(), y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
  for (std::size_t i = 0; i < y.size(); ++i) out[i] += y[i];
  trim(out);
  return out;
}

RatPoly sub(const RatPoly& x, const RatPoly& y) {
  RatPoly out(std::max(x.size(), y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
  for (std::size_t i = 0; i < y.size(); ++i) out[i] -= y[i];
  trim(out);
  return out;
}

RatPoly mul(const RatPoly& x, const RatPoly& y) {
  if (x.empty() || y.empty()) return {};
  RatPoly out(x.size() + y.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  }
  trim(out);
  return out;
}

RatPoly scale(const RatPoly& x, const Rational& c) {
  if (c == 0) return {};
  RatPoly out(x);
  for (auto& v : out) v *= c;
  return out;
}

RatPoly derivative(const RatPoly& p) {
  if (p.size() <= 1) return {};
  RatPoly out(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = p[i] * static_cast<long>(i);
  trim(out);
  return out;
}

std::pair<RatPoly, RatPoly> divmod(const RatPoly& dividend, const RatPoly& divisor) {
  if (divisor.empty()) throw Error(ErrorCode::InvalidArgument, "polynomial division by zero");
  RatPoly r(dividend);
  trim(r);
  if (r.size() < divisor.size()) return {RatPoly{}, r};
  RatPoly q(r.size() - divisor.size() + 1);
  const Rational& lead = divisor.back();
  for (std::size_t k = r.size(); k-- >= divisor.size();) {
    if (r[k] == 0) continue;
    Rational c = r[k] / lead;
    std::size_t shift = k - (divisor.size() - 1);
    q[shift] = c;
    for (std::size_t j = 0; j < divisor.size(); ++j) r[shift + j] -= c * divisor[j];
  }
  trim(q);
  trim(r);
  return {q, r};
}

RatPoly rem(const RatPoly& dividend, const RatPoly& divisor) { return divmod(dividend, divisor).second; }

RatPoly monic(const RatPoly& p) {
  if (p.empty()) return p;
  return scale(p, 1 / Rational(p.back()));
}

RatPoly gcd(RatPoly x, RatPoly y) {
  trim(x);
  trim(y);
  while (!y.empty()) {
    RatPoly r = rem(x, y);
    x = std::move(y);
    y = std::move(r);
  }
  return monic(x);
}

Rational eval(const RatPoly& p, const Rational& x) {
  Rational acc = 0;
  for (std::size_t k = p.size(); k-- > 0;) acc = acc * x + p[k];
  return acc;
}

int sign_at(const RatPoly& p, const Rational& x) { return sgn(eval(p, x)); }

std::vector<RatPoly> sturm_chain(const RatPoly& squarefree) {
  std::vector<RatPoly> chain{squarefree, derivative(squarefree)};
  while (!chain.back().empty()) {
    RatPoly r = rem(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    chain.push_back(scale(r, -1));
  }
  return chain;
}

namespace {

int variations(const std::vector<RatPoly>& chain, const Rational& x) {
  int count = 0;
  int last = 0;
  for (const auto& p : chain) {
    int s = sign_at(p, x);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

RatPoly deflate_at(RatPoly p, const Rational& root) {
  const RatPoly linear{-root, Rational(1)};
  while (!p.empty() && eval(p, root) == 0) p = divmod(p, linear).first;
  return p;
}

}  // namespace

RatPoly squarefree_part(const RatPoly& p) {
  RatPoly g = gcd(p, derivative(p));
  if (degree(g) <= 0) return monic(p);
  return monic(divmod(p, g).first);
}

int count_roots_open(RatPoly p, const Rational& lo, const Rational& hi) {
  trim(p);
  if (p.empty()) throw Error(ErrorCode::InvalidArgument, "zero polynomial has no isolated roots");
  if (lo >= hi) return 0;
  p = squarefree_part(p);
  p = deflate_at(deflate_at(std::move(p), lo), hi);
  if (degree(p) <= 0) return 0;
  auto chain = sturm_chain(p);
  return variations(chain, lo) - variations(chain, hi);
}

std::string to_string(const RatPoly& p, char var) {
  if (p.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (std::size_t k = p.size(); k-- > 0;) {
    const Rational& c = p[k];
    if (c == 0) continue;
    Rational mag = abs(c);
    if (c < 0) out << "-";
    else if (!first) out << "+";
    bool unit = mag == 1;
    if (!unit || k == 0) {
      out << cantor::to_string(mag);
      if (k > 0) out << "*";
    }
    if (k >= 1) out << var;
    if (k >= 2) out << "^" << k;
    first = false;
  }
  return out.str();
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  RatPoly parse_sum() {
    RatPoly out;
    skip_ws();
    bool any = false;
    while (pos_ < text_.size()) {
      int sign = 1;
      skip_ws();
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
      } else if (any) {
        fail("expected '+' or '-'");
      }
      skip_ws();
      auto [coef, power] = parse_term();
      coef *= sign;
      if (out.size() <= power) out.resize(power + 1);
      out[power] += coef;
      any = true;
      skip_ws();
    }
    if (!any) fail("empty polynomial");
    trim(out);
    return out;
  }

 private:
  std::pair<Rational, std::size_t> parse_term() {
    Rational coef = 1;
    bool have_coef = false;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      coef = parse_number();
      have_coef = true;
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected variable after '*'");
      }
    }
    if (std::isalpha(static_cast<unsigned char>(peek()))) {
      char v = peek();
      if (var_ != 0 && v != var_) fail("mixed variable names");
      var_ = v;
      ++pos_;
      skip_ws();
      std::size_t power = 1;
      if (peek() == '^') {
        ++pos_;
        skip_ws();
        std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (start == pos_) fail("expected exponent");
        power = std::stoul(std::string(text_.substr(start, pos_ - start)));
      }
      return {coef, power};
    }
    if (!have_coef) fail("expected term");
    return {coef, 0};
  }

  Rational parse_number() {
    std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '/' || peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    return parse_rational(text_.substr(start, pos_ - start));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, what + " at offset " + std::to_string(pos_) + " in \"" +
                                           std::string(text_) + "\"");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  char var_ = 0;
};

}  // namespace

RatPoly parse(std::string_view text) { return Parser(text).parse_sum(); }

}  // namespace poly

Rational parse_rational(std::string_view raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  auto bad = [&] { return Error(ErrorCode::ParseError, "not a rational: \"" + std::string(raw) + "\""); };
  if (text.empty()) throw bad();
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    i = 1;
  }
  std::string body = text.substr(i);
  if (body.empty()) throw bad();
  auto all_digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  Rational out;
  if (auto slash = body.find('/'); slash != std::string::npos) {
    std::string num = body.substr(0, slash), den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw bad();
    Integer d(den, 10);
    if (d == 0) throw bad();
    out = Rational(Integer(num, 10), d);
    out.canonicalize();
  } else if (auto dot = body.find('.'); dot != std::string::npos) {
    std::string whole = body.substr(0, dot), frac = body.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || (!frac.empty() && !all_digits(frac))) throw bad();
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    out = Rational(Integer(whole + frac, 10), scale);
    out.canonicalize();
  } else {
    if (!all_digits(body)) throw bad();
    out = Rational(Integer(body, 10));
  }
  return negative ? Rational(-out) : out;
}

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace cantor
