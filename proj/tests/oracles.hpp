#pragma once

// Slow, independent reference implementations used to check the library.
// Nothing here calls into the cantor sources except for the plain data types.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Q = mpq_class;
using Z = mpz_class;
/// Ascending coefficients.
using Poly = std::vector<Q>;

inline void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Poly add(Poly x, const Poly& y) {
  if (x.size() < y.size()) x.resize(y.size(), 0);
  for (std::size_t i = 0; i < y.size(); ++i) x[i] += y[i];
  trim(x);
  return x;
}

inline Poly scale(Poly x, const Q& c) {
  for (auto& v : x) v *= c;
  trim(x);
  return x;
}

inline Poly mul(const Poly& x, const Poly& y) {
  if (x.empty() || y.empty()) return {};
  Poly out(x.size() + y.size() - 1, 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  trim(out);
  return out;
}

/// Remainder of x modulo m by schoolbook long division.
inline Poly mod(Poly x, const Poly& m) {
  trim(x);
  const std::size_t d = m.size() - 1;
  while (x.size() > d) {
    Q c = x.back() / m.back();
    const std::size_t shift = x.size() - 1 - d;
    for (std::size_t i = 0; i <= d; ++i) x[shift + i] -= c * m[i];
    trim(x);
  }
  return x;
}

inline Poly power(const Poly& x, unsigned e) {
  Poly out{1};
  for (unsigned i = 0; i < e; ++i) out = mul(out, x);
  return out;
}

/// x^a (1-x)^b, not reduced.
inline Poly cyl(unsigned a, unsigned b) { return mul(power({0, 1}, a), power({1, -1}, b)); }

/// Poly from integers.
inline Poly ints(std::initializer_list<long> c) {
  Poly p;
  for (long v : c) p.push_back(v);
  trim(p);
  return p;
}

/// Coefficient vector padded to length d, for comparison with FieldElement.
inline std::vector<Q> padded(Poly p, std::size_t d) {
  p.resize(std::max(p.size(), d), 0);
  p.resize(d);
  return p;
}

/// Substitutes y for the variable of p.
inline Poly compose(const Poly& p, const Poly& y) {
  Poly out;
  for (std::size_t i = p.size(); i-- > 0;) out = add(mul(out, y), Poly{p[i]});
  return out;
}

inline double eval(const Poly& p, double x) {
  double v = 0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i].get_d();
  return v;
}

inline Z choose(unsigned n, unsigned k) {
  Z out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

// ---------------------------------------------------------------------------
// Tree partitions as sets of bit strings.

/// Every tree partition of the root with depth <= d, by explicit recursion.
inline std::vector<std::vector<std::string>> all_trees(unsigned d) {
  std::vector<std::vector<std::string>> out{{""}};
  if (d == 0) return out;
  auto sub = all_trees(d - 1);
  for (const auto& one : sub)
    for (const auto& zero : sub) {
      std::vector<std::string> leaves;
      for (const auto& w : one) leaves.push_back("1" + w);
      for (const auto& w : zero) leaves.push_back("0" + w);
      std::sort(leaves.begin(), leaves.end());
      out.push_back(leaves);
    }
  return out;
}

/// Prefix-free with Kraft sum exactly 1.
inline bool is_tree_partition(std::vector<std::string> leaves) {
  if (leaves.empty()) return false;
  std::sort(leaves.begin(), leaves.end());
  Q kraft = 0;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (char c : leaves[i])
      if (c != '0' && c != '1') return false;
    if (i + 1 < leaves.size() && leaves[i + 1].compare(0, leaves[i].size(), leaves[i]) == 0) return false;
    Z den = 1;
    den <<= leaves[i].size();
    kraft += Q(1, den);
  }
  return kraft == 1;
}

inline std::pair<unsigned, unsigned> ones_zeros(const std::string& w) {
  unsigned a = static_cast<unsigned>(std::count(w.begin(), w.end(), '1'));
  return {a, static_cast<unsigned>(w.size()) - a};
}

// ---------------------------------------------------------------------------
// Random multisets and split sequences.

using Cyl = std::pair<unsigned, unsigned>;

/// Applies random splits from `moves` (each maps one cylinder to several) to
/// the list, never exceeding `max_items` items or exponent `max_exp`.
template <class Moves>
std::vector<Cyl> random_splits(std::vector<Cyl> items, std::mt19937_64& rng, unsigned steps, std::size_t max_items,
                               unsigned max_exp, const Moves& moves) {
  for (unsigned s = 0; s < steps; ++s) {
    std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
    const std::size_t i = pick(rng);
    auto options = moves(items[i]);
    if (options.empty()) continue;
    std::uniform_int_distribution<std::size_t> which(0, options.size() - 1);
    const auto& out = options[which(rng)];
    if (items.size() - 1 + out.size() > max_items) continue;
    bool ok = true;
    for (const auto& c : out) ok = ok && c.first <= max_exp && c.second <= max_exp;
    if (!ok) continue;
    items.erase(items.begin() + static_cast<long>(i));
    items.insert(items.end(), out.begin(), out.end());
  }
  return items;
}

}  // namespace oracle
