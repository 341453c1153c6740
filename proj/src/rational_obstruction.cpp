#include <algorithm>
#include <set>
#include <unordered_set>

#include "cantor/error.hpp"
#include "cantor/refiner.hpp"

namespace cantor {

namespace {

Integer ipow(const Integer& base, unsigned e) {
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

// Row-by-row distribution of the C(n,i) leaves with i ones among the parts.
// Residuals are integers (values scaled by q^n); after each row every
// residual must be divisible by the gcd of the weights still to come.
class RowSolver {
 public:
  RowSolver(unsigned n, const Integer& p, const Integer& u, std::vector<Integer> targets)
      : n_(n), m_(targets.size()), residual_(std::move(targets)) {
    for (unsigned i = 0; i <= n; ++i) {
      weight_.push_back(ipow(p, i) * ipow(u, n - i));
      cap_.push_back(binomial(n, i));
    }
    // Decide rows so that the weights left over share the largest factor.
    for (unsigned i = 0; i <= n; ++i) rows_.push_back(u > 1 ? n - i : i);
    gcd_after_.assign(n + 2, 0);
    rest_after_.assign(n + 2, 0);
    for (unsigned t = n + 1; t-- > 0;) {
      gcd_after_[t] = gcd_after_[t + 1];
      rest_after_[t] = rest_after_[t + 1];
      if (t + 1 <= n) {
        mpz_gcd(gcd_after_[t].get_mpz_t(), gcd_after_[t].get_mpz_t(), weight_[rows_[t + 1]].get_mpz_t());
        rest_after_[t] += cap_[rows_[t + 1]] * weight_[rows_[t + 1]];
      }
    }
    choice_.assign(n + 1, std::vector<Integer>(m_, 0));
  }

  bool solve() { return row(0); }
  const std::vector<std::vector<Integer>>& choice() const { return choice_; }

 private:
  bool row(unsigned t) {
    if (t == n_ + 1) {
      for (const auto& r : residual_)
        if (r != 0) return false;
      return true;
    }
    std::string key = std::to_string(t);
    std::vector<Integer> sorted = residual_;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& r : sorted) key += "," + r.get_str();
    if (failed_.count(key)) return false;
    if (distribute(t, 0, cap_[rows_[t]])) return true;
    failed_.insert(key);
    return false;
  }

  bool admissible(unsigned t, const Integer& after) const {
    if (after < 0 || after > rest_after_[t]) return false;
    const Integer& g = gcd_after_[t];
    if (g == 0) return after == 0;
    return after % g == 0;
  }

  bool distribute(unsigned t, std::size_t j, const Integer& left) {
    const unsigned i = rows_[t];
    const Integer& w = weight_[i];
    if (j + 1 == m_) {
      Integer after = residual_[j] - left * w;
      if (!admissible(t, after)) return false;
      choice_[i][j] = left;
      residual_[j] = after;
      if (row(t + 1)) return true;
      residual_[j] += left * w;
      return false;
    }
    Integer most = residual_[j] / w;
    if (most > left) most = left;
    // Step through the x with residual - x w divisible by the next modulus.
    const Integer& g = gcd_after_[t];
    Integer start = most, step = 1;
    if (g > 1) {
      Integer d, inv;
      mpz_gcd(d.get_mpz_t(), w.get_mpz_t(), g.get_mpz_t());
      if (residual_[j] % d != 0) return false;
      Integer mod = g / d;
      step = mod;
      if (mod > 1) {
        Integer wr = (w / d) % mod;
        mpz_invert(inv.get_mpz_t(), wr.get_mpz_t(), mod.get_mpz_t());
        Integer x0 = ((residual_[j] / d) % mod) * inv % mod;
        if (x0 < 0) x0 += mod;
        if (most < x0) return false;
        start = most - ((most - x0) % mod);
      }
    }
    for (Integer x = start; x >= 0; x -= step) {
      Integer after = residual_[j] - x * w;
      if (!admissible(t, after)) continue;
      choice_[i][j] = x;
      residual_[j] = after;
      if (distribute(t, j + 1, left - x)) return true;
      residual_[j] += x * w;
    }
    choice_[i][j] = 0;
    return false;
  }

  unsigned n_;
  std::size_t m_;
  std::vector<Integer> residual_;
  std::vector<Integer> weight_, cap_;
  std::vector<unsigned> rows_;
  std::vector<Integer> gcd_after_, rest_after_;
  std::vector<std::vector<Integer>> choice_;
  std::unordered_set<std::string> failed_;
};

}  // namespace

ObstructionResult check_rational_obstruction(const Rational& r, const CylinderMultiset& parts, unsigned depth) {
  if (depth > kMaxObstructionDepth)
    throw Error(ErrorCode::DepthTooLarge, "depth " + std::to_string(depth) + " exceeds the cap " + std::to_string(kMaxObstructionDepth));
  if (!(r > 0 && r < 1)) throw Error(ErrorCode::InvalidArgument, "r must lie in (0,1)");
  const Integer p = r.get_num(), q = r.get_den(), u = q - p;
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "partition has no parts");

  Rational total = 0;
  unsigned n_min = 0;
  for (const auto& [c, mult] : parts) {
    total += Rational(ipow(p, c.a) * ipow(u, c.b), ipow(q, c.length())) * Rational(mult);
    n_min = std::max(n_min, c.length());
  }
  if (total != 1) throw Error(ErrorCode::SumMismatch, "parts sum to " + total.get_str() + ", not 1");
  std::vector<Cylinder> list = parts.to_list();

  for (unsigned n = n_min; n <= depth; ++n) {
    std::vector<Integer> targets;
    for (const auto& c : list) targets.push_back(ipow(p, c.a) * ipow(u, c.b) * ipow(q, n - c.length()));
    RowSolver solver(n, p, u, targets);
    if (!solver.solve()) continue;
    ObstructionResult out;
    out.refinable = true;
    out.depth = n;
    RefinementWitness w{n, solver.choice()};
    if (n <= 20) {
      auto [tree, grouping] = tree_from_witness(Address(), w);
      coarsen(tree, grouping);
      validate_tree_partition(tree);
      out.partition = std::move(tree);
      out.grouping = std::move(grouping);
    }
    out.witness = std::move(w);
    return out;
  }
  ObstructionResult out;
  out.depth = depth;
  return out;
}

void for_each_tree_partition(unsigned max_depth, const std::function<void(const std::vector<std::string>&)>& visit) {
  if (max_depth > 5) throw Error(ErrorCode::DepthTooLarge, "explicit enumeration is capped at depth 5");
  std::vector<std::vector<std::string>> shallow{{""}};
  // shallow holds every tree of depth <= d while d < max_depth.
  for (unsigned d = 1; d < max_depth; ++d) {
    std::vector<std::vector<std::string>> next{{""}};
    for (const auto& one : shallow)
      for (const auto& zero : shallow) {
        std::vector<std::string> leaves;
        for (const auto& w : one) leaves.push_back('1' + w);
        for (const auto& w : zero) leaves.push_back('0' + w);
        next.push_back(std::move(leaves));
      }
    shallow = std::move(next);
  }
  visit({""});
  if (max_depth == 0) return;
  std::vector<std::string> leaves;
  for (const auto& one : shallow)
    for (const auto& zero : shallow) {
      leaves.clear();
      for (const auto& w : one) leaves.push_back('1' + w);
      for (const auto& w : zero) leaves.push_back('0' + w);
      visit(leaves);
    }
}

std::vector<std::map<unsigned, Integer>> all_ones_leaf_histogram(unsigned max_depth) {
  std::vector<std::map<unsigned, Integer>> h(max_depth + 1);
  Integer trees = 1;  // tree partitions of depth <= d - 1
  h[0][1] = 1;
  for (unsigned d = 1; d <= max_depth; ++d) {
    // A leaf has one all-ones leaf; otherwise the all-ones leaves are those
    // of the 1-subtree while the 0-subtree contributes none.
    h[d][1] += 1;
    for (const auto& [x, count] : h[d - 1]) h[d][x] += count * trees;
    trees = 1 + trees * trees;
  }
  return h;
}

}  // namespace cantor
