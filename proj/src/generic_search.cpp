#include <algorithm>
#include <cmath>
#include <numeric>

#include "cantor/error.hpp"
#include "cantor/refiner.hpp"

namespace cantor {

namespace {

// Places the columns of a witness as whole subtrees. Each column but the
// largest is broken greedily into the biggest subtrees its counts allow;
// those go, biggest first, into the smallest free node that can hold them.
// Whatever stays free belongs to the largest column.
class TreeBuilder {
 public:
  TreeBuilder(unsigned n, std::size_t m) : n_(n), m_(m), pascal_(n + 1) {
    for (unsigned h = 0; h <= n; ++h)
      for (unsigned t = 0; t <= h; ++t) pascal_[h].push_back(binomial(h, t));
    free_.assign(n + 1, std::vector<std::vector<std::string>>(n + 1));
    free_[0][0].push_back("");
  }

  void build(const std::vector<std::vector<Integer>>& p, TreePartition& tree, std::vector<std::size_t>& grouping) {
    std::size_t big = 0;
    double best = -1;
    for (std::size_t j = 0; j < m_; ++j) {
      double share = 0;
      for (unsigned i = 0; i <= n_; ++i) share += p[i][j].get_d() / pascal_[n_][i].get_d();
      if (share > best) best = share, big = j;
    }
    // Demands (height, ones above, column), biggest subtrees first.
    std::vector<std::vector<std::pair<unsigned, std::size_t>>> demands(n_ + 1);
    for (std::size_t j = 0; j < m_; ++j) {
      if (j == big) continue;
      std::vector<Integer> left(n_ + 1);
      for (unsigned i = 0; i <= n_; ++i) left[i] = p[i][j];
      for (unsigned h = n_ + 1; h-- > 0;)
        for (unsigned o = 0; o + h <= n_; ++o) {
          Integer most = left[o];
          for (unsigned t = 1; t <= h && most > 0; ++t) {
            Integer q = left[o + t] / pascal_[h][t];
            if (q < most) most = q;
          }
          if (most <= 0) continue;
          for (unsigned t = 0; t <= h; ++t) left[o + t] -= most * pascal_[h][t];
          for (Integer k = 0; k < most; ++k) demands[h].push_back({o, j});
        }
    }
    for (unsigned h = n_ + 1; h-- > 0;) {
      for (std::size_t q = 0; q < demands[h].size(); ++q) {
        auto [o, j] = demands[h][q];
        if (auto at = take(n_ - h, o)) {
          tree.leaves.push_back(tree.root.concat(Address(*at)));
          grouping.push_back(j);
        } else if (h == 0) {
          throw Error(ErrorCode::RowSumMismatch, "witness row " + std::to_string(o) + " has too few leaves");
        } else {
          demands[h - 1].push_back({o + 1, j});
          demands[h - 1].push_back({o, j});
        }
      }
    }
    for (const auto& by_ones : free_)
      for (const auto& bucket : by_ones)
        for (const auto& bits : bucket) {
          tree.leaves.push_back(tree.root.concat(Address(bits)));
          grouping.push_back(big);
        }
  }

 private:
  // A free node at this depth with this many ones, carved out of the
  // deepest free node above it.
  std::optional<std::string> take(unsigned depth, unsigned ones) {
    for (unsigned d = depth + 1; d-- > 0;) {
      const unsigned need_zeros = depth - ones;
      for (unsigned o = std::min(ones, d) + 1; o-- > 0;) {
        if (d - o > need_zeros || free_[d][o].empty()) continue;
        std::string bits = std::move(free_[d][o].back());
        free_[d][o].pop_back();
        unsigned cur_o = o, cur_d = d;
        while (cur_o < ones) {
          free_[cur_d + 1][cur_o].push_back(bits + '0');
          bits += '1';
          ++cur_o, ++cur_d;
        }
        while (cur_d < depth) {
          free_[cur_d + 1][cur_o + 1].push_back(bits + '1');
          bits += '0';
          ++cur_d;
        }
        return bits;
      }
    }
    return std::nullopt;
  }

  unsigned n_;
  std::size_t m_;
  std::vector<std::vector<Integer>> pascal_;
  std::vector<std::vector<std::vector<std::string>>> free_;  // by depth, then ones
};

struct ColumnSearch {
  unsigned n = 0;
  std::vector<FieldElement> weights;
  std::vector<double> approx;
  // Rational coordinates of the weights, as doubles, for interval pruning
  // on every coordinate of the residual (not only on its real value).
  std::vector<std::vector<double>> coords;
  std::vector<Integer> caps;
  double tol = 0;
  std::vector<double> coord_tol;
  std::uint64_t fuel = 0;
  std::uint64_t spent = 0;

  // Suffix bounds recomputed per column since caps shrink.
  std::vector<double> rest;
  std::vector<std::vector<double>> rest_lo, rest_hi;

  void burn() {
    if (++spent > fuel) throw Error(ErrorCode::FuelExhausted, "generic search exceeded its fuel budget");
  }

  void prepare(const FieldElement& sample) {
    const std::size_t d = sample.coeffs().size();
    coords.clear();
    for (const auto& w : weights) {
      std::vector<double> c(d);
      for (std::size_t k = 0; k < d; ++k) c[k] = w.coeffs()[k].get_d();
      coords.push_back(std::move(c));
    }
    coord_tol.assign(d, 0);
    for (unsigned i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < d; ++k) coord_tol[k] += caps[i].get_d() * std::abs(coords[i][k]);
    for (auto& t : coord_tol) t = 1e-9 * (1 + t);
  }

  // Columns bounded by caps (and lexicographically by `upper`) with value
  // `target`; larger entries first. `visit` returns true to stop.
  template <class Visit>
  bool columns(const FieldElement& target, double value, const std::vector<Integer>* upper, Visit&& visit) {
    const std::size_t d = coords.empty() ? 0 : coords[0].size();
    rest.assign(n + 2, 0);
    rest_lo.assign(n + 2, std::vector<double>(d, 0));
    rest_hi.assign(n + 2, std::vector<double>(d, 0));
    for (unsigned i = n + 1; i-- > 0;) {
      rest[i] = rest[i + 1] + caps[i].get_d() * approx[i];
      for (std::size_t k = 0; k < d; ++k) {
        double v = caps[i].get_d() * coords[i][k];
        rest_lo[i][k] = rest_lo[i + 1][k] + std::min(0.0, v);
        rest_hi[i][k] = rest_hi[i + 1][k] + std::max(0.0, v);
      }
    }
    std::vector<double> residual(d);
    for (std::size_t k = 0; k < d; ++k) residual[k] = target.coeffs()[k].get_d();
    std::vector<Integer> col(n + 1, 0);
    return dfs(0, value, residual, target, col, upper, upper != nullptr, visit);
  }

  bool feasible(unsigned i, double value, const std::vector<double>& residual) const {
    if (value < -tol || value > rest[i] + tol) return false;
    for (std::size_t k = 0; k < residual.size(); ++k)
      if (residual[k] < rest_lo[i][k] - coord_tol[k] || residual[k] > rest_hi[i][k] + coord_tol[k]) return false;
    return true;
  }

  template <class Visit>
  bool dfs(unsigned i, double value, std::vector<double>& residual, const FieldElement& target,
           std::vector<Integer>& col, const std::vector<Integer>* upper, bool tight, Visit& visit) {
    burn();
    if (!feasible(i, value, residual)) return false;
    if (i == n + 1) {
      FieldElement acc = target.field().zero();
      for (unsigned k = 0; k <= n; ++k)
        if (col[k] != 0) acc += weights[k] * Rational(col[k]);
      if (acc != target) return false;
      return visit(col);
    }
    double hi_d = std::floor((value + tol) / approx[i]);
    double lo_d = std::ceil((value - rest[i + 1] - tol) / approx[i]);
    Integer hi = caps[i];
    if (hi_d < hi.get_d()) hi = Integer(std::max(hi_d, -1.0));
    if (tight && (*upper)[i] < hi) hi = (*upper)[i];
    Integer lo = lo_d > 0 ? Integer(lo_d) : Integer(0);
    std::vector<double> next(residual.size());
    for (Integer v = hi; v >= lo; --v) {
      col[i] = v;
      const double x = v.get_d();
      for (std::size_t k = 0; k < residual.size(); ++k) next[k] = residual[k] - x * coords[i][k];
      bool still_tight = tight && v == (*upper)[i];
      if (dfs(i + 1, value - x * approx[i], next, target, col, upper, still_tight, visit)) return true;
    }
    col[i] = 0;
    return false;
  }
};

// Counts p_ij at the least depth n in [n_from, max_depth] with
// sum_i p_ij base r^i (1-r)^{n-i} = targets[j] and row sums C(n,i).
std::optional<RefinementWitness> find_witness(const AlgebraicField& field, const Cylinder& base,
                                              const std::vector<FieldElement>& targets, unsigned n_from,
                                              const SearchBounds& bounds) {
  const std::size_t m = targets.size();
  std::vector<double> approx;
  for (const auto& t : targets) approx.push_back(t.approx());
  // Largest targets first; equal targets adjacent so their columns can be
  // ordered and permutations skipped.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (targets[x] == targets[y]) return false;
    if (approx[x] != approx[y]) return approx[x] > approx[y];
    return FieldElement::coeff_less(targets[x], targets[y]);
  });
  const double whole = field.eval_cylinder(base.a, base.b).approx();

  std::uint64_t spent = 0;
  for (unsigned n = n_from; n <= bounds.max_depth; ++n) {
    ColumnSearch cs;
    cs.n = n;
    for (unsigned i = 0; i <= n; ++i) {
      cs.weights.push_back(field.eval_cylinder(base.a + i, base.b + n - i));
      cs.approx.push_back(cs.weights.back().approx());
      cs.caps.push_back(binomial(n, i));
    }
    cs.tol = 1e-10 * whole;
    cs.prepare(targets.front());
    cs.fuel = bounds.fuel > spent ? bounds.fuel - spent : 0;

    std::vector<std::vector<Integer>> cols(m);
    std::function<bool(std::size_t)> place = [&](std::size_t pos) -> bool {
      const std::size_t j = order[pos];
      const std::vector<Integer>* upper = nullptr;
      if (pos > 0 && targets[order[pos - 1]] == targets[j]) upper = &cols[order[pos - 1]];
      if (pos + 1 == m) {
        // The remaining capacity has the right value by the sum check.
        std::vector<Integer> col = cs.caps;
        if (upper && std::lexicographical_compare(upper->begin(), upper->end(), col.begin(), col.end())) return false;
        cols[j] = std::move(col);
        return true;
      }
      return cs.columns(targets[j], approx[j], upper, [&](const std::vector<Integer>& col) {
        for (unsigned i = 0; i <= n; ++i) cs.caps[i] -= col[i];
        cols[j] = col;
        if (place(pos + 1)) return true;
        for (unsigned i = 0; i <= n; ++i) cs.caps[i] += col[i];
        return false;
      });
    };
    bool found = false;
    try {
      found = place(0);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::FuelExhausted) throw Error(ErrorCode::FuelExhausted,
          "generic search exceeded its fuel budget " + std::to_string(bounds.fuel) + " at depth " + std::to_string(n));
      throw;
    }
    spent += cs.spent;
    if (!found) continue;
    RefinementWitness w;
    w.n = n;
    w.p.assign(n + 1, std::vector<Integer>(m, 0));
    for (std::size_t j = 0; j < m; ++j)
      for (unsigned i = 0; i <= n; ++i) w.p[i][j] = cols[j][i];
    return w;
  }
  return std::nullopt;
}

[[noreturn]] void not_found(const SearchBounds& bounds) {
  throw Error(ErrorCode::NotFoundWithinBounds,
              "no tree refinement of depth <= " + std::to_string(bounds.max_depth) + " within fuel " + std::to_string(bounds.fuel));
}

}  // namespace

std::pair<TreePartition, std::vector<std::size_t>> tree_from_witness(const Address& root, const RefinementWitness& w) {
  TreePartition tree;
  tree.root = root;
  std::vector<std::size_t> grouping;
  if (w.p.size() != w.n + 1 || w.p[0].empty()) throw Error(ErrorCode::RowSumMismatch, "witness must have n+1 nonempty rows");
  for (unsigned i = 0; i <= w.n; ++i) {
    if (w.p[i].size() != w.p[0].size()) throw Error(ErrorCode::RowSumMismatch, "witness rows differ in width");
    Integer row = 0;
    for (const auto& v : w.p[i]) {
      if (v < 0) throw Error(ErrorCode::RowSumMismatch, "negative witness entry");
      row += v;
    }
    if (row != binomial(w.n, i)) throw Error(ErrorCode::RowSumMismatch, "row " + std::to_string(i) + " does not sum to C(n,i)");
  }
  TreeBuilder b(w.n, w.p[0].size());
  b.build(w.p, tree, grouping);
  return {std::move(tree), std::move(grouping)};
}

Refinement generic_search(const AlgebraicField& field, const Cylinder& c, const std::vector<Cylinder>& parts,
                          const SearchBounds& bounds) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "partition has no parts");
  if (list_sum(parts, field) != field.eval_cylinder(c.a, c.b)) throw Error(ErrorCode::SumMismatch, "parts do not sum to " + to_string(c));

  Cylinder g = c;
  for (const auto& p : parts) g = {std::min(g.a, p.a), std::min(g.b, p.b)};
  const Cylinder base{c.a - g.a, c.b - g.b};
  std::vector<FieldElement> targets;
  for (const auto& p : parts) targets.push_back(field.eval_cylinder(p.a - g.a, p.b - g.b));

  auto w = find_witness(field, base, targets, 0, bounds);
  if (!w) not_found(bounds);
  auto [tree, grouping] = tree_from_witness(Address::canonical(c), *w);
  coarsen(tree, grouping);
  Refinement out;
  out.partition = std::move(tree);
  out.grouping = std::move(grouping);
  out.used = StrategyKind::GenericSearch;
  out.scale = g;
  out.k = w->n;
  validate_tree_partition(out.partition);
  out.witness = witness_from_grouping(out.partition, out.grouping, parts, field);
  return out;
}

namespace {

// Deals the cells of a node to its two halves: as many whole cells as fit go
// to the 1-half (largest first), one more cell is cut so the 1-half is filled
// exactly, and the rest go to the 0-half. Nodes left with few cells are
// solved directly.
struct Dealer {
  const AlgebraicField& field;
  SearchBounds direct;
  TreePartition tree;
  std::vector<std::size_t> grouping;

  struct Item {
    std::size_t owner;
    FieldElement measure;
  };

  bool solve_directly(const Address& z, const std::vector<Item>& items) {
    std::vector<FieldElement> measures;
    for (const auto& it : items) measures.push_back(it.measure);
    std::optional<RefinementWitness> w;
    if (items.size() <= 6) {
      try {
        w = find_witness(field, z.size(), measures, 0, direct);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::FuelExhausted) throw;
      }
    }
    if (!w && items.size() == 2) w = balanced_witness(field, z.size(), measures);
    if (!w) return false;
    auto [sub, owners] = tree_from_witness(z, *w);
    for (std::size_t k = 0; k < sub.leaves.size(); ++k) {
      tree.leaves.push_back(sub.leaves[k]);
      grouping.push_back(items[owners[k]].owner);
    }
    return true;
  }

  void deal(const Address& z, std::vector<Item> items) {
    if (items.size() == 1) {
      tree.leaves.push_back(z);
      grouping.push_back(items.front().owner);
      return;
    }
    if (solve_directly(z, items)) return;
    if (items.size() == 2 && z.length() > tree.root.length() + 64)
      throw Error(ErrorCode::NotFoundWithinBounds, "could not split a node of " + z.bits());
    std::stable_sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
      return x.measure.approx() > y.measure.approx();
    });
    const Address one = z.child('1'), zero = z.child('0');
    const Cylinder half = one.size();
    FieldElement gap = field.eval_cylinder(half.a, half.b);
    std::vector<Item> upper, lower;
    for (auto& it : items) {
      if ((gap - it.measure).sign() >= 0) {
        gap -= it.measure;
        upper.push_back(std::move(it));
      } else {
        lower.push_back(std::move(it));
      }
    }
    if (!gap.is_zero()) {
      // Every cell left over is larger than the gap; cut the smallest.
      Item& cut = lower.back();
      upper.push_back({cut.owner, gap});
      cut.measure -= gap;
    }
    deal(one, std::move(upper));
    deal(zero, std::move(lower));
  }
};

}  // namespace

MeasureRefinement refine_to_measures(const AlgebraicField& field, const Cylinder& c,
                                     const std::vector<FieldElement>& measures, const SearchBounds& bounds) {
  if (measures.empty()) throw Error(ErrorCode::InvalidArgument, "no measures to realize");
  const FieldElement whole = field.eval_cylinder(c.a, c.b);
  FieldElement total = field.zero();
  for (const auto& v : measures) total += v;
  if (total != whole) throw Error(ErrorCode::SumMismatch, "measures do not sum to " + to_string(c));

  // A cell contains a whole depth-n leaf, whose measure is at least
  // |c| min(r, 1-r)^n; that bounds n from below.
  const double r = field.approx_root();
  const double lo = std::log(std::min(r, 1 - r));
  unsigned n_from = 0;
  for (const auto& v : measures) {
    double ratio = v.approx() / whole.approx();
    if (!(ratio > 0)) throw Error(ErrorCode::InvalidArgument, "measures must be positive");
    n_from = std::max(n_from, static_cast<unsigned>(std::max(0.0, std::ceil(std::log(ratio) / lo - 1e-9))));
  }
  std::optional<RefinementWitness> w;
  try {
    w = find_witness(field, c, measures, n_from, bounds);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::FuelExhausted) throw;
  }
  TreePartition tree;
  std::vector<std::size_t> grouping;
  if (w) {
    std::tie(tree, grouping) = tree_from_witness(Address::canonical(c), *w);
  } else {
    // Deep targets defeat the search; deal the cells out instead.
    Dealer dealer{field, {std::min(bounds.max_depth, 10u), std::min<std::uint64_t>(bounds.fuel, 20'000)}, {}, {}};
    dealer.tree.root = Address::canonical(c);
    std::vector<Dealer::Item> items;
    for (std::size_t j = 0; j < measures.size(); ++j) items.push_back({j, measures[j]});
    dealer.deal(dealer.tree.root, std::move(items));
    tree = std::move(dealer.tree);
    grouping = std::move(dealer.grouping);
  }
  coarsen(tree, grouping);
  validate_tree_partition(tree);
  std::vector<FieldElement> sums(measures.size(), field.zero());
  for (std::size_t k = 0; k < tree.leaves.size(); ++k) {
    Cylinder leaf = tree.leaves[k].size();
    sums[grouping[k]] += field.eval_cylinder(leaf.a, leaf.b);
  }
  for (std::size_t j = 0; j < measures.size(); ++j)
    if (sums[j] != measures[j]) throw Error(ErrorCode::PartSumMismatch, "cell " + std::to_string(j + 1) + " has the wrong measure");
  MeasureRefinement out;
  if (!w) {
    Uniformization u = uniformize(tree);
    w = RefinementWitness{u.n, std::vector<std::vector<Integer>>(u.n + 1, std::vector<Integer>(measures.size(), 0))};
    for (std::size_t k = 0; k < grouping.size(); ++k)
      for (unsigned i = 0; i <= u.n; ++i) w->p[i][grouping[k]] += u.per_leaf[k][i];
  }
  out.partition = std::move(tree);
  out.grouping = std::move(grouping);
  out.witness = std::move(*w);
  return out;
}

Refinement generic_search_values(const AlgebraicField& field, const Cylinder& c, const std::vector<FieldElement>& parts,
                                 const SearchBounds& bounds) {
  std::vector<Cylinder> cyls;
  const double r = field.approx_root();
  for (const auto& v : parts) {
    const double target = v.approx();
    std::optional<Cylinder> hit;
    for (unsigned len = 0; len <= 64 && !hit; ++len) {
      for (unsigned a = 0; a <= len && !hit; ++a) {
        double guess = std::pow(r, a) * std::pow(1 - r, len - a);
        if (std::abs(guess - target) > 1e-9 * target) continue;
        if (field.eval_cylinder(a, len - a) == v) hit = Cylinder{a, len - a};
      }
    }
    if (!hit) throw Error(ErrorCode::StrategyInapplicable, "part " + v.to_string() + " is not a cylinder size");
    cyls.push_back(*hit);
  }
  return generic_search(field, c, cyls, bounds);
}

}  // namespace cantor
