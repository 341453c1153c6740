#include <algorithm>
#include <stdexcept>

#include "cantor/error.hpp"
#include "cantor/refiner.hpp"

namespace cantor {

const char* macro_name(MacroKind k) {
  switch (k) {
    case MacroKind::TreeSplit: return "tree-split";
    case MacroKind::BarElim: return "bar-elim";
    case MacroKind::SelmerSplit: return "selmer-split";
    case MacroKind::EqB: return "eqb";
    case MacroKind::EqC: return "eqc";
    case MacroKind::EqD: return "eqd";
    case MacroKind::EqE: return "eqe";
  }
  return "?";
}

std::vector<Cylinder> macro_output(MacroKind kind, const Cylinder& t, unsigned n) {
  const auto a = t.a, b = t.b;
  auto bad = [&](const char* why) {
    return Error(ErrorCode::InvalidArgument, std::string(macro_name(kind)) + " does not apply to " + to_string(t) + ": " + why);
  };
  switch (kind) {
    case MacroKind::TreeSplit:
      return {{a + 1, b}, {a, b + 1}};
    case MacroKind::BarElim:
      if (n == 0) throw Error(ErrorCode::NotSelmerField, "bar elimination needs a Selmer exponent");
      if (b == 0) throw bad("no factor 1-r");
      return {{a + n, b - 1}};
    case MacroKind::SelmerSplit:
      if (n == 0) throw Error(ErrorCode::NotSelmerField, "selmer split needs a Selmer exponent");
      return {{a + 1, b}, {a + n, b}};
    case MacroKind::EqB:
      return {{a + 1, b}, {a + 2, b}, {a + 2, b + 1}, {a + 3, b + 1}};
    case MacroKind::EqC:
      if (a == 0) throw bad("needs a factor s");
      return {{a - 1, b + 2}, {a, b + 2}, {a, b + 2}, {a + 1, b + 2}};
    case MacroKind::EqD:
      if (a != b) throw bad("needs a = b");
      return {{b + 1, b}, {b + 1, b + 1}, {b + 2, b + 1}, {b + 2, b + 2}, {b + 3, b + 2}};
    case MacroKind::EqE:
      if (a != b + 1) throw bad("needs a = b + 1");
      return {{b + 1, b + 1}, {b + 2, b + 2}, {b + 2, b + 2}, {b + 2, b + 2}, {b + 3, b + 2},
              {b + 3, b + 2}, {b + 3, b + 3}, {b + 4, b + 3}};
  }
  throw bad("unknown macro");
}

const std::vector<std::string>& eqa_addresses() {
  static const std::vector<std::string> leaves{"11", "00", "101", "100", "010", "0111", "0110"};
  return leaves;
}

MinimalPolynomial r4s_minpoly() { return MinimalPolynomial({1, -1, -2, 0, 1}); }

bool is_r4s_field(const AlgebraicField& field) {
  if (!(field.minpoly() == r4s_minpoly())) return false;
  // x^4-2x^2-x+1 has two roots in (0,1); the relevant one is near 0.525.
  auto iv = field.root_interval();
  return iv.hi > Rational(1, 2) && iv.lo < Rational(3, 5);
}

// ---------------------------------------------------------------------------
// Plans on counted multisets

namespace {

class Planner {
 public:
  Planner(CylinderMultiset m, unsigned n, std::uint64_t fuel) : m_(std::move(m)), n_(n), fuel_(fuel) {}

  void step(MacroKind kind, const Cylinder& target) {
    if (++spent_ > fuel_) throw Error(ErrorCode::FuelExhausted, "canonicalization exceeded its fuel budget");
    Integer count = m_.count(target);
    auto out = macro_output(kind, target, n_);
    check_meter(kind, target, out);
    m_.remove(target, count);
    for (const auto& c : out) m_.add(c, count);
    steps_.push_back({kind, target, count});
  }

  /// First entry in canonical order satisfying `pred`.
  template <class Pred>
  std::optional<Cylinder> find(Pred pred) const {
    for (const auto& [c, m] : m_)
      if (pred(c)) return c;
    return std::nullopt;
  }

  const CylinderMultiset& multiset() const { return m_; }
  std::vector<MacroStep>& steps() { return steps_; }

 private:
  static void check_meter(MacroKind kind, const Cylinder& t, const std::vector<Cylinder>& out) {
    auto diff = [](const Cylinder& c) { return static_cast<long>(c.a) - static_cast<long>(c.b); };
    for (const auto& c : out) {
      bool ok = true;
      if (kind == MacroKind::EqC) ok = diff(c) < diff(t);
      if (kind == MacroKind::EqB) ok = diff(c) > diff(t);
      if (kind == MacroKind::EqD || kind == MacroKind::EqE) ok = c.length() > t.length();
      if (!ok) throw std::logic_error(std::string(macro_name(kind)) + " meter did not move on " + to_string(t));
    }
  }

  CylinderMultiset m_;
  unsigned n_;
  std::uint64_t fuel_;
  std::uint64_t spent_ = 0;
  std::vector<MacroStep> steps_;
};

void bar_eliminate(Planner& p) {
  while (auto t = p.find([](const Cylinder& c) { return c.b > 0; })) p.step(MacroKind::BarElim, *t);
}

void band_reduce(Planner& p) {
  while (auto t = p.find([](const Cylinder& c) { return c.a > c.b + 1; })) p.step(MacroKind::EqC, *t);
  while (auto t = p.find([](const Cylinder& c) { return c.a < c.b; })) p.step(MacroKind::EqB, *t);
}

}  // namespace

unsigned selmer_min_k(const CylinderMultiset& m, unsigned n) {
  unsigned k = 0;
  for (const auto& [c, mult] : m) k = std::max(k, c.a + n * c.b);
  return k;
}

Canonical selmer_canonicalize(const CylinderMultiset& m, unsigned k, unsigned n) {
  if (n < 2) throw Error(ErrorCode::NotSelmerField, "Selmer exponent must be at least 2");
  unsigned need = selmer_min_k(m, n);
  if (k < need)
    throw Error(ErrorCode::WindowTooSmall, "k = " + std::to_string(k) + " is below the largest exponent " + std::to_string(need));
  Planner p(m, n, ~std::uint64_t{0});
  bar_eliminate(p);
  while (auto t = p.find([&](const Cylinder& c) { return c.a + n <= k; })) p.step(MacroKind::SelmerSplit, *t);
  return {p.multiset(), std::move(p.steps()), k};
}

std::vector<Cylinder> r4s_support(unsigned k) { return {{k, k - 1}, {k - 1, k}, {k, k}, {k + 1, k}}; }

unsigned r4s_min_k(const CylinderMultiset& m, std::uint64_t fuel) {
  Planner p(m, 0, fuel);
  band_reduce(p);
  unsigned k = 2;
  for (const auto& [c, mult] : p.multiset()) k = std::max(k, c.a);
  return k;
}

Canonical r4s_canonicalize(const CylinderMultiset& m, std::optional<unsigned> k_opt, std::uint64_t fuel) {
  Planner p(m, 0, fuel);
  band_reduce(p);
  unsigned own = 2;
  for (const auto& [c, mult] : p.multiset()) own = std::max(own, c.a);
  unsigned k = k_opt.value_or(own);
  if (k < own)
    throw Error(ErrorCode::WindowTooSmall, "k = " + std::to_string(k) + " is below the band's largest exponent " + std::to_string(own));

  while (auto t = p.find([&](const Cylinder& c) {
    return (c.a == c.b && c.b + 1 < k) || (c.a == c.b + 1 && c.b + 2 < k);
  })) {
    p.step(t->a == t->b ? MacroKind::EqD : MacroKind::EqE, *t);
  }
  const Cylinder c1{k - 1, k - 2}, c2{k - 1, k - 1}, c3{k, k - 2};
  if (p.multiset().count(c1) > 0) p.step(MacroKind::TreeSplit, c1);
  if (p.multiset().count(c2) > 0) p.step(MacroKind::TreeSplit, c2);
  if (p.multiset().count(c3) > 0) p.step(MacroKind::EqC, c3);

  auto support = r4s_support(k);
  for (const auto& [c, mult] : p.multiset())
    if (std::find(support.begin(), support.end(), c) == support.end())
      throw std::logic_error("r4s canonical form left " + to_string(c) + " outside the four sizes");
  return {p.multiset(), std::move(p.steps()), k};
}

// ---------------------------------------------------------------------------
// Realizer

Realizer::Realizer(TraceBuilder& builder, Side side, unsigned selmer_n, std::uint64_t fuel)
    : builder_(builder), side_(side), n_(selmer_n), fuel_(fuel) {
  for (const auto& [id, item] : builder_.state().items())
    if (item.label) by_label_[*item.label].insert(id);
}

ItemId Realizer::take_labeled(const Cylinder& c) {
  auto it = by_label_.find(c);
  if (it == by_label_.end() || it->second.empty())
    throw Error(ErrorCode::InvalidArgument, "no live item labeled " + to_string(c));
  return *it->second.begin();
}

std::vector<ItemId> Realizer::run(Move m) {
  if (builder_.move_count() >= fuel_) throw Error(ErrorCode::FuelExhausted, "trace realization exceeded its fuel budget");
  std::vector<ItemId> gone;
  std::visit([&](const auto& mv) {
    if constexpr (std::is_same_v<std::decay_t<decltype(mv)>, MergeMove>) gone = mv.items;
    else gone = {mv.item};
  }, m);
  std::vector<std::optional<Cylinder>> gone_labels;
  for (ItemId id : gone) gone_labels.push_back(builder_.state().at(id).label);
  auto created = builder_.apply(std::move(m));
  for (std::size_t i = 0; i < gone.size(); ++i)
    if (gone_labels[i]) by_label_[*gone_labels[i]].erase(gone[i]);
  for (ItemId id : created)
    if (const auto& label = builder_.state().at(id).label) by_label_[*label].insert(id);
  return created;
}

std::vector<ItemId> Realizer::split_to(ItemId item, const std::vector<std::string>& leaves,
                                       std::map<std::string, ItemId>& at) {
  std::set<std::string> internal;
  for (const auto& leaf : leaves)
    for (std::size_t len = 0; len < leaf.size(); ++len) internal.insert(leaf.substr(0, len));
  std::vector<std::string> order(internal.begin(), internal.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.size() < y.size(); });
  at.clear();
  at[""] = item;
  for (const auto& node : order) {
    auto kids = run(TreeSplitMove{at.at(node)});
    at.erase(node);
    at[node + '1'] = kids[0];
    at[node + '0'] = kids[1];
  }
  std::vector<ItemId> out;
  for (const auto& leaf : leaves) out.push_back(at.at(leaf));
  return out;
}

ItemId Realizer::merge(const std::vector<ItemId>& items, const Cylinder& label) {
  FieldElement value = builder_.state().field().eval_cylinder(label.a, label.b);
  return run(MergeMove{items, value, label})[0];
}

std::vector<ItemId> Realizer::eqb(ItemId item) {
  Cylinder t = *builder_.state().at(item).label;
  std::map<std::string, ItemId> at;
  split_to(item, eqa_addresses(), at);
  // s = (1-s)^2 (1 + 2s + s^2), scaled by t.
  ItemId s = merge({at["00"], at["100"], at["010"], at["0110"]}, {t.a + 1, t.b});
  return {s, at["11"], at["101"], at["0111"]};
}

std::vector<ItemId> Realizer::eqc(ItemId item) {
  Cylinder t = *builder_.state().at(item).label;
  if (t.a == 0) throw Error(ErrorCode::InvalidArgument, "eqc needs a factor s in " + to_string(t));
  static const std::vector<std::string> leaves{"11", "00", "100", "010", "0111", "0110",
                                               "1011", "10100", "101011", "101010"};
  std::map<std::string, ItemId> at;
  split_to(item, leaves, at);
  // s (1-s)^2 times the eqb identity, then (1-s)^2 = s^3 + 2 s^4 (1-s) + s^5 (1-s)^2.
  ItemId low = merge({at["100"], at["0110"], at["10100"], at["101010"]}, {t.a, t.b + 2});
  ItemId top = merge({at["11"], at["0111"], at["1011"], at["101011"]}, {t.a - 1, t.b + 2});
  return {top, at["00"], low, at["010"]};
}

std::vector<ItemId> Realizer::apply_once(MacroKind kind, ItemId item) {
  const Cylinder t = *builder_.state().at(item).label;
  if (side_ == Side::Split) {
    switch (kind) {
      case MacroKind::TreeSplit: return run(TreeSplitMove{item});
      case MacroKind::BarElim: return run(RewriteMove{item, macro_output(kind, t, n_)[0]});
      default: return run(SplitMove{item, macro_output(kind, t, n_)});
    }
  }
  switch (kind) {
    case MacroKind::TreeSplit: return run(TreeSplitMove{item});
    case MacroKind::BarElim: return run(RewriteMove{item, macro_output(kind, t, n_)[0]});
    case MacroKind::SelmerSplit: {
      if (n_ == 0) throw Error(ErrorCode::NotSelmerField, "selmer split needs a Selmer exponent");
      auto kids = run(TreeSplitMove{item});
      auto moved = run(RewriteMove{kids[1], {t.a + n_, t.b}});
      return {kids[0], moved[0]};
    }
    case MacroKind::EqB: return eqb(item);
    case MacroKind::EqC: return eqc(item);
    case MacroKind::EqD: {
      if (t.a != t.b) throw Error(ErrorCode::InvalidArgument, "eqd needs a = b");
      auto kids = run(TreeSplitMove{item});
      auto rest = eqb(kids[1]);
      rest.insert(rest.begin(), kids[0]);
      return rest;
    }
    case MacroKind::EqE: {
      if (t.a != t.b + 1) throw Error(ErrorCode::InvalidArgument, "eqe needs a = b + 1");
      auto kids = run(TreeSplitMove{item});
      auto c_out = eqc(kids[0]);
      auto b_out = eqb(c_out[0]);
      std::vector<ItemId> out{kids[1]};
      out.insert(out.end(), c_out.begin() + 1, c_out.end());
      out.insert(out.end(), b_out.begin(), b_out.end());
      return out;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown macro");
}

void Realizer::apply(const MacroStep& step) {
  for (Integer done = 0; done < step.count; ++done) apply_once(step.kind, take_labeled(step.target));
}

}  // namespace cantor
