#include "cantor/rewrite.hpp"

#include <algorithm>
#include <set>

#include "cantor/error.hpp"

namespace cantor {

bool is_tree_move(const Move& m) { return !std::holds_alternative<SplitMove>(m); }

const char* move_kind(const Move& m) {
  switch (m.index()) {
    case 0: return "tree_split";
    case 1: return "merge";
    case 2: return "split";
    default: return "rewrite";
  }
}

// ---------------------------------------------------------------------------
// TraceState

TraceState::TraceState(AlgebraicField field, const std::vector<Item>& items)
    : field_(std::move(field)), sum_(field_.zero()) {
  for (const auto& item : items) {
    if (item.label && item.value != field_.eval_cylinder(item.label->a, item.label->b))
      throw Error(ErrorCode::SumMismatch, "item " + std::to_string(item.id) + " value differs from its label");
    if (!items_.emplace(item.id, item).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate item id " + std::to_string(item.id));
    next_id_ = std::max(next_id_, item.id + 1);
    sum_ += item.value;
  }
}

const Item& TraceState::at(ItemId id) const {
  auto it = items_.find(id);
  if (it == items_.end()) throw Error(ErrorCode::UnknownItem, "no live item with id " + std::to_string(id));
  return it->second;
}

Item TraceState::take(ItemId id) {
  auto it = items_.find(id);
  if (it == items_.end()) throw Error(ErrorCode::UnknownItem, "no live item with id " + std::to_string(id));
  Item out = std::move(it->second);
  items_.erase(it);
  sum_ -= out.value;
  return out;
}

void TraceState::put(Item item) {
  sum_ += item.value;
  ItemId id = item.id;
  items_.emplace(id, std::move(item));
}

std::vector<ItemId> TraceState::apply(const Move& m) {
  const FieldElement before = sum_;
  std::vector<ItemId> created;
  if (const auto* ts = std::get_if<TreeSplitMove>(&m)) {
    const Item& x = at(ts->item);
    if (!x.label) throw Error(ErrorCode::InvalidArgument, "tree split needs a labeled item");
    Cylinder c = *x.label;
    take(ts->item);
    Cylinder left{c.a + 1, c.b}, right{c.a, c.b + 1};
    ItemId l = fresh(), r = fresh();
    put(Item{l, left, field_.eval_cylinder(left.a, left.b)});
    put(Item{r, right, field_.eval_cylinder(right.a, right.b)});
    created = {l, r};
  } else if (const auto* mg = std::get_if<MergeMove>(&m)) {
    if (mg->items.empty()) throw Error(ErrorCode::InvalidArgument, "merge of no items");
    std::set<ItemId> distinct(mg->items.begin(), mg->items.end());
    if (distinct.size() != mg->items.size()) throw Error(ErrorCode::InvalidArgument, "merge lists an item twice");
    FieldElement total = field_.zero();
    for (ItemId id : mg->items) total += at(id).value;
    if (total != mg->value) throw Error(ErrorCode::SumMismatch, "merged items do not sum to the stated value");
    if (mg->label && field_.eval_cylinder(mg->label->a, mg->label->b) != mg->value)
      throw Error(ErrorCode::SumMismatch, "merge label " + to_string(*mg->label) + " differs from the merged value");
    for (ItemId id : mg->items) take(id);
    ItemId y = fresh();
    put(Item{y, mg->label, mg->value});
    created = {y};
  } else if (const auto* sp = std::get_if<SplitMove>(&m)) {
    const Item& x = at(sp->item);
    if (sp->parts.empty()) throw Error(ErrorCode::InvalidArgument, "split into no parts");
    if (list_sum(sp->parts, field_) != x.value) throw Error(ErrorCode::SumMismatch, "split parts do not sum to the item");
    take(sp->item);
    for (const auto& c : sp->parts) {
      ItemId y = fresh();
      put(Item{y, c, field_.eval_cylinder(c.a, c.b)});
      created.push_back(y);
    }
  } else {
    const auto& rw = std::get<RewriteMove>(m);
    auto n = field_.selmer_exponent();
    if (!n) throw Error(ErrorCode::NotSelmerField, "rewrite requires a field with 1 - r = r^n");
    const Item& x = at(rw.item);
    if (!x.label) throw Error(ErrorCode::InvalidArgument, "rewrite needs a labeled item");
    Cylinder from = *x.label;
    bool forward = from.b >= 1 && rw.to == Cylinder{from.a + *n, from.b - 1};
    bool backward = from.a >= *n && rw.to == Cylinder{from.a - *n, from.b + 1};
    if (!forward && !backward)
      throw Error(ErrorCode::InvalidArgument, "rewrite " + to_string(from) + " -> " + to_string(rw.to) + " has the wrong shape");
    take(rw.item);
    ItemId y = fresh();
    put(Item{y, rw.to, field_.eval_cylinder(rw.to.a, rw.to.b)});
    created = {y};
  }
  if (sum_ != before) throw Error(ErrorCode::SumMismatch, "move changed the multiset sum");
  return created;
}

std::vector<Item> TraceState::snapshot() const {
  std::vector<Item> out;
  out.reserve(items_.size());
  for (const auto& [id, item] : items_) out.push_back(item);
  return out;
}

CylinderMultiset TraceState::labels() const {
  CylinderMultiset out;
  for (const auto& [id, item] : items_) {
    if (!item.label) throw Error(ErrorCode::InvalidArgument, "unlabeled item " + std::to_string(id));
    out.add(*item.label);
  }
  return out;
}

TraceState apply_move(const TraceState& state, const Move& m) {
  TraceState next(state);
  next.apply(m);
  return next;
}

namespace {

bool same_items_exact(const std::vector<Item>& x, const std::vector<Item>& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].id != y[i].id || x[i].label != y[i].label || x[i].value != y[i].value) return false;
  return true;
}

}  // namespace

TraceState replay(const Trace& t, const AlgebraicField& field) {
  TraceState state(field, t.initial);
  for (const auto& m : t.moves) state.apply(m);
  if (!same_items_exact(state.snapshot(), t.final))
    throw Error(ErrorCode::FinalMultisetMismatch, "replay does not reproduce the recorded final multiset");
  return state;
}

// ---------------------------------------------------------------------------
// TraceBuilder

TraceBuilder::TraceBuilder(AlgebraicField field, std::vector<Item> initial) : state_(std::move(field), initial) {
  trace_.initial = std::move(initial);
}

TraceBuilder TraceBuilder::from_cylinders(const AlgebraicField& field, const std::vector<Cylinder>& items) {
  std::vector<Item> initial;
  initial.reserve(items.size());
  for (std::size_t k = 0; k < items.size(); ++k)
    initial.push_back(Item{k, items[k], field.eval_cylinder(items[k].a, items[k].b)});
  return TraceBuilder(field, std::move(initial));
}

std::vector<ItemId> TraceBuilder::apply(Move m) {
  auto created = state_.apply(m);
  trace_.moves.push_back(std::move(m));
  return created;
}

Trace TraceBuilder::finish() const {
  Trace out = trace_;
  out.final = state_.snapshot();
  return out;
}

bool same_labeled_multiset(const std::vector<Item>& x, const std::vector<Item>& y) {
  if (x.size() != y.size()) return false;
  auto key_less = [](const Item* p, const Item* q) {
    if (p->label != q->label) {
      if (!p->label) return true;
      if (!q->label) return false;
      return *p->label < *q->label;
    }
    return FieldElement::coeff_less(p->value, q->value);
  };
  std::vector<const Item*> xs, ys;
  for (const auto& i : x) xs.push_back(&i);
  for (const auto& i : y) ys.push_back(&i);
  std::sort(xs.begin(), xs.end(), key_less);
  std::sort(ys.begin(), ys.end(), key_less);
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (xs[k]->label != ys[k]->label || xs[k]->value != ys[k]->value) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Normalization

NormalizedTrace normalize_with_map(const Trace& t, const AlgebraicField& field, std::uint64_t fuel) {
  TraceState original(field, t.initial);
  TraceBuilder builder(field, t.initial);
  std::map<ItemId, std::vector<ItemId>> constituents;
  for (const auto& item : t.initial) constituents[item.id] = {item.id};
  std::uint64_t spent = 0;
  auto burn = [&] {
    if (++spent > fuel) throw Error(ErrorCode::FuelExhausted, "trace normalization exceeded its fuel budget");
  };

  for (const auto& m : t.moves) {
    if (!is_tree_move(m)) throw Error(ErrorCode::NonTreeMoveInA, "normalization applies to tree moves only");
    auto created = original.apply(m);
    if (const auto* ts = std::get_if<TreeSplitMove>(&m)) {
      std::vector<ItemId> ones, zeros;
      for (ItemId leaf : constituents.at(ts->item)) {
        burn();
        auto kids = builder.apply(TreeSplitMove{leaf});
        ones.push_back(kids[0]);
        zeros.push_back(kids[1]);
      }
      constituents.erase(ts->item);
      constituents[created[0]] = std::move(ones);
      constituents[created[1]] = std::move(zeros);
    } else if (const auto* mg = std::get_if<MergeMove>(&m)) {
      std::vector<ItemId> joined;
      for (ItemId id : mg->items) {
        auto& c = constituents.at(id);
        joined.insert(joined.end(), c.begin(), c.end());
        constituents.erase(id);
      }
      constituents[created[0]] = std::move(joined);
    } else {
      const auto& rw = std::get<RewriteMove>(m);
      constituents[created[0]] = std::move(constituents.at(rw.item));
      constituents.erase(rw.item);
    }
  }

  NormalizedTrace out;
  out.split_count = builder.move_count();
  for (const auto& [id, item] : original.items()) {
    const auto& cons = constituents.at(id);
    const Item& first = builder.state().at(cons.front());
    if (cons.size() == 1 && first.label == item.label) {
      out.final_map[id] = cons.front();
      continue;
    }
    burn();
    auto made = builder.apply(MergeMove{cons, item.value, item.label});
    out.final_map[id] = made[0];
  }
  out.trace = builder.finish();
  return out;
}

Trace normalize_trace(const Trace& t, const AlgebraicField& field, std::uint64_t fuel) {
  return normalize_with_map(t, field, fuel).trace;
}

// ---------------------------------------------------------------------------
// Extraction

Extraction extract_refinement(const Trace& traceA, const Trace& traceB, const AlgebraicField& field,
                              const std::optional<std::vector<std::pair<ItemId, ItemId>>>& matching,
                              const std::optional<Address>& root, std::uint64_t fuel) {
  if (traceA.initial.size() != 1 || !traceA.initial.front().label)
    throw Error(ErrorCode::InvalidArgument, "tree side must start from a single labeled cylinder");
  for (const auto& m : traceA.moves)
    if (!is_tree_move(m)) throw Error(ErrorCode::NonTreeMoveInA, "tree side contains an arbitrary split");
  const Cylinder whole = *traceA.initial.front().label;
  const Address root_addr = root.value_or(Address::canonical(whole));
  if (root_addr.size() != whole)
    throw Error(ErrorCode::InvalidArgument, "root address does not have the size of the tree side's cylinder");

  NormalizedTrace norm = normalize_with_map(traceA, field, fuel);

  // Tree-split prefix: addresses of the leaves relative to the root.
  TraceState a_state(field, norm.trace.initial);
  std::map<ItemId, std::string> address;
  address[norm.trace.initial.front().id] = "";
  for (std::size_t k = 0; k < norm.split_count; ++k) {
    const auto& ts = std::get<TreeSplitMove>(norm.trace.moves[k]);
    auto kids = a_state.apply(ts);
    std::string base = address.at(ts.item);
    address.erase(ts.item);
    address[kids[0]] = base + '1';
    address[kids[1]] = base + '0';
  }
  // Merge suffix: constituents of every final item.
  std::map<ItemId, std::vector<ItemId>> members;
  for (const auto& [id, bits] : address) members[id] = {id};
  for (std::size_t k = norm.split_count; k < norm.trace.moves.size(); ++k) {
    const auto& mg = std::get<MergeMove>(norm.trace.moves[k]);
    auto made = a_state.apply(mg);
    std::vector<ItemId> joined;
    for (ItemId id : mg.items) {
      auto& c = members.at(id);
      joined.insert(joined.end(), c.begin(), c.end());
      members.erase(id);
    }
    members[made[0]] = std::move(joined);
  }

  // Split side: ancestry back to the parts.
  TraceState b_state(field, traceB.initial);
  std::map<ItemId, std::size_t> origin;
  for (std::size_t j = 0; j < traceB.initial.size(); ++j) origin[traceB.initial[j].id] = j;
  for (const auto& m : traceB.moves) {
    if (std::holds_alternative<MergeMove>(m)) throw Error(ErrorCode::InvalidArgument, "split side may not merge");
    ItemId parent = std::visit([](const auto& mv) -> ItemId {
      if constexpr (std::is_same_v<std::decay_t<decltype(mv)>, MergeMove>) return 0;
      else return mv.item;
    }, m);
    std::size_t part = origin.at(parent);
    for (ItemId id : b_state.apply(m)) origin[id] = part;
    origin.erase(parent);
  }

  std::vector<Item> a_final = a_state.snapshot(), b_final = b_state.snapshot();
  if (a_final.size() != b_final.size())
    throw Error(ErrorCode::FinalMultisetMismatch, "final multisets have different sizes");

  std::map<ItemId, ItemId> a_to_b;
  if (matching) {
    std::set<ItemId> used_b;
    for (const auto& [a, b] : *matching) {
      if (!a_state.items().count(a) || !b_state.items().count(b) || !used_b.insert(b).second || a_to_b.count(a))
        throw Error(ErrorCode::FinalMultisetMismatch, "matching is not a bijection of final items");
      if (a_state.at(a).value != b_state.at(b).value)
        throw Error(ErrorCode::FinalMultisetMismatch, "matching pairs items of different value");
      a_to_b[a] = b;
    }
    if (a_to_b.size() != a_final.size()) throw Error(ErrorCode::FinalMultisetMismatch, "matching does not cover every item");
  } else {
    auto by_value = [](const std::vector<Item>& items) {
      std::vector<std::size_t> order(items.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      return order;
    };
    auto a_order = by_value(a_final), b_order = by_value(b_final);
    auto min_address = [&](ItemId id) {
      const auto& m = members.at(id);
      std::string best = address.at(m.front());
      for (ItemId leaf : m) best = std::min(best, address.at(leaf));
      return best;
    };
    std::map<ItemId, std::string> a_key;
    for (const auto& item : a_final) a_key[item.id] = min_address(item.id);
    std::stable_sort(a_order.begin(), a_order.end(), [&](std::size_t x, std::size_t y) {
      const auto &p = a_final[x], &q = a_final[y];
      if (p.value != q.value) return FieldElement::coeff_less(p.value, q.value);
      return a_key[p.id] < a_key[q.id];
    });
    std::stable_sort(b_order.begin(), b_order.end(), [&](std::size_t x, std::size_t y) {
      const auto &p = b_final[x], &q = b_final[y];
      if (p.value != q.value) return FieldElement::coeff_less(p.value, q.value);
      if (origin.at(p.id) != origin.at(q.id)) return origin.at(p.id) < origin.at(q.id);
      return p.id < q.id;
    });
    for (std::size_t k = 0; k < a_order.size(); ++k) {
      const Item& p = a_final[a_order[k]];
      const Item& q = b_final[b_order[k]];
      if (p.value != q.value) throw Error(ErrorCode::FinalMultisetMismatch, "final multisets differ");
      a_to_b[p.id] = q.id;
    }
  }

  std::map<ItemId, std::size_t> leaf_part;
  for (const auto& [final_id, leaves] : members)
    for (ItemId leaf : leaves) leaf_part[leaf] = origin.at(a_to_b.at(final_id));

  Extraction out;
  out.partition.root = root_addr;
  std::vector<std::pair<std::string, std::size_t>> rows;
  for (const auto& [leaf, part] : leaf_part) rows.emplace_back(address.at(leaf), part);
  std::sort(rows.begin(), rows.end());
  for (const auto& [bits, part] : rows) {
    out.partition.leaves.push_back(root_addr.concat(Address(bits)));
    out.grouping.push_back(part);
  }

  std::vector<FieldElement> sums(traceB.initial.size(), field.zero());
  for (std::size_t k = 0; k < out.grouping.size(); ++k) {
    Cylinder c = out.partition.leaves[k].size();
    sums[out.grouping[k]] += field.eval_cylinder(c.a, c.b);
  }
  for (std::size_t j = 0; j < sums.size(); ++j) {
    if (sums[j] != traceB.initial[j].value)
      throw Error(ErrorCode::PartSumMismatch, "part " + std::to_string(j + 1) + " is not covered exactly");
  }
  validate_tree_partition(out.partition);
  return out;
}

}  // namespace cantor
