#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "cantor/cylinder.hpp"
#include "cantor/numberfield.hpp"

namespace cantor {

using ItemId = std::uint64_t;

/// Default budget of move applications for trace normalization.
inline constexpr std::uint64_t kDefaultFuel = 1'000'000;

/// A multiset element with identity. Labeled items carry the cylinder whose
/// size equals `value`.
struct Item {
  ItemId id = 0;
  std::optional<Cylinder> label;
  FieldElement value;
};

/// x -> x r, x (1-r); the r-child gets the lower fresh id.
struct TreeSplitMove {
  ItemId item = 0;
};

/// Replaces the listed items with one item of the given (exactly equal) value.
struct MergeMove {
  std::vector<ItemId> items;
  FieldElement value;
  std::optional<Cylinder> label;
};

/// Replaces an item with cylinders summing exactly to it.
struct SplitMove {
  ItemId item = 0;
  std::vector<Cylinder> parts;
};

/// r^a (1-r)^{b+1} <-> r^{a+n} (1-r)^b, valid when 1 - r = r^n.
struct RewriteMove {
  ItemId item = 0;
  Cylinder to;
};

using Move = std::variant<TreeSplitMove, MergeMove, SplitMove, RewriteMove>;

bool is_tree_move(const Move& m);
const char* move_kind(const Move& m);

/// Live items of a trace, keyed by id, with a running exact sum.
class TraceState {
 public:
  TraceState(AlgebraicField field, const std::vector<Item>& items);

  /// Validates and applies; returns the ids created, in order. Throws
  /// UnknownItem, SumMismatch or NotSelmerField.
  std::vector<ItemId> apply(const Move& m);

  const AlgebraicField& field() const { return field_; }
  const std::map<ItemId, Item>& items() const { return items_; }
  const Item& at(ItemId id) const;
  ItemId next_id() const { return next_id_; }
  const FieldElement& sum() const { return sum_; }
  std::vector<Item> snapshot() const;
  CylinderMultiset labels() const;

 private:
  ItemId fresh() { return next_id_++; }
  Item take(ItemId id);
  void put(Item item);

  AlgebraicField field_;
  std::map<ItemId, Item> items_;
  ItemId next_id_ = 0;
  FieldElement sum_;
};

/// Functional form of TraceState::apply.
TraceState apply_move(const TraceState& state, const Move& m);

struct Trace {
  std::vector<Item> initial;
  std::vector<Move> moves;
  std::vector<Item> final;
};

/// Replays every move with exact validation, checks that the running sum never
/// changes and that the result equals `t.final` (ids included).
TraceState replay(const Trace& t, const AlgebraicField& field);

/// Records moves while applying them.
class TraceBuilder {
 public:
  TraceBuilder(AlgebraicField field, std::vector<Item> initial);
  /// Builder whose initial items are the given cylinders with ids 0, 1, ...
  static TraceBuilder from_cylinders(const AlgebraicField& field, const std::vector<Cylinder>& items);

  std::vector<ItemId> apply(Move m);
  const TraceState& state() const { return state_; }
  std::size_t move_count() const { return trace_.moves.size(); }
  Trace finish() const;

 private:
  TraceState state_;
  Trace trace_;
};

/// Same labels and values as multisets, ids ignored.
bool same_labeled_multiset(const std::vector<Item>& x, const std::vector<Item>& y);

struct NormalizedTrace {
  Trace trace;
  /// Moves [0, split_count) are tree splits; the rest are merges.
  std::size_t split_count = 0;
  /// Original final id -> id of the corresponding item in `trace.final`.
  std::map<ItemId, ItemId> final_map;
};

/// Rewrites a tree-move trace into tree splits followed by merges using
/// (sum x_i) r = sum (x_i r) and likewise for 1 - r. Throws NonTreeMoveInA
/// for splits and FuelExhausted when more than `fuel` moves are emitted.
NormalizedTrace normalize_with_map(const Trace& t, const AlgebraicField& field, std::uint64_t fuel = kDefaultFuel);
Trace normalize_trace(const Trace& t, const AlgebraicField& field, std::uint64_t fuel = kDefaultFuel);

struct Extraction {
  TreePartition partition;
  /// Part index (position in traceB.initial) per partition leaf.
  std::vector<std::size_t> grouping;
};

/// traceA: tree moves from a single labeled item c. traceB: splits from the
/// parts of B. The tree-split prefix of normalized traceA is the tree
/// partition; merges and traceB ancestry give the leaf grouping. `matching`
/// pairs final A ids with final B ids; by default equal values are paired in
/// tree order on the A side and part order on the B side. Throws
/// FinalMultisetMismatch, NonTreeMoveInA or PartSumMismatch.
Extraction extract_refinement(const Trace& traceA, const Trace& traceB, const AlgebraicField& field,
                              const std::optional<std::vector<std::pair<ItemId, ItemId>>>& matching = std::nullopt,
                              const std::optional<Address>& root = std::nullopt,
                              std::uint64_t fuel = kDefaultFuel);

}  // namespace cantor
