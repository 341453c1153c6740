#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <optional>
#include <string>
#include <vector>

#include "cantor/cylinder.hpp"
#include "cantor/numberfield.hpp"
#include "cantor/rewrite.hpp"

namespace cantor {

// ---------------------------------------------------------------------------
// Macro moves

enum class MacroKind { TreeSplit, BarElim, SelmerSplit, EqB, EqC, EqD, EqE };

const char* macro_name(MacroKind k);

/// `count` applications of a macro to items labeled `target`.
struct MacroStep {
  MacroKind kind;
  Cylinder target;
  Integer count = 1;
};

/// Cylinders produced by one application. `n` is the Selmer exponent (only
/// used by BarElim and SelmerSplit). Throws InvalidArgument when the macro
/// does not apply to `target`.
std::vector<Cylinder> macro_output(MacroKind kind, const Cylinder& target, unsigned n = 0);

/// Relative leaf addresses of the eqa tree split.
const std::vector<std::string>& eqa_addresses();

/// The s-field of s = r^2 with r^4 + r - 1 = 0.
MinimalPolynomial r4s_minpoly();
bool is_r4s_field(const AlgebraicField& field);

// ---------------------------------------------------------------------------
// Canonical forms

struct Canonical {
  CylinderMultiset result;
  std::vector<MacroStep> steps;
  unsigned k = 0;
};

/// Largest exponent after every (a,b) is bar-eliminated to (a + n b, 0).
unsigned selmer_min_k(const CylinderMultiset& m, unsigned n);
/// Throws WindowTooSmall if k < selmer_min_k(m, n).
Canonical selmer_canonicalize(const CylinderMultiset& m, unsigned k, unsigned n);

/// Largest a after band reduction, at least 2.
unsigned r4s_min_k(const CylinderMultiset& m, std::uint64_t fuel = kDefaultFuel);
/// Band reduction, pumping with eqd/eqe and the final cleanup to the four
/// sizes at level k. Throws WindowTooSmall or FuelExhausted.
Canonical r4s_canonicalize(const CylinderMultiset& m, std::optional<unsigned> k = std::nullopt,
                           std::uint64_t fuel = kDefaultFuel);
/// The four canonical sizes at level k.
std::vector<Cylinder> r4s_support(unsigned k);

// ---------------------------------------------------------------------------
// Realizing plans as traces

enum class Side { Tree, Split };

/// Applies plan steps to a trace, choosing items by label (smallest id
/// first). On the tree side every macro becomes tree splits, merges and
/// rewrites; on the split side each application is a single move.
class Realizer {
 public:
  Realizer(TraceBuilder& builder, Side side, unsigned selmer_n = 0, std::uint64_t fuel = kDefaultFuel);

  void apply(const MacroStep& step);
  /// One application to a specific item; returns the created item ids.
  std::vector<ItemId> apply_once(MacroKind kind, ItemId item);

 private:
  ItemId take_labeled(const Cylinder& c);
  std::vector<ItemId> run(Move m);
  std::vector<ItemId> split_to(ItemId item, const std::vector<std::string>& leaves,
                               std::map<std::string, ItemId>& at);
  ItemId merge(const std::vector<ItemId>& items, const Cylinder& label);
  std::vector<ItemId> eqb(ItemId item);
  std::vector<ItemId> eqc(ItemId item);

  TraceBuilder& builder_;
  Side side_;
  unsigned n_;
  std::uint64_t fuel_;
  std::map<Cylinder, std::set<ItemId>> by_label_;
};

// ---------------------------------------------------------------------------
// Refinement

enum class StrategyKind { Selmer, R4Square, GenericSearch, Auto };

const char* strategy_name(StrategyKind k);
StrategyKind parse_strategy(const std::string& text);

struct SearchBounds {
  unsigned max_depth = 8;
  std::uint64_t fuel = kDefaultFuel;
};

struct Strategy {
  StrategyKind kind = StrategyKind::Auto;
  SearchBounds bounds;
  /// Budget for canonicalization, realization and normalization.
  std::uint64_t fuel = kDefaultFuel;
};

struct Refinement {
  TreePartition partition;
  std::vector<std::size_t> grouping;
  RefinementWitness witness;
  StrategyKind used = StrategyKind::GenericSearch;
  /// Common factor divided out of c and every part before the strategy ran.
  Cylinder scale;
  unsigned k = 0;
  std::optional<Trace> tree_trace;
  std::optional<Trace> split_trace;
};

/// Tree partition of the cylinder c refining the partition `parts`. Throws
/// SumMismatch, StrategyInapplicable, FuelExhausted or NotFoundWithinBounds.
Refinement refine_partition(const AlgebraicField& field, const Cylinder& c, const std::vector<Cylinder>& parts,
                            const Strategy& strategy = {});

/// Searches uniform depths n = 0..max_depth for counts p_ij. Throws
/// NotFoundWithinBounds or FuelExhausted.
Refinement generic_search(const AlgebraicField& field, const Cylinder& c, const std::vector<Cylinder>& parts,
                          const SearchBounds& bounds = {});
/// Same, for parts given as field values; each must be a cylinder size of
/// total exponent at most 64 (StrategyInapplicable otherwise).
Refinement generic_search_values(const AlgebraicField& field, const Cylinder& c,
                                 const std::vector<FieldElement>& parts, const SearchBounds& bounds = {});

/// A tree partition over `root` realizing the counts of `w`. Every part but
/// the largest is cut into the biggest whole subtrees its counts allow; the
/// largest part receives what is left.
std::pair<TreePartition, std::vector<std::size_t>> tree_from_witness(const Address& root,
                                                                     const RefinementWitness& w);

struct MeasureRefinement {
  TreePartition partition;
  std::vector<std::size_t> grouping;
  RefinementWitness witness;
};

/// Tree partition of the cylinder c into clopen cells of the given measures
/// (arbitrary field values summing to the size of c). The uniform depth search
/// runs first; when it fails the cells are dealt recursively to the halves of
/// c, one cell being cut at each node, and nodes left with two cells are
/// finished by balanced_witness. Throws SumMismatch or NotFoundWithinBounds.
MeasureRefinement refine_to_measures(const AlgebraicField& field, const Cylinder& c,
                                     const std::vector<FieldElement>& measures, const SearchBounds& bounds = {});

/// Counts splitting the cylinder c into cells of the given measures at one
/// uniform depth, built rather than searched. Every cell but the largest gets
/// roughly its share of each row, made exact with multiples of the minimal
/// polynomial; the largest takes the remaining leaves. Needs a monic minimal
/// polynomial with r and 1-r units, and integral measures. nullopt when that
/// fails or no depth up to max_depth works.
std::optional<RefinementWitness> balanced_witness(const AlgebraicField& field, const Cylinder& c,
                                                  const std::vector<FieldElement>& measures,
                                                  unsigned max_depth = 256);

// ---------------------------------------------------------------------------
// Rational parameters

struct ObstructionResult {
  bool refinable = false;
  /// Depth searched (refuted) or depth of the refinement found.
  unsigned depth = 0;
  std::optional<RefinementWitness> witness;
  std::optional<TreePartition> partition;
  std::vector<std::size_t> grouping;
};

inline constexpr unsigned kMaxObstructionDepth = 30;

/// Decides whether the partition of 1 given by `parts` (cylinder sizes for
/// the rational r) has a tree refinement of depth <= `depth`. Throws
/// DepthTooLarge above kMaxObstructionDepth.
ObstructionResult check_rational_obstruction(const Rational& r, const CylinderMultiset& parts, unsigned depth);

/// Visits every tree partition of the root with relative depth <= max_depth
/// (leaves as relative addresses). Throws DepthTooLarge above 5.
void for_each_tree_partition(unsigned max_depth, const std::function<void(const std::vector<std::string>&)>& visit);

/// Number of tree partitions of depth <= d, indexed by the number of leaves
/// without a zero, for d = 0..max_depth.
std::vector<std::map<unsigned, Integer>> all_ones_leaf_histogram(unsigned max_depth);

}  // namespace cantor
