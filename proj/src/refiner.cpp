#include <algorithm>

#include "cantor/error.hpp"
#include "cantor/refiner.hpp"

namespace cantor {

const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Selmer: return "selmer";
    case StrategyKind::R4Square: return "r4s";
    case StrategyKind::GenericSearch: return "search";
    case StrategyKind::Auto: return "auto";
  }
  return "?";
}

StrategyKind parse_strategy(const std::string& text) {
  if (text == "selmer") return StrategyKind::Selmer;
  if (text == "r4s") return StrategyKind::R4Square;
  if (text == "search") return StrategyKind::GenericSearch;
  if (text == "auto") return StrategyKind::Auto;
  throw Error(ErrorCode::InvalidArgument, "unknown strategy \"" + text + "\" (selmer, r4s, search, auto)");
}

namespace {

Refinement trivial_refinement(const Cylinder& c, StrategyKind used) {
  Refinement out;
  out.partition.root = Address::canonical(c);
  out.partition.leaves = {out.partition.root};
  out.grouping = {0};
  out.witness.n = 0;
  out.witness.p = {{Integer(1)}};
  out.used = used;
  return out;
}

Cylinder common_factor(const Cylinder& c, const std::vector<Cylinder>& parts) {
  Cylinder g = c;
  for (const auto& p : parts) g = {std::min(g.a, p.a), std::min(g.b, p.b)};
  return g;
}

Cylinder divide(const Cylinder& x, const Cylinder& g) { return {x.a - g.a, x.b - g.b}; }

// Moves every leaf from the extraction root onto the canonical address of c,
// coarsens, and checks the witness against the original parts.
void finish(Refinement& out, const Cylinder& c, const std::vector<Cylinder>& parts, const AlgebraicField& field) {
  Address root = Address::canonical(c);
  for (auto& leaf : out.partition.leaves) leaf = root.concat(leaf.relative_to(out.partition.root));
  out.partition.root = root;
  coarsen(out.partition, out.grouping);
  validate_tree_partition(out.partition);
  out.witness = witness_from_grouping(out.partition, out.grouping, parts, field);
}

Refinement rewriting_strategy(const AlgebraicField& field, const Cylinder& c, const std::vector<Cylinder>& parts,
                          StrategyKind kind, std::uint64_t fuel) {
  const Cylinder g = common_factor(c, parts);
  const Cylinder whole = divide(c, g);
  std::vector<Cylinder> scaled;
  for (const auto& p : parts) scaled.push_back(divide(p, g));
  CylinderMultiset a_side{{whole, 1}};
  CylinderMultiset b_side = CylinderMultiset::from_list(scaled);

  unsigned n = 0;
  Canonical ca, cb;
  if (kind == StrategyKind::Selmer) {
    auto sn = field.selmer_exponent();
    if (!sn) throw Error(ErrorCode::StrategyInapplicable, "selmer strategy needs a field x^n+x-1");
    n = *sn;
    unsigned k = std::max(selmer_min_k(a_side, n), selmer_min_k(b_side, n));
    ca = selmer_canonicalize(a_side, k, n);
    cb = selmer_canonicalize(b_side, k, n);
  } else {
    if (!is_r4s_field(field)) throw Error(ErrorCode::StrategyInapplicable, "r4s strategy needs the field x^4-2x^2-x+1");
    unsigned k = std::max(r4s_min_k(a_side, fuel), r4s_min_k(b_side, fuel));
    ca = r4s_canonicalize(a_side, k, fuel);
    cb = r4s_canonicalize(b_side, k, fuel);
  }
  if (!(ca.result == cb.result))
    throw Error(ErrorCode::FinalMultisetMismatch, "canonical forms differ: " + ca.result.to_string() + " vs " + cb.result.to_string());

  TraceBuilder ta = TraceBuilder::from_cylinders(field, {whole});
  Realizer ra(ta, Side::Tree, n, fuel);
  for (const auto& step : ca.steps) ra.apply(step);
  TraceBuilder tb = TraceBuilder::from_cylinders(field, scaled);
  Realizer rb(tb, Side::Split, n, fuel);
  for (const auto& step : cb.steps) rb.apply(step);

  Refinement out;
  out.tree_trace = ta.finish();
  out.split_trace = tb.finish();
  Extraction ex = extract_refinement(*out.tree_trace, *out.split_trace, field, std::nullopt, std::nullopt, fuel);
  out.partition = std::move(ex.partition);
  out.grouping = std::move(ex.grouping);
  out.used = kind;
  out.scale = g;
  out.k = ca.k;
  finish(out, c, parts, field);
  return out;
}

}  // namespace

Refinement refine_partition(const AlgebraicField& field, const Cylinder& c, const std::vector<Cylinder>& parts,
                            const Strategy& strategy) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "partition has no parts");
  if (list_sum(parts, field) != field.eval_cylinder(c.a, c.b))
    throw Error(ErrorCode::SumMismatch, "parts do not sum to " + to_string(c));
  // With two or more positive parts of the right total each part is strictly
  // smaller than c; a single part must be c itself.
  if (parts.size() == 1) return trivial_refinement(c, strategy.kind);

  switch (strategy.kind) {
    case StrategyKind::Selmer:
    case StrategyKind::R4Square:
      return rewriting_strategy(field, c, parts, strategy.kind, strategy.fuel);
    case StrategyKind::GenericSearch:
      return generic_search(field, c, parts, strategy.bounds);
    case StrategyKind::Auto: break;
  }
  // Small uniform trees first: they are what the back-and-forth tables want,
  // and the rewriting strategies blow up on deep pieces.
  SearchBounds quick{strategy.bounds.max_depth, std::min<std::uint64_t>(strategy.bounds.fuel, 200'000)};
  try {
    return generic_search(field, c, parts, quick);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFoundWithinBounds && e.code() != ErrorCode::FuelExhausted) throw;
  }
  if (field.selmer_exponent()) return rewriting_strategy(field, c, parts, StrategyKind::Selmer, strategy.fuel);
  // Dealing cells by measure is constructive and cheap where it applies.
  try {
    std::vector<FieldElement> measures;
    for (const auto& p : parts) measures.push_back(field.eval_cylinder(p.a, p.b));
    MeasureRefinement m = refine_to_measures(field, c, measures, quick);
    Refinement out;
    out.partition = std::move(m.partition);
    out.grouping = std::move(m.grouping);
    out.used = StrategyKind::GenericSearch;
    validate_tree_partition(out.partition);
    out.witness = witness_from_grouping(out.partition, out.grouping, parts, field);
    out.k = out.witness.n;
    return out;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFoundWithinBounds && e.code() != ErrorCode::FuelExhausted) throw;
  }
  if (is_r4s_field(field)) return rewriting_strategy(field, c, parts, StrategyKind::R4Square, strategy.fuel);
  return generic_search(field, c, parts, strategy.bounds);
}

}  // namespace cantor
