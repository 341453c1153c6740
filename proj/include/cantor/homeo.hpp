#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cantor/binomial.hpp"
#include "cantor/cylinder.hpp"
#include "cantor/numberfield.hpp"
#include "cantor/refiner.hpp"

namespace cantor {

/// Disjoint union of cylinders.
struct ClopenCell {
  std::vector<Address> addresses;

  bool operator==(const ClopenCell&) const = default;
};

/// Measure of a cell under the product measure of the field's root.
FieldElement cell_measure(const ClopenCell& cell, const AlgebraicField& field);

/// Partitions P (r side) and Q (s side) with pi(p[i]) = q[i].
struct HomeoStage {
  unsigned index = 0;
  std::vector<ClopenCell> p;
  std::vector<ClopenCell> q;
};

/// Everything the construction needs about the pair (r, s).
struct HomeoSetup {
  AlgebraicField r_field;
  AlgebraicField s_field;
  /// Q(s) -> Q(r); measures are compared in the r-field.
  FieldEmbedding s_to_r;
  /// r as a binomial combination in s, and s in r.
  BinomialRep r_in_s;
  BinomialRep s_in_r;
  Strategy r_strategy;
  Strategy s_strategy;
  /// Budget of the direct search for cells of prescribed measure; the
  /// per-cylinder refinement with the strategies above is the fallback.
  SearchBounds cell_bounds{12, 200'000};

  /// The pair r = s with identity representations.
  static HomeoSetup identity(const AlgebraicField& field, const Strategy& strategy = {});
};

HomeoStage init_stage();

/// Stage index+1 from stage index: odd targets refine the r side, even
/// targets the s side. Throws RefinementFailed or MeasureMismatch.
HomeoStage advance_stage(const HomeoStage& stage, const HomeoSetup& setup);

/// Throws MeasureMismatch, PrefixViolation, IncompletenessGap or
/// InvalidArgument naming the broken property.
void verify_stage(const HomeoStage& stage, const HomeoSetup& setup);
/// Refinement chains and pi-compatibility of `next` over `prev`.
void verify_refines(const HomeoStage& prev, const HomeoStage& next);

struct StageSummary {
  unsigned index = 0;
  std::size_t cells = 0;
  std::size_t p_cylinders = 0;
  std::size_t q_cylinders = 0;
  double seconds = 0;
};

/// Stages 0..depth, each verified against its predecessor. `progress` (if
/// set) is called after each stage.
std::vector<HomeoStage> build(const HomeoSetup& setup, unsigned depth,
                              const std::function<void(const StageSummary&)>& progress = {});

struct TableRow {
  std::vector<Address> src;
  std::vector<Address> dst;
  FieldElement measure_r;
  FieldElement measure_s;
};

std::vector<TableRow> export_table(const HomeoStage& stage, const HomeoSetup& setup);

/// Bit flip: mu(r) to mu(1-r), both measured in the field of r.
std::vector<TableRow> complement_map(const AlgebraicField& field);
/// Follows rows of `first` by rows of `second`; second's sources must be
/// first's destinations.
std::vector<TableRow> compose(const std::vector<TableRow>& first, const std::vector<TableRow>& second);

}  // namespace cantor
