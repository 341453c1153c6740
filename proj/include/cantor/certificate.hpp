#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cantor/cylinder.hpp"
#include "cantor/json_io.hpp"
#include "cantor/numberfield.hpp"
#include "cantor/refiner.hpp"

namespace cantor {

/// A tree refinement of the partition `parts` of the cylinder `cylinder`,
/// self-contained: it names its field by minimal polynomial and isolating
/// interval and carries the traces when a rewriting strategy produced it.
struct Certificate {
  MinimalPolynomial minpoly;
  RootInterval root;
  Cylinder cylinder;
  std::vector<Cylinder> parts;
  std::string strategy;
  Cylinder scale;
  unsigned k = 0;
  TreePartition partition;
  std::vector<std::size_t> grouping;
  RefinementWitness witness;
  /// Traces run on cylinder/scale and parts/scale.
  std::optional<Trace> tree_trace;
  std::optional<Trace> split_trace;
};

Certificate make_certificate(const AlgebraicField& field, const RootInterval& root, const Cylinder& c,
                             const std::vector<Cylinder>& parts, const Refinement& ref);

json_io::Json certificate_json(const Certificate& cert);
/// Throws ParseError (or the field errors for a bad interval).
Certificate read_certificate(const json_io::Json& j);

std::string serialize(const Certificate& cert);
Certificate deserialize(const std::string& text);

/// Re-checks everything from scratch: sums, the tree partition, the grouping,
/// the witness against the uniformized partition, and when present replays
/// both traces and re-extracts the partition. Throws InvalidCertificate with
/// the reason.
void verify_certificate(const Certificate& cert);

}  // namespace cantor
