#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "cantor/binomial.hpp"
#include "cantor/cylinder.hpp"
#include "cantor/homeo.hpp"
#include "cantor/numberfield.hpp"
#include "cantor/rewrite.hpp"

namespace cantor::json_io {

using Json = nlohmann::json;

// Readers throw ParseError on malformed input. Integers are written as JSON
// numbers when they fit in 64 bits and as decimal strings otherwise; readers
// accept both.

Json integer(const Integer& x);
Integer read_integer(const Json& j);

Json rational(const Rational& q);
Rational read_rational(const Json& j);

/// {"coeffs": ["c0", "c1", ...]}
Json field_element(const FieldElement& x);
FieldElement read_field_element(const Json& j, const AlgebraicField& field);

/// {"a": int, "b": int}
Json cylinder(const Cylinder& c);
Cylinder read_cylinder(const Json& j);

std::vector<Cylinder> read_cylinders(const Json& j);
Json cylinders(const std::vector<Cylinder>& cs);

/// [{"a": int, "b": int, "mult": int}, ...]
Json multiset(const CylinderMultiset& m);
CylinderMultiset read_multiset(const Json& j);

/// {"root": "bits", "leaves": ["bits", ...]}
Json partition(const TreePartition& t);
TreePartition read_partition(const Json& j);

/// {"n": int, "p": [[int, ...], ...]}
Json witness(const RefinementWitness& w);
RefinementWitness read_witness(const Json& j);

/// {"n": int, "a": [int, ...]}
Json rep(const BinomialRep& r);
BinomialRep read_rep(const Json& j);

/// {"id": int, "label": {"a","b"} | null, "value": FieldElement}
Json item(const Item& x);
Item read_item(const Json& j, const AlgebraicField& field);

/// {"kind": "tree_split" | "merge" | "split" | "rewrite", ...}
Json move(const Move& m);
Move read_move(const Json& j, const AlgebraicField& field);

/// {"initial": [...], "moves": [...], "final": [...]}
Json trace(const Trace& t);
Trace read_trace(const Json& j, const AlgebraicField& field);

/// {"src": ["bits", ...], "dst": [...], "measure_r": FieldElement, "measure_s": FieldElement}
Json table_row(const TableRow& row);
TableRow read_table_row(const Json& j, const AlgebraicField& r_field, const AlgebraicField& s_field);

/// Parses text, reporting syntax errors as ParseError.
Json parse(const std::string& text);

}  // namespace cantor::json_io
