#include "cantor/json_io.hpp"

#include <limits>

#include "cantor/error.hpp"

namespace cantor::json_io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field_of(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object with \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing \"") + key + "\"");
  return *it;
}

const Json& array_of(const Json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  return j;
}

std::uint32_t small(const Json& j, const char* what) {
  Integer x = read_integer(j);
  if (x < 0 || x > std::numeric_limits<std::uint32_t>::max()) bad(std::string(what) + " out of range");
  return static_cast<std::uint32_t>(x.get_ui());
}

ItemId read_id(const Json& j) {
  if (!j.is_number_unsigned()) bad("item ids must be nonnegative integers");
  return j.get<ItemId>();
}

Address read_address(const Json& j) {
  if (!j.is_string()) bad("addresses must be bit strings");
  try {
    return Address(j.get<std::string>());
  } catch (const Error& e) {
    bad(e.what());
  }
}

std::string str(const Json& j, const char* what) {
  if (!j.is_string()) bad(std::string(what) + " must be a string");
  return j.get<std::string>();
}

}  // namespace

Json integer(const Integer& x) {
  if (x.fits_slong_p()) return static_cast<std::int64_t>(x.get_si());
  return x.get_str();
}

Integer read_integer(const Json& j) {
  if (j.is_number_unsigned()) return Integer(std::to_string(j.get<std::uint64_t>()));
  if (j.is_number_integer()) return Integer(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) {
    Integer x;
    if (x.set_str(j.get<std::string>(), 10) != 0) bad("not an integer: " + j.get<std::string>());
    return x;
  }
  bad("expected an integer");
}

Json rational(const Rational& q) { return to_string(q); }

Rational read_rational(const Json& j) {
  try {
    return parse_rational(str(j, "rationals"));
  } catch (const Error& e) {
    bad(e.what());
  }
}

Json field_element(const FieldElement& x) {
  Json coeffs = Json::array();
  for (const auto& c : x.coeffs()) coeffs.push_back(rational(c));
  return {{"coeffs", coeffs}};
}

FieldElement read_field_element(const Json& j, const AlgebraicField& field) {
  std::vector<Rational> coeffs;
  for (const auto& c : array_of(field_of(j, "coeffs"), "coeffs")) coeffs.push_back(read_rational(c));
  if (coeffs.size() > static_cast<std::size_t>(field.degree())) bad("more coefficients than the field degree");
  coeffs.resize(field.degree(), Rational(0));
  FieldElement x = field.element(coeffs);
  if (x.coeffs() != coeffs) bad("field element not in reduced form");
  return x;
}

Json cylinder(const Cylinder& c) { return {{"a", c.a}, {"b", c.b}}; }

Cylinder read_cylinder(const Json& j) { return {small(field_of(j, "a"), "a"), small(field_of(j, "b"), "b")}; }

Json cylinders(const std::vector<Cylinder>& cs) {
  Json out = Json::array();
  for (const auto& c : cs) out.push_back(cylinder(c));
  return out;
}

std::vector<Cylinder> read_cylinders(const Json& j) {
  std::vector<Cylinder> out;
  for (const auto& c : array_of(j, "cylinder list")) out.push_back(read_cylinder(c));
  return out;
}

Json multiset(const CylinderMultiset& m) {
  Json out = Json::array();
  for (const auto& [c, mult] : m) out.push_back({{"a", c.a}, {"b", c.b}, {"mult", integer(mult)}});
  return out;
}

CylinderMultiset read_multiset(const Json& j) {
  CylinderMultiset m;
  for (const auto& e : array_of(j, "multiset")) {
    Integer mult = read_integer(field_of(e, "mult"));
    if (mult <= 0) bad("multiplicities must be positive");
    m.add(read_cylinder(e), mult);
  }
  return m;
}

Json partition(const TreePartition& t) {
  Json leaves = Json::array();
  for (const auto& l : t.leaves) leaves.push_back(l.bits());
  return {{"root", t.root.bits()}, {"leaves", leaves}};
}

TreePartition read_partition(const Json& j) {
  TreePartition t;
  t.root = read_address(field_of(j, "root"));
  for (const auto& l : array_of(field_of(j, "leaves"), "leaves")) t.leaves.push_back(read_address(l));
  return t;
}

Json witness(const RefinementWitness& w) {
  Json rows = Json::array();
  for (const auto& row : w.p) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(integer(x));
    rows.push_back(r);
  }
  return {{"n", w.n}, {"p", rows}};
}

RefinementWitness read_witness(const Json& j) {
  RefinementWitness w;
  w.n = small(field_of(j, "n"), "n");
  for (const auto& row : array_of(field_of(j, "p"), "p")) {
    std::vector<Integer> r;
    for (const auto& x : array_of(row, "witness row")) r.push_back(read_integer(x));
    w.p.push_back(std::move(r));
  }
  return w;
}

Json rep(const BinomialRep& r) {
  Json a = Json::array();
  for (const auto& x : r.a) a.push_back(integer(x));
  return {{"n", r.n}, {"a", a}};
}

BinomialRep read_rep(const Json& j) {
  BinomialRep r;
  r.n = small(field_of(j, "n"), "n");
  for (const auto& x : array_of(field_of(j, "a"), "a")) r.a.push_back(read_integer(x));
  return r;
}

Json item(const Item& x) {
  return {{"id", x.id}, {"label", x.label ? cylinder(*x.label) : Json(nullptr)}, {"value", field_element(x.value)}};
}

Item read_item(const Json& j, const AlgebraicField& field) {
  Item x{read_id(field_of(j, "id")), std::nullopt, read_field_element(field_of(j, "value"), field)};
  const Json& label = field_of(j, "label");
  if (!label.is_null()) x.label = read_cylinder(label);
  return x;
}

Json move(const Move& m) {
  Json out{{"kind", move_kind(m)}};
  std::visit(
      [&](const auto& mv) {
        using T = std::decay_t<decltype(mv)>;
        if constexpr (std::is_same_v<T, TreeSplitMove>) {
          out["item"] = mv.item;
        } else if constexpr (std::is_same_v<T, MergeMove>) {
          out["items"] = mv.items;
          out["value"] = field_element(mv.value);
          out["label"] = mv.label ? cylinder(*mv.label) : Json(nullptr);
        } else if constexpr (std::is_same_v<T, SplitMove>) {
          out["item"] = mv.item;
          out["parts"] = cylinders(mv.parts);
        } else {
          out["item"] = mv.item;
          out["to"] = cylinder(mv.to);
        }
      },
      m);
  return out;
}

Move read_move(const Json& j, const AlgebraicField& field) {
  const std::string kind = str(field_of(j, "kind"), "kind");
  if (kind == "tree_split") return TreeSplitMove{read_id(field_of(j, "item"))};
  if (kind == "merge") {
    MergeMove m{{}, read_field_element(field_of(j, "value"), field), std::nullopt};
    for (const auto& id : array_of(field_of(j, "items"), "items")) m.items.push_back(read_id(id));
    const Json& label = field_of(j, "label");
    if (!label.is_null()) m.label = read_cylinder(label);
    return m;
  }
  if (kind == "split") return SplitMove{read_id(field_of(j, "item")), read_cylinders(field_of(j, "parts"))};
  if (kind == "rewrite") return RewriteMove{read_id(field_of(j, "item")), read_cylinder(field_of(j, "to"))};
  bad("unknown move kind \"" + kind + "\"");
}

Json trace(const Trace& t) {
  Json initial = Json::array(), moves = Json::array(), final = Json::array();
  for (const auto& x : t.initial) initial.push_back(item(x));
  for (const auto& m : t.moves) moves.push_back(move(m));
  for (const auto& x : t.final) final.push_back(item(x));
  return {{"initial", initial}, {"moves", moves}, {"final", final}};
}

Trace read_trace(const Json& j, const AlgebraicField& field) {
  Trace t;
  for (const auto& x : array_of(field_of(j, "initial"), "initial")) t.initial.push_back(read_item(x, field));
  for (const auto& m : array_of(field_of(j, "moves"), "moves")) t.moves.push_back(read_move(m, field));
  for (const auto& x : array_of(field_of(j, "final"), "final")) t.final.push_back(read_item(x, field));
  return t;
}

Json table_row(const TableRow& row) {
  Json src = Json::array(), dst = Json::array();
  for (const auto& a : row.src) src.push_back(a.bits());
  for (const auto& a : row.dst) dst.push_back(a.bits());
  return {{"src", src}, {"dst", dst}, {"measure_r", field_element(row.measure_r)}, {"measure_s", field_element(row.measure_s)}};
}

TableRow read_table_row(const Json& j, const AlgebraicField& r_field, const AlgebraicField& s_field) {
  TableRow row{{}, {}, read_field_element(field_of(j, "measure_r"), r_field),
               read_field_element(field_of(j, "measure_s"), s_field)};
  for (const auto& a : array_of(field_of(j, "src"), "src")) row.src.push_back(read_address(a));
  for (const auto& a : array_of(field_of(j, "dst"), "dst")) row.dst.push_back(read_address(a));
  return row;
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    bad(e.what());
  }
}

}  // namespace cantor::json_io
