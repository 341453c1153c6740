#include "cantor/certificate.hpp"

#include "cantor/error.hpp"

namespace cantor {

using json_io::Json;

Certificate make_certificate(const AlgebraicField& field, const RootInterval& root, const Cylinder& c,
                             const std::vector<Cylinder>& parts, const Refinement& ref) {
  return Certificate{field.minpoly(), root, c, parts, strategy_name(ref.used), ref.scale, ref.k,
                     ref.partition, ref.grouping, ref.witness, ref.tree_trace, ref.split_trace};
}

Json certificate_json(const Certificate& cert) {
  Json grouping = Json::array();
  for (auto g : cert.grouping) grouping.push_back(g);
  Json trace = nullptr;
  if (cert.tree_trace && cert.split_trace)
    trace = {{"tree", json_io::trace(*cert.tree_trace)}, {"split", json_io::trace(*cert.split_trace)}};
  return {{"field", {{"minpoly", cert.minpoly.to_string()},
                     {"root", {json_io::rational(cert.root.lo), json_io::rational(cert.root.hi)}}}},
          {"cylinder", json_io::cylinder(cert.cylinder)},
          {"parts", json_io::cylinders(cert.parts)},
          {"strategy", cert.strategy},
          {"scale", json_io::cylinder(cert.scale)},
          {"k", cert.k},
          {"partition", json_io::partition(cert.partition)},
          {"grouping", grouping},
          {"witness", json_io::witness(cert.witness)},
          {"trace", trace}};
}

namespace {

const Json& at(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::ParseError, std::string("certificate lacks \"") + key + "\"");
  return j.at(key);
}

}  // namespace

Certificate read_certificate(const Json& j) {
  const Json& f = at(j, "field");
  const Json& root = at(f, "root");
  if (!root.is_array() || root.size() != 2) throw Error(ErrorCode::ParseError, "root must be [lo, hi]");
  const Json& minpoly = at(f, "minpoly");
  if (!minpoly.is_string()) throw Error(ErrorCode::ParseError, "minpoly must be a string");
  Certificate cert{MinimalPolynomial::parse(minpoly.get<std::string>()),
                   {json_io::read_rational(root[0]), json_io::read_rational(root[1])},
                   json_io::read_cylinder(at(j, "cylinder")),
                   json_io::read_cylinders(at(j, "parts")),
                   {},
                   json_io::read_cylinder(at(j, "scale")),
                   0,
                   json_io::read_partition(at(j, "partition")),
                   {},
                   json_io::read_witness(at(j, "witness")),
                   std::nullopt,
                   std::nullopt};
  const Json& strategy = at(j, "strategy");
  if (!strategy.is_string()) throw Error(ErrorCode::ParseError, "strategy must be a string");
  cert.strategy = strategy.get<std::string>();
  const Json& k = at(j, "k");
  if (!k.is_number_unsigned()) throw Error(ErrorCode::ParseError, "k must be a nonnegative integer");
  cert.k = k.get<unsigned>();
  const Json& grouping = at(j, "grouping");
  if (!grouping.is_array()) throw Error(ErrorCode::ParseError, "grouping must be an array");
  for (const auto& g : grouping) {
    if (!g.is_number_unsigned()) throw Error(ErrorCode::ParseError, "grouping entries must be part indices");
    cert.grouping.push_back(g.get<std::size_t>());
  }
  const Json& trace = at(j, "trace");
  if (!trace.is_null()) {
    auto field = AlgebraicField::make(cert.minpoly, cert.root.lo, cert.root.hi);
    cert.tree_trace = json_io::read_trace(at(trace, "tree"), field);
    cert.split_trace = json_io::read_trace(at(trace, "split"), field);
  }
  return cert;
}

std::string serialize(const Certificate& cert) { return certificate_json(cert).dump(2) + "\n"; }

Certificate deserialize(const std::string& text) { return read_certificate(json_io::parse(text)); }

namespace {

[[noreturn]] void reject(const std::string& why) { throw Error(ErrorCode::InvalidCertificate, why); }

// Runs a check, turning any library error into a rejection.
template <class F>
void expect(const std::string& what, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    reject(what + ": " + e.what());
  }
}

}  // namespace

void verify_certificate(const Certificate& cert) {
  std::optional<AlgebraicField> made;
  expect("field", [&] { made = AlgebraicField::make(cert.minpoly, cert.root.lo, cert.root.hi); });
  const AlgebraicField& field = *made;
  const Cylinder& c = cert.cylinder;
  const std::size_t m = cert.parts.size();
  if (m == 0) reject("no parts");

  const FieldElement whole = field.eval_cylinder(c.a, c.b);
  FieldElement total = field.zero();
  for (const auto& p : cert.parts) total += field.eval_cylinder(p.a, p.b);
  if (total != whole) reject("parts do not sum to the cylinder");

  // The partition.
  if (cert.partition.root.size() != c) reject("partition root " + cert.partition.root.bits() + " does not have the size of the cylinder");
  expect("partition", [&] { validate_tree_partition(cert.partition); });
  if (cert.grouping.size() != cert.partition.leaves.size()) reject("grouping length differs from the number of leaves");
  std::vector<FieldElement> got(m, field.zero());
  for (std::size_t k = 0; k < cert.grouping.size(); ++k) {
    if (cert.grouping[k] >= m) reject("grouping names part " + std::to_string(cert.grouping[k]));
    Cylinder rel = cert.partition.leaves[k].relative_to(cert.partition.root).size();
    got[cert.grouping[k]] += field.eval_cylinder(c.a + rel.a, c.b + rel.b);
  }
  for (std::size_t j = 0; j < m; ++j)
    if (got[j] != field.eval_cylinder(cert.parts[j].a, cert.parts[j].b))
      reject("leaves of part " + std::to_string(j) + " do not sum to it");

  // The witness: row sums, column sums, and agreement with the partition
  // expanded to depth n.
  const RefinementWitness& w = cert.witness;
  const unsigned n = w.n;
  if (w.p.size() != n + 1) reject("witness has " + std::to_string(w.p.size()) + " rows, expected " + std::to_string(n + 1));
  std::vector<std::vector<Integer>> expect_p(n + 1, std::vector<Integer>(m, 0));
  for (std::size_t k = 0; k < cert.grouping.size(); ++k) {
    Cylinder rel = cert.partition.leaves[k].relative_to(cert.partition.root).size();
    if (rel.length() > n) reject("witness depth is below the depth of the partition");
    const unsigned rest = n - rel.length();
    for (unsigned t = 0; t <= rest; ++t) expect_p[rel.a + t][cert.grouping[k]] += binomial(rest, t);
  }
  for (unsigned i = 0; i <= n; ++i) {
    if (w.p[i].size() != m) reject("witness row " + std::to_string(i) + " has the wrong width");
    Integer row = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (w.p[i][j] < 0) reject("negative witness entry");
      row += w.p[i][j];
    }
    if (row != binomial(n, i)) reject("witness row " + std::to_string(i) + " does not sum to C(n,i)");
  }
  for (std::size_t j = 0; j < m; ++j) {
    FieldElement col = field.zero();
    for (unsigned i = 0; i <= n; ++i)
      if (w.p[i][j] != 0) col += field.eval_cylinder(c.a + i, c.b + n - i) * Rational(w.p[i][j]);
    if (col != field.eval_cylinder(cert.parts[j].a, cert.parts[j].b))
      reject("witness column " + std::to_string(j) + " does not sum to its part");
  }
  if (w.p != expect_p) reject("witness does not match the partition");

  // Traces, when present: replay, re-extract and compare.
  if (cert.tree_trace.has_value() != cert.split_trace.has_value()) reject("only one of the two traces is present");
  if (!cert.tree_trace) return;
  const Cylinder g = cert.scale;
  if (g.a > c.a || g.b > c.b) reject("scale does not divide the cylinder");
  for (const auto& p : cert.parts)
    if (g.a > p.a || g.b > p.b) reject("scale does not divide every part");
  const Trace& ta = *cert.tree_trace;
  const Trace& tb = *cert.split_trace;
  if (ta.initial.size() != 1 || ta.initial[0].label != Cylinder{c.a - g.a, c.b - g.b})
    reject("tree trace does not start from the scaled cylinder");
  if (tb.initial.size() != m) reject("split trace does not start from the parts");
  for (std::size_t j = 0; j < m; ++j)
    if (tb.initial[j].label != Cylinder{cert.parts[j].a - g.a, cert.parts[j].b - g.b})
      reject("split trace item " + std::to_string(j) + " is not the scaled part");
  Extraction ex{{}, {}};
  expect("tree trace", [&] { replay(ta, field); });
  expect("split trace", [&] { replay(tb, field); });
  expect("extraction", [&] { ex = extract_refinement(ta, tb, field); });
  const Address root = cert.partition.root;
  for (auto& leaf : ex.partition.leaves) leaf = root.concat(leaf.relative_to(ex.partition.root));
  ex.partition.root = root;
  coarsen(ex.partition, ex.grouping);
  if (ex.partition.leaves != cert.partition.leaves || ex.grouping != cert.grouping)
    reject("traces do not reproduce the partition");
}

}  // namespace cantor
