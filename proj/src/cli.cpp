#include "cantor/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cantor/binomial.hpp"
#include "cantor/certificate.hpp"
#include "cantor/error.hpp"
#include "cantor/homeo.hpp"
#include "cantor/json_io.hpp"
#include "cantor/refiner.hpp"

namespace cantor::cli {

using json_io::Json;

namespace {

std::uint32_t parse_exponent(const std::string& text) {
  if (text.empty() || text.size() > 9 || !std::all_of(text.begin(), text.end(), ::isdigit))
    throw Error(ErrorCode::ParseError, "bad exponent \"" + text + "\"");
  return static_cast<std::uint32_t>(std::stoul(text));
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

Cylinder parse_cylinder(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "cylinder must be \"a,b\", got \"" + text + "\"");
  return {parse_exponent(trim(text.substr(0, comma))), parse_exponent(trim(text.substr(comma + 1)))};
}

std::vector<Cylinder> parse_parts(const std::string& text) {
  std::vector<Cylinder> out;
  std::stringstream in(text);
  std::string entry;
  while (std::getline(in, entry, ';')) {
    entry = trim(entry);
    if (entry.empty()) throw Error(ErrorCode::ParseError, "empty entry in \"" + text + "\"");
    std::uint32_t times = 1;
    if (auto star = entry.find('*'); star != std::string::npos) {
      times = parse_exponent(trim(entry.substr(star + 1)));
      if (times == 0 || times > 100000) throw Error(ErrorCode::ParseError, "bad multiplicity in \"" + entry + "\"");
      entry = entry.substr(0, star);
    }
    Cylinder c = parse_cylinder(entry);
    out.insert(out.end(), times, c);
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "no parts given");
  return out;
}

namespace {

// A usage error found while reading flag values.
struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string minpoly, root = "0,1", cyl = "0,0", parts, strategy = "auto";
  std::string r, s, target, in, out;
  bool json = false;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> fuel;
  std::optional<unsigned> depth;
  unsigned nmax = 4;
};

RootInterval parse_root(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw Usage("--root must be \"lo,hi\"");
  try {
    return {parse_rational(trim(text.substr(0, comma))), parse_rational(trim(text.substr(comma + 1)))};
  } catch (const Error& e) {
    throw Usage(std::string("--root: ") + e.what());
  }
}

MinimalPolynomial parse_minpoly(const std::string& text, const char* flag) {
  if (text.empty()) throw Usage(std::string(flag) + " is required");
  try {
    return MinimalPolynomial::parse(text);
  } catch (const Error& e) {
    throw Usage(std::string(flag) + ": " + e.what());
  }
}

template <class T, class F>
T flag_value(const char* flag, F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    throw Usage(std::string(flag) + ": " + e.what());
  }
}

std::uint64_t default_fuel(const Options& o) {
  if (o.fuel) return *o.fuel;
  if (const char* env = std::getenv("CANTOR_FUEL")) {
    std::string v = env;
    if (v.empty() || !std::all_of(v.begin(), v.end(), ::isdigit) || v.size() > 18)
      throw Usage("CANTOR_FUEL must be a positive integer");
    const std::uint64_t fuel = std::stoull(v);
    if (fuel == 0) throw Usage("CANTOR_FUEL must be a positive integer");
    return fuel;
  }
  return kDefaultFuel;
}

AlgebraicField make_field(const MinimalPolynomial& m, const RootInterval& root) {
  return AlgebraicField::make(m, root.lo, root.hi);
}

std::string approx(double x) {
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

std::string steps_text(const std::vector<MacroStep>& steps) {
  std::ostringstream s;
  for (const auto& st : steps) s << "  " << macro_name(st.kind) << " " << to_string(st.target) << " x" << st.count.get_str() << "\n";
  return s.str();
}

Json steps_json(const std::vector<MacroStep>& steps) {
  Json out = Json::array();
  for (const auto& st : steps)
    out.push_back({{"macro", macro_name(st.kind)}, {"target", json_io::cylinder(st.target)}, {"count", json_io::integer(st.count)}});
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns a runnable closure after validating its flags.

using Action = std::function<int(std::ostream&, std::ostream&)>;

Action field_info(const Options& o) {
  auto m = parse_minpoly(o.minpoly, "--minpoly");
  auto root = parse_root(o.root);
  return [=](std::ostream& out, std::ostream&) {
    auto field = make_field(m, root);
    auto iv = field.root_interval();
    const char* irr = field.irreducibility() == Irreducibility::Irreducible ? "irreducible"
                      : field.irreducibility() == Irreducibility::Reducible ? "reducible"
                                                                             : "unverified";
    auto selmer = field.selmer_exponent();
    if (o.json) {
      out << Json{{"minpoly", m.to_string()},
                  {"degree", field.degree()},
                  {"root", {json_io::rational(iv.lo), json_io::rational(iv.hi)}},
                  {"approx", approx(field.approx_root())},
                  {"irreducibility", irr},
                  {"selmer_exponent", selmer ? Json(*selmer) : Json(nullptr)},
                  {"r4s", is_r4s_field(field)}}
                 .dump(2)
          << "\n";
    } else {
      out << "minpoly         " << m.to_string() << "\n"
          << "degree          " << field.degree() << "\n"
          << "root in         [" << to_string(iv.lo) << ", " << to_string(iv.hi) << "]\n"
          << "root            " << approx(field.approx_root()) << "\n"
          << "irreducibility  " << irr << "\n"
          << "selmer exponent " << (selmer ? std::to_string(*selmer) : "-") << "\n"
          << "r4s field       " << (is_r4s_field(field) ? "yes" : "no") << "\n";
    }
    return kOk;
  };
}

Action reduce_search(const Options& o) {
  auto m = parse_minpoly(o.minpoly, "--minpoly");
  auto root = parse_root(o.root);
  if (o.target.empty()) throw Usage("--target is required");
  auto target = flag_value<RatPoly>("--target", [&] { return poly::parse(o.target); });
  return [=](std::ostream& out, std::ostream&) {
    auto field = make_field(m, root);
    FieldElement t = field.reduce(target);
    auto rep = search_rep(t, o.nmax);
    if (o.json) {
      out << Json{{"target", json_io::field_element(t)}, {"found", rep.has_value()}, {"rep", rep ? json_io::rep(*rep) : Json(nullptr)}, {"nmax", o.nmax}}.dump(2) << "\n";
    } else if (!rep) {
      out << "no binomial representation with n <= " << o.nmax << "\n";
    } else {
      out << "n = " << rep->n << "\na =";
      for (const auto& x : rep->a) out << " " << x.get_str();
      out << "\n";
    }
    return kOk;
  };
}

Action canonical(const Options& o) {
  auto m = parse_minpoly(o.minpoly, "--minpoly");
  auto root = parse_root(o.root);
  if (o.parts.empty()) throw Usage("--parts is required");
  auto parts = flag_value<std::vector<Cylinder>>("--parts", [&] { return parse_parts(o.parts); });
  auto kind = flag_value<StrategyKind>("--strategy", [&] { return parse_strategy(o.strategy); });
  const std::uint64_t fuel = default_fuel(o);
  return [=](std::ostream& out, std::ostream&) {
    auto field = make_field(m, root);
    auto ms = CylinderMultiset::from_list(parts);
    Canonical c;
    auto use = kind;
    if (use == StrategyKind::Auto) use = field.selmer_exponent() ? StrategyKind::Selmer : StrategyKind::R4Square;
    if (use == StrategyKind::Selmer) {
      auto n = field.selmer_exponent();
      if (!n) throw Error(ErrorCode::NotSelmerField, field.describe());
      c = selmer_canonicalize(ms, o.depth.value_or(selmer_min_k(ms, *n)), *n);
    } else if (use == StrategyKind::R4Square) {
      if (!is_r4s_field(field)) throw Error(ErrorCode::StrategyInapplicable, "r4s needs the field x^4-2x^2-x+1");
      c = r4s_canonicalize(ms, o.depth, fuel);
    } else {
      throw Error(ErrorCode::StrategyInapplicable, "canonical forms exist for the selmer and r4s strategies only");
    }
    if (o.json) {
      out << Json{{"strategy", strategy_name(use)}, {"k", c.k}, {"result", json_io::multiset(c.result)}, {"steps", steps_json(c.steps)}}.dump(2) << "\n";
    } else {
      out << "strategy " << strategy_name(use) << ", k = " << c.k << "\n"
          << "canonical form " << c.result.to_string() << "\n"
          << c.steps.size() << " macro steps\n"
          << steps_text(c.steps);
    }
    return kOk;
  };
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorCode::InvalidArgument, "write to " + path + " failed");
}

Action refine(const Options& o) {
  auto m = parse_minpoly(o.minpoly, "--minpoly");
  auto root = parse_root(o.root);
  auto c = flag_value<Cylinder>("--cyl", [&] { return parse_cylinder(o.cyl); });
  if (o.parts.empty()) throw Usage("--parts is required");
  auto parts = flag_value<std::vector<Cylinder>>("--parts", [&] { return parse_parts(o.parts); });
  Strategy strategy;
  strategy.kind = flag_value<StrategyKind>("--strategy", [&] { return parse_strategy(o.strategy); });
  strategy.fuel = default_fuel(o);
  strategy.bounds = {o.depth.value_or(8), strategy.fuel};
  return [=](std::ostream& out, std::ostream&) {
    auto field = make_field(m, root);
    Refinement ref = refine_partition(field, c, parts, strategy);
    Certificate cert = make_certificate(field, root, c, parts, ref);
    verify_certificate(cert);
    const std::string text = serialize(cert);
    if (o.out.empty()) {
      out << text;
      return kOk;
    }
    write_file(o.out, text);
    if (o.json)
      out << Json{{"out", o.out}, {"strategy", cert.strategy}, {"leaves", cert.partition.leaves.size()}, {"depth", cert.witness.n}}.dump(2) << "\n";
    else
      out << "certificate written to " << o.out << ": strategy " << cert.strategy << ", " << cert.partition.leaves.size()
          << " leaves, witness depth " << cert.witness.n << "\n";
    return kOk;
  };
}

std::string read_input(const std::string& path) {
  std::ostringstream s;
  if (path == "-") {
    s << std::cin.rdbuf();
  } else {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
    s << f.rdbuf();
  }
  return s.str();
}

Action verify_cert(const Options& o) {
  if (o.in.empty()) throw Usage("--in is required");
  return [=](std::ostream& out, std::ostream&) {
    Certificate cert = deserialize(read_input(o.in));
    verify_certificate(cert);
    if (o.json)
      out << Json{{"valid", true}, {"leaves", cert.partition.leaves.size()}, {"parts", cert.parts.size()}, {"traces", cert.tree_trace.has_value()}}.dump(2) << "\n";
    else
      out << "certificate valid: " << cert.partition.leaves.size() << " leaves, " << cert.parts.size() << " parts"
          << (cert.tree_trace ? ", traces replayed" : "") << "\n";
    return kOk;
  };
}

Action rational_check(const Options& o) {
  if (o.r.empty()) throw Usage("--r is required");
  auto r = flag_value<Rational>("--r", [&] { return parse_rational(o.r); });
  if (o.parts.empty()) throw Usage("--parts is required");
  auto parts = flag_value<std::vector<Cylinder>>("--parts", [&] { return parse_parts(o.parts); });
  const unsigned depth = o.depth.value_or(10);
  return [=](std::ostream& out, std::ostream&) {
    auto res = check_rational_obstruction(r, CylinderMultiset::from_list(parts), depth);
    if (o.json) {
      Json j{{"r", json_io::rational(r)}, {"refinable", res.refinable}, {"depth", res.depth}};
      if (res.witness) j["witness"] = json_io::witness(*res.witness);
      if (res.partition) j["partition"] = json_io::partition(*res.partition);
      out << j.dump(2) << "\n";
    } else if (!res.refinable) {
      out << "no tree refinement up to depth " << res.depth << "\n";
    } else {
      out << "tree refinement at depth " << res.depth << "\n";
      if (res.partition) {
        for (std::size_t k = 0; k < res.partition->leaves.size(); ++k)
          out << "  " << (res.partition->leaves[k].bits().empty() ? "(root)" : res.partition->leaves[k].bits()) << " -> part "
              << res.grouping[k] << "\n";
      }
    }
    return kOk;
  };
}

Json field_json(const AlgebraicField& f) {
  auto iv = f.root_interval();
  return {{"minpoly", f.minpoly().to_string()}, {"root", {json_io::rational(iv.lo), json_io::rational(iv.hi)}}};
}

Action homeo_build(const Options& o) {
  auto m = parse_minpoly(o.r, "--r");
  auto root = parse_root(o.root);
  if (o.s.empty()) throw Usage("--s is required");
  auto s_poly = flag_value<RatPoly>("--s", [&] { return poly::parse(o.s); });
  const unsigned depth = o.depth.value_or(6);
  if (depth > 12) throw Usage("--depth above 12 is not supported");
  const std::uint64_t fuel = default_fuel(o);
  return [=](std::ostream& out, std::ostream& err) {
    auto r_field = make_field(m, root);
    FieldElement s_elt = r_field.reduce(s_poly);
    FieldEmbedding emb = derive_subfield(s_elt);
    const AlgebraicField& s_field = emb.source();
    auto r_pre = emb.preimage(r_field.generator());
    if (!r_pre) throw Error(ErrorCode::StrategyInapplicable, "r does not lie in Q(s); the pair is not binomially equivalent");
    auto r_in_s = search_rep(*r_pre, o.nmax);
    auto s_in_r = search_rep(s_elt, o.nmax);
    if (!r_in_s || !s_in_r)
      throw Error(ErrorCode::NotFoundWithinBounds, "no binomial representations with n <= " + std::to_string(o.nmax));
    Strategy strategy{StrategyKind::Auto, {8, fuel}, fuel};
    HomeoSetup setup{r_field, s_field, emb, *r_in_s, *s_in_r, strategy, strategy};

    std::vector<StageSummary> summaries;
    auto stages = build(setup, depth, [&](const StageSummary& s) {
      summaries.push_back(s);
      err << "stage " << s.index << ": " << s.cells << " cells (" << approx(s.seconds) << " s)\n";
    });
    const HomeoStage& last = stages.back();
    auto rows = export_table(last, setup);
    FieldElement total_r = r_field.zero(), total_s = s_field.zero();
    for (const auto& row : rows) {
      total_r += row.measure_r;
      total_s += row.measure_s;
    }
    if (total_r != r_field.one() || total_s != s_field.one())
      throw Error(ErrorCode::MeasureMismatch, "table measures do not total 1");

    if (!o.out.empty()) {
      Json table{{"r", field_json(r_field)}, {"s", field_json(s_field)}, {"s_in_r", json_io::rep(*s_in_r)},
                 {"r_in_s", json_io::rep(*r_in_s)}, {"depth", depth}, {"rows", Json::array()}};
      for (const auto& row : rows) table["rows"].push_back(json_io::table_row(row));
      write_file(o.out, table.dump() + "\n");
    }

    const char* checks[] = {"refinement chains", "exact measure preservation", "pi-compatibility", "mesh lengths"};
    if (o.json) {
      Json st = Json::array();
      for (const auto& s : summaries)
        st.push_back({{"stage", s.index}, {"cells", s.cells}, {"r_cylinders", s.p_cylinders}, {"s_cylinders", s.q_cylinders}});
      Json inv = Json::object();
      for (const char* c : checks) inv[c] = "ok";
      out << Json{{"r", field_json(r_field)}, {"s", field_json(s_field)}, {"s_in_r", json_io::rep(*s_in_r)},
                  {"r_in_s", json_io::rep(*r_in_s)}, {"depth", depth}, {"stages", st}, {"invariants", inv},
                  {"total_measure_r", json_io::field_element(total_r)}, {"total_measure_s", json_io::field_element(total_s)},
                  {"rows", rows.size()}, {"out", o.out.empty() ? Json(nullptr) : Json(o.out)}}
                 .dump(2)
          << "\n";
      return kOk;
    }
    out << "r: " << r_field.describe() << "\n"
        << "s: " << s_field.describe() << "\n"
        << "s in r: n = " << s_in_r->n << ", a =";
    for (const auto& x : s_in_r->a) out << " " << x.get_str();
    out << "\nr in s: n = " << r_in_s->n << ", a =";
    for (const auto& x : r_in_s->a) out << " " << x.get_str();
    out << "\n\nstage  cells  r-cylinders  s-cylinders\n";
    for (const auto& s : summaries)
      out << std::setw(5) << s.index << std::setw(7) << s.cells << std::setw(13) << s.p_cylinders << std::setw(13)
          << s.q_cylinders << "\n";
    out << "\n";
    for (const char* c : checks) out << c << ": ok\n";
    out << "total measure (r side): " << total_r.to_string() << "\n"
        << "total measure (s side): " << total_s.to_string() << "\n";
    if (!o.out.empty()) out << "table: " << rows.size() << " rows written to " << o.out << "\n";
    return kOk;
  };
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Binomial reducibility, tree refinements and measure-preserving homeomorphisms of Bernoulli measures", "cantor"};
  app.require_subcommand(1);
  Options o;
  std::string fuel_text, depth_text;

  auto field_flags = [&](CLI::App* sub) {
    sub->add_option("--minpoly", o.minpoly, "minimal polynomial, e.g. x^4+x-1");
    sub->add_option("--root", o.root, "isolating interval lo,hi (default 0,1)");
  };
  auto common = [&](CLI::App* sub) {
    sub->add_flag("--json", o.json, "JSON output");
    sub->add_option("--seed", o.seed, "accepted for reproducibility; every command is deterministic");
    sub->add_option("--fuel", fuel_text, "move / search budget (default CANTOR_FUEL or 1000000)");
  };

  std::map<CLI::App*, std::function<Action(const Options&)>> handlers;
  auto* fi = app.add_subcommand("field-info", "field data for a minimal polynomial and root");
  field_flags(fi);
  common(fi);
  handlers[fi] = field_info;

  auto* rs = app.add_subcommand("reduce-search", "least binomial representation of a target in the field");
  field_flags(rs);
  common(rs);
  rs->add_option("--target", o.target, "polynomial in the generator, e.g. x^2");
  rs->add_option("--nmax", o.nmax, "largest n to try (default 4)");
  handlers[rs] = reduce_search;

  auto* rf = app.add_subcommand("refine", "tree refinement certificate of a partition of a cylinder");
  field_flags(rf);
  common(rf);
  rf->add_option("--cyl", o.cyl, "cylinder a,b (default 0,0)");
  rf->add_option("--parts", o.parts, "parts, e.g. \"3,0;0,3;1,1*3\"");
  rf->add_option("--strategy", o.strategy, "selmer, r4s, search or auto");
  rf->add_option("--depth", depth_text, "search depth bound (default 8)");
  rf->add_option("--out", o.out, "write the certificate here");
  handlers[rf] = refine;

  auto* cn = app.add_subcommand("canonical", "canonical form of a multiset of cylinders");
  field_flags(cn);
  common(cn);
  cn->add_option("--parts", o.parts, "multiset, e.g. \"1,0;0,1\"");
  cn->add_option("--strategy", o.strategy, "selmer, r4s or auto");
  cn->add_option("--depth", depth_text, "window level k (default: the least that works)");
  handlers[cn] = canonical;

  auto* hb = app.add_subcommand("homeo-build", "back-and-forth homeomorphism table between mu(r) and mu(s)");
  common(hb);
  hb->add_option("--r", o.r, "minimal polynomial of r");
  hb->add_option("--root", o.root, "isolating interval of r (default 0,1)");
  hb->add_option("--s", o.s, "s as a polynomial in r, e.g. r^2");
  hb->add_option("--depth", depth_text, "number of stages (default 6)");
  hb->add_option("--nmax", o.nmax, "largest n for the binomial representations (default 4)");
  hb->add_option("--out", o.out, "write the table here");
  handlers[hb] = homeo_build;

  auto* vc = app.add_subcommand("verify-cert", "re-check a certificate independently");
  common(vc);
  vc->add_option("--in", o.in, "certificate file, or - for standard input");
  handlers[vc] = verify_cert;

  auto* rc = app.add_subcommand("rational-check", "tree refinability for a rational parameter");
  common(rc);
  rc->add_option("--r", o.r, "rational parameter, e.g. 1/3");
  rc->add_option("--parts", o.parts, "partition of 1, e.g. \"1,0*3\"");
  rc->add_option("--depth", depth_text, "depth bound (default 10)");
  handlers[rc] = rational_check;

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  auto report = [&](const std::string& name, const std::string& detail) {
    if (o.json)
      err << Json{{"error", name}, {"detail", detail}}.dump() << "\n";
    else
      err << "error: " << name << ": " << detail << "\n";
  };

  Action action;
  try {
    if (!fuel_text.empty()) o.fuel = flag_value<std::uint64_t>("--fuel", [&] {
        if (!std::all_of(fuel_text.begin(), fuel_text.end(), ::isdigit) || fuel_text.size() > 18)
          throw Error(ErrorCode::ParseError, "not a count: " + fuel_text);
        return std::stoull(fuel_text);
      });
    if (!depth_text.empty()) o.depth = flag_value<unsigned>("--depth", [&] { return parse_exponent(depth_text); });
    for (auto& [sub, make] : handlers)
      if (sub->parsed()) action = make(o);
  } catch (const Usage& e) {
    report("UsageError", e.what());
    return kUsage;
  }

  try {
    return action(out, err);
  } catch (const Error& e) {
    std::string what = e.what();
    std::string prefix = std::string(e.name()) + ": ";
    report(std::string(e.name()), what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what);
    return kFailure;
  } catch (const std::bad_alloc&) {
    report("OutOfMemory", "allocation failed");
    return kFailure;
  }
}

}  // namespace cantor::cli
