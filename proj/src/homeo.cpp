#include "cantor/homeo.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "cantor/error.hpp"

namespace cantor {

FieldElement cell_measure(const ClopenCell& cell, const AlgebraicField& field) {
  FieldElement acc = field.zero();
  for (const auto& addr : cell.addresses) {
    Cylinder c = addr.size();
    acc += field.eval_cylinder(c.a, c.b);
  }
  return acc;
}

HomeoSetup HomeoSetup::identity(const AlgebraicField& field, const Strategy& strategy) {
  return HomeoSetup{field, field, FieldEmbedding(field, field.generator()), identity_rep(), identity_rep(), strategy, strategy};
}

HomeoStage init_stage() {
  HomeoStage s;
  s.p = {ClopenCell{{Address()}}};
  s.q = {ClopenCell{{Address()}}};
  return s;
}

namespace {

// Descendants of addr at length `len` (addr itself if already that long).
void extend_to(const Address& addr, std::size_t len, std::vector<Address>& out) {
  if (addr.length() >= len) {
    out.push_back(addr);
    return;
  }
  extend_to(addr.child('1'), len, out);
  extend_to(addr.child('0'), len, out);
}

// Cells of the cylinder c with the given measures: first by direct search,
// then by refining the list of cylinder sizes from the expansions and
// regrouping the leaves by piece.
MeasureRefinement realize_cells(const AlgebraicField& field, const Cylinder& c, const std::vector<BinomialRep>& expanded,
                                const std::vector<FieldElement>& measures, const Strategy& strategy,
                                const SearchBounds& bounds, unsigned stage, std::size_t cell) {
  auto where = "stage " + std::to_string(stage) + " cell " + std::to_string(cell) + ": ";
  try {
    return refine_to_measures(field, c, measures, bounds);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFoundWithinBounds && e.code() != ErrorCode::FuelExhausted)
      throw Error(ErrorCode::RefinementFailed, where + e.what());
  }
  std::vector<Cylinder> parts;
  std::vector<std::size_t> owner;
  for (std::size_t j = 0; j < expanded.size(); ++j)
    for (unsigned i = 0; i <= expanded[j].n; ++i)
      for (Integer k = 0; k < expanded[j].a[i]; ++k) {
        parts.push_back({i, expanded[j].n - i});
        owner.push_back(j);
      }
  try {
    Refinement ref = refine_partition(field, c, parts, strategy);
    MeasureRefinement out{std::move(ref.partition), {}, std::move(ref.witness)};
    for (std::size_t part : ref.grouping) out.grouping.push_back(owner[part]);
    coarsen(out.partition, out.grouping);
    Uniformization u = uniformize(out.partition);
    out.witness = RefinementWitness{u.n, std::vector<std::vector<Integer>>(u.n + 1, std::vector<Integer>(expanded.size(), 0))};
    for (std::size_t k = 0; k < out.grouping.size(); ++k)
      for (unsigned i = 0; i <= u.n; ++i) out.witness.p[i][out.grouping[k]] += u.per_leaf[k][i];
    return out;
  } catch (const Error& e) {
    throw Error(ErrorCode::RefinementFailed, where + e.what());
  }
}

}  // namespace

HomeoStage advance_stage(const HomeoStage& stage, const HomeoSetup& setup) {
  HomeoStage next;
  next.index = stage.index + 1;
  const bool odd = next.index % 2 == 1;
  const std::size_t len = (next.index + 1) / 2;
  const auto& src_cells = odd ? stage.p : stage.q;
  const auto& dst_cells = odd ? stage.q : stage.p;
  const BinomialRep& rep = odd ? setup.r_in_s : setup.s_in_r;
  const AlgebraicField& dst_field = odd ? setup.s_field : setup.r_field;
  const Strategy& strategy = odd ? setup.s_strategy : setup.r_strategy;
  auto& new_src = odd ? next.p : next.q;
  auto& new_dst = odd ? next.q : next.p;
  std::unordered_map<std::string, MeasureRefinement> cache;

  for (std::size_t t = 0; t < src_cells.size(); ++t) {
    std::vector<Address> pieces;
    for (const auto& addr : src_cells[t].addresses) extend_to(addr, len, pieces);
    const auto& dst = dst_cells[t].addresses;
    if (dst.size() != 1)
      throw Error(ErrorCode::InvalidArgument, "stage " + std::to_string(stage.index) + " cell " + std::to_string(t) +
                                                  " on the receiving side is not a basic clopen set");
    const Address& y = dst.front();

    if (pieces.size() == 1) {
      new_src.push_back({pieces});
      new_dst.push_back({{y}});
      continue;
    }
    if (is_identity_rep(rep) && src_cells[t].addresses == dst) {
      for (const auto& piece : pieces) {
        new_src.push_back({{piece}});
        new_dst.push_back({{piece}});
      }
      continue;
    }

    const Cylinder c = y.size();
    std::vector<BinomialRep> expanded;
    std::vector<FieldElement> measures;
    std::string key = to_string(c) + ":";
    for (const auto& piece : pieces) {
      Cylinder size = piece.size();
      expanded.push_back(cylinder_rep(size.a, size.b, rep));
      measures.push_back(rep_value(expanded.back(), dst_field));
      key += to_string(size);
    }
    auto hit = cache.find(key);
    if (hit == cache.end()) hit = cache.emplace(key, realize_cells(dst_field, c, expanded, measures, strategy, setup.cell_bounds, next.index, t)).first;
    const MeasureRefinement& ref = hit->second;
    std::vector<ClopenCell> groups(pieces.size());
    for (std::size_t k = 0; k < ref.partition.leaves.size(); ++k)
      groups[ref.grouping[k]].addresses.push_back(y.concat(ref.partition.leaves[k].relative_to(ref.partition.root)));
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      if (groups[j].addresses.empty())
        throw Error(ErrorCode::MeasureMismatch, "piece " + pieces[j].bits() + " received no cylinders");
      std::sort(groups[j].addresses.begin(), groups[j].addresses.end());
      new_src.push_back({{pieces[j]}});
      new_dst.push_back(std::move(groups[j]));
    }
  }
  return next;
}

namespace {

void check_partition_of_space(const std::vector<ClopenCell>& cells, const char* side) {
  TreePartition t{Address(), {}};
  for (const auto& cell : cells) {
    if (cell.addresses.empty()) throw Error(ErrorCode::InvalidArgument, std::string("empty cell on the ") + side + " side");
    t.leaves.insert(t.leaves.end(), cell.addresses.begin(), cell.addresses.end());
  }
  validate_tree_partition(t);
}

// Index of the cell of `cells` containing each address of `cell`; throws
// when they disagree.
std::size_t parent_of(const ClopenCell& cell, const std::unordered_map<std::string, std::size_t>& owner,
                      const char* side) {
  std::optional<std::size_t> found;
  for (const auto& addr : cell.addresses) {
    std::optional<std::size_t> here;
    for (std::size_t len = 0; len <= addr.length() && !here; ++len) {
      auto it = owner.find(addr.bits().substr(0, len));
      if (it != owner.end()) here = it->second;
    }
    if (!here) throw Error(ErrorCode::InvalidArgument, std::string(side) + " cylinder " + addr.bits() + " lies in no earlier cell");
    if (found && *found != *here)
      throw Error(ErrorCode::InvalidArgument, std::string(side) + " cell straddles two earlier cells");
    found = here;
  }
  return *found;
}

std::unordered_map<std::string, std::size_t> owners(const std::vector<ClopenCell>& cells) {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (const auto& addr : cells[i].addresses) out.emplace(addr.bits(), i);
  return out;
}

}  // namespace

void verify_stage(const HomeoStage& stage, const HomeoSetup& setup) {
  if (stage.p.size() != stage.q.size()) throw Error(ErrorCode::InvalidArgument, "pi is not a bijection of cells");
  check_partition_of_space(stage.p, "r");
  check_partition_of_space(stage.q, "s");
  for (std::size_t i = 0; i < stage.p.size(); ++i) {
    FieldElement mr = cell_measure(stage.p[i], setup.r_field);
    FieldElement ms = setup.s_to_r(cell_measure(stage.q[i], setup.s_field));
    if (mr != ms)
      throw Error(ErrorCode::MeasureMismatch, "stage " + std::to_string(stage.index) + " cell " + std::to_string(i) +
                                                  ": " + mr.to_string() + " vs " + ms.to_string());
  }
  if (stage.index == 0) return;
  const bool odd = stage.index % 2 == 1;
  const std::size_t len = (stage.index + 1) / 2;
  for (const auto& cell : odd ? stage.p : stage.q)
    if (cell.addresses.size() != 1 || cell.addresses.front().length() < len)
      throw Error(ErrorCode::InvalidArgument, "stage " + std::to_string(stage.index) + " violates the mesh condition");
}

void verify_refines(const HomeoStage& prev, const HomeoStage& next) {
  auto p_owner = owners(prev.p), q_owner = owners(prev.q);
  for (std::size_t i = 0; i < next.p.size(); ++i) {
    std::size_t from_p = parent_of(next.p[i], p_owner, "r");
    std::size_t from_q = parent_of(next.q[i], q_owner, "s");
    if (from_p != from_q)
      throw Error(ErrorCode::InvalidArgument, "stage " + std::to_string(next.index) + " cell " + std::to_string(i) +
                                                  " is not compatible with pi of the previous stage");
  }
}

std::vector<HomeoStage> build(const HomeoSetup& setup, unsigned depth,
                              const std::function<void(const StageSummary&)>& progress) {
  std::vector<HomeoStage> stages{init_stage()};
  verify_stage(stages.back(), setup);
  for (unsigned k = 1; k <= depth; ++k) {
    auto start = std::chrono::steady_clock::now();
    HomeoStage next = advance_stage(stages.back(), setup);
    verify_stage(next, setup);
    verify_refines(stages.back(), next);
    stages.push_back(std::move(next));
    if (progress) {
      StageSummary s;
      s.index = k;
      s.cells = stages.back().p.size();
      for (const auto& c : stages.back().p) s.p_cylinders += c.addresses.size();
      for (const auto& c : stages.back().q) s.q_cylinders += c.addresses.size();
      s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      progress(s);
    }
  }
  return stages;
}

std::vector<TableRow> export_table(const HomeoStage& stage, const HomeoSetup& setup) {
  std::vector<TableRow> rows;
  for (std::size_t i = 0; i < stage.p.size(); ++i)
    rows.push_back({stage.p[i].addresses, stage.q[i].addresses, cell_measure(stage.p[i], setup.r_field),
                    cell_measure(stage.q[i], setup.s_field)});
  return rows;
}

std::vector<TableRow> complement_map(const AlgebraicField& field) {
  std::vector<TableRow> rows;
  for (char bit : {'1', '0'}) {
    Address src(std::string(1, bit)), dst(std::string(1, bit == '1' ? '0' : '1'));
    Cylinder cs = src.size(), cd = dst.size();
    // Under mu(1-r) a cylinder with a ones and b zeros has size (1-r)^a r^b.
    rows.push_back({{src}, {dst}, field.eval_cylinder(cs.a, cs.b), field.eval_cylinder(cd.b, cd.a)});
  }
  return rows;
}

std::vector<TableRow> compose(const std::vector<TableRow>& first, const std::vector<TableRow>& second) {
  std::vector<TableRow> out;
  for (const auto& row : first) {
    auto it = std::find_if(second.begin(), second.end(), [&](const TableRow& r) { return r.src == row.dst; });
    if (it == second.end()) throw Error(ErrorCode::InvalidArgument, "tables do not compose: no row starting at the image cell");
    out.push_back({row.src, it->dst, row.measure_r, it->measure_s});
  }
  return out;
}

}  // namespace cantor
