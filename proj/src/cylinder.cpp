#include "cantor/cylinder.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cantor/error.hpp"

namespace cantor {

std::string to_string(const Cylinder& c) { return "(" + std::to_string(c.a) + "," + std::to_string(c.b) + ")"; }

CylinderMultiset::CylinderMultiset(std::initializer_list<std::pair<Cylinder, long>> entries) {
  for (const auto& [c, m] : entries) add(c, m);
}

CylinderMultiset CylinderMultiset::from_list(const std::vector<Cylinder>& items) {
  CylinderMultiset out;
  for (const auto& c : items) out.add(c);
  return out;
}

void CylinderMultiset::add(const Cylinder& c, const Integer& mult) {
  if (mult < 0) throw Error(ErrorCode::InvalidArgument, "negative multiplicity");
  if (mult == 0) return;
  entries_[c] += mult;
}

void CylinderMultiset::remove(const Cylinder& c, const Integer& mult) {
  auto it = entries_.find(c);
  if (it == entries_.end() || it->second < mult)
    throw Error(ErrorCode::InvalidArgument, "multiset does not contain " + cantor::to_string(c) + " with multiplicity " + mult.get_str());
  it->second -= mult;
  if (it->second == 0) entries_.erase(it);
}

Integer CylinderMultiset::count(const Cylinder& c) const {
  auto it = entries_.find(c);
  return it == entries_.end() ? Integer(0) : it->second;
}

Integer CylinderMultiset::total() const {
  Integer t = 0;
  for (const auto& [c, m] : entries_) t += m;
  return t;
}

std::vector<Cylinder> CylinderMultiset::to_list() const {
  std::vector<Cylinder> out;
  for (const auto& [c, m] : entries_) {
    if (!m.fits_ulong_p() || m.get_ui() > 100'000'000UL)
      throw Error(ErrorCode::InvalidArgument, "multiset too large to expand");
    out.insert(out.end(), m.get_ui(), c);
  }
  return out;
}

std::optional<std::uint32_t> CylinderMultiset::max_a() const {
  std::optional<std::uint32_t> best;
  for (const auto& [c, m] : entries_) best = std::max(best.value_or(0), c.a);
  return best;
}

std::string CylinderMultiset::to_string() const {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& [c, m] : entries_) {
    if (!first) out << ", ";
    first = false;
    if (m != 1) out << m.get_str() << "*";
    out << cantor::to_string(c);
  }
  out << "}";
  return out.str();
}

FieldElement multiset_sum(const CylinderMultiset& m, const AlgebraicField& field) {
  FieldElement acc = field.zero();
  for (const auto& [c, mult] : m) acc += field.eval_cylinder(c.a, c.b) * Rational(mult);
  return acc;
}

FieldElement list_sum(const std::vector<Cylinder>& items, const AlgebraicField& field) {
  return multiset_sum(CylinderMultiset::from_list(items), field);
}

// ---------------------------------------------------------------------------
// Addresses

Address::Address(std::string bits) : bits_(std::move(bits)) {
  for (char c : bits_)
    if (c != '0' && c != '1') throw Error(ErrorCode::ParseError, "address must be a word over {0,1}: \"" + bits_ + "\"");
}

Address Address::canonical(const Cylinder& c) { return Address(std::string(c.a, '1') + std::string(c.b, '0')); }

bool Address::extends(const Address& prefix) const {
  return bits_.size() >= prefix.bits_.size() && bits_.compare(0, prefix.bits_.size(), prefix.bits_) == 0;
}

Address Address::relative_to(const Address& prefix) const {
  if (!extends(prefix))
    throw Error(ErrorCode::NotADescendant, "\"" + bits_ + "\" does not extend \"" + prefix.bits_ + "\"");
  return Address(bits_.substr(prefix.bits_.size()));
}

Cylinder Address::size() const {
  auto ones = static_cast<std::uint32_t>(std::count(bits_.begin(), bits_.end(), '1'));
  return {ones, static_cast<std::uint32_t>(bits_.size()) - ones};
}

Cylinder leaf_size(const Address& addr, const Address& relative_to) { return addr.relative_to(relative_to).size(); }

// ---------------------------------------------------------------------------
// Tree partitions

namespace {

// Returns the error name or empty; fills detail.
std::string check_partition(const TreePartition& t, std::string& detail) {
  std::vector<std::string> rel;
  rel.reserve(t.leaves.size());
  for (const auto& leaf : t.leaves) {
    if (!leaf.extends(t.root)) {
      detail = "\"" + leaf.bits() + "\" does not extend root \"" + t.root.bits() + "\"";
      return "NotADescendant";
    }
    rel.push_back(leaf.bits().substr(t.root.length()));
  }
  std::sort(rel.begin(), rel.end());
  // In sorted order a prefix sits immediately before some word extending it.
  for (std::size_t i = 0; i + 1 < rel.size(); ++i) {
    if (rel[i + 1].compare(0, rel[i].size(), rel[i]) == 0) {
      detail = "\"" + t.root.bits() + rel[i] + "\" is a prefix of \"" + t.root.bits() + rel[i + 1] + "\"";
      return "PrefixViolation";
    }
  }
  // Kraft sum of relative depths, exactly.
  std::size_t max_depth = 0;
  for (const auto& w : rel) max_depth = std::max(max_depth, w.size());
  Integer total = 0;
  for (const auto& w : rel) {
    Integer term;
    mpz_ui_pow_ui(term.get_mpz_t(), 2, max_depth - w.size());
    total += term;
  }
  Integer full;
  mpz_ui_pow_ui(full.get_mpz_t(), 2, max_depth);
  if (total != full) {
    detail = "Kraft sum " + total.get_str() + "/" + full.get_str() + " != 1";
    return "IncompletenessGap";
  }
  return "";
}

}  // namespace

void validate_tree_partition(const TreePartition& t) {
  std::string detail;
  std::string name = check_partition(t, detail);
  if (name.empty()) return;
  if (name == "NotADescendant") throw Error(ErrorCode::NotADescendant, detail);
  if (name == "PrefixViolation") throw Error(ErrorCode::PrefixViolation, detail);
  throw Error(ErrorCode::IncompletenessGap, detail);
}

std::string tree_partition_violation(const TreePartition& t) {
  std::string detail;
  return check_partition(t, detail);
}

Integer binomial(unsigned n, unsigned k) {
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

Uniformization uniformize(const TreePartition& t) {
  Uniformization u;
  unsigned n = 0;
  for (const auto& leaf : t.leaves) n = std::max<unsigned>(n, static_cast<unsigned>(leaf.length() - t.root.length()));
  u.n = n;
  u.counts.assign(n + 1, 0);
  for (const auto& leaf : t.leaves) {
    Cylinder rel = leaf_size(leaf, t.root);
    unsigned extra = n - rel.length();
    std::vector<Integer> row(n + 1, 0);
    for (unsigned j = 0; j <= extra; ++j) row[rel.a + j] = binomial(extra, j);
    for (unsigned i = 0; i <= n; ++i) u.counts[i] += row[i];
    u.per_leaf.push_back(std::move(row));
  }
  return u;
}

TreePartition uniformize_explicit(const TreePartition& t) {
  std::size_t n = 0;
  for (const auto& leaf : t.leaves) n = std::max(n, leaf.length() - t.root.length());
  TreePartition out{t.root, {}};
  for (const auto& leaf : t.leaves) {
    std::vector<Address> frontier{leaf};
    while (frontier.front().length() - t.root.length() < n) {
      std::vector<Address> next;
      for (const auto& a : frontier) {
        next.push_back(a.child('1'));
        next.push_back(a.child('0'));
      }
      frontier = std::move(next);
    }
    out.leaves.insert(out.leaves.end(), frontier.begin(), frontier.end());
  }
  return out;
}

void check_witness(const RefinementWitness& w, const Cylinder& whole, const std::vector<Cylinder>& parts,
                   const AlgebraicField& field) {
  if (w.p.size() != w.n + 1) throw Error(ErrorCode::RowSumMismatch, "witness must have n+1 rows");
  for (unsigned i = 0; i <= w.n; ++i) {
    if (w.p[i].size() != parts.size()) throw Error(ErrorCode::RowSumMismatch, "witness row width differs from part count");
    Integer row = 0;
    for (const auto& v : w.p[i]) {
      if (v < 0) throw Error(ErrorCode::RowSumMismatch, "negative witness entry");
      row += v;
    }
    if (row != binomial(w.n, i))
      throw Error(ErrorCode::RowSumMismatch, "row " + std::to_string(i) + " sums to " + row.get_str() + ", expected C(" +
                                                  std::to_string(w.n) + "," + std::to_string(i) + ")");
  }
  for (std::size_t j = 0; j < parts.size(); ++j) {
    FieldElement acc = field.zero();
    for (unsigned i = 0; i <= w.n; ++i)
      if (w.p[i][j] != 0) acc += field.eval_cylinder(whole.a + i, whole.b + w.n - i) * Rational(w.p[i][j]);
    if (acc != field.eval_cylinder(parts[j].a, parts[j].b))
      throw Error(ErrorCode::PartSumMismatch, "part " + std::to_string(j + 1) + " " + to_string(parts[j]) +
                                                  " is not matched by its witness column");
  }
}

RefinementWitness witness_from_grouping(const TreePartition& t, const std::vector<std::size_t>& grouping,
                                        const std::vector<Cylinder>& parts, const AlgebraicField& field) {
  if (grouping.size() != t.leaves.size()) throw Error(ErrorCode::InvalidArgument, "grouping must cover every leaf");
  Uniformization u = uniformize(t);
  RefinementWitness w;
  w.n = u.n;
  w.p.assign(u.n + 1, std::vector<Integer>(parts.size(), 0));
  for (std::size_t k = 0; k < t.leaves.size(); ++k) {
    if (grouping[k] >= parts.size()) throw Error(ErrorCode::InvalidArgument, "grouping refers to a missing part");
    for (unsigned i = 0; i <= u.n; ++i) w.p[i][grouping[k]] += u.per_leaf[k][i];
  }
  check_witness(w, t.root.size(), parts, field);
  return w;
}

void coarsen(TreePartition& t, std::vector<std::size_t>& grouping) {
  std::map<std::string, std::size_t> by_bits;
  for (std::size_t k = 0; k < t.leaves.size(); ++k) by_bits.emplace(t.leaves[k].bits(), grouping[k]);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<std::string, std::size_t>> merges;
    for (const auto& [bits, part] : by_bits) {
      if (bits.size() <= t.root.length() || bits.back() != '1') continue;
      std::string sibling = bits.substr(0, bits.size() - 1) + '0';
      auto it = by_bits.find(sibling);
      if (it != by_bits.end() && it->second == part) merges.emplace_back(bits.substr(0, bits.size() - 1), part);
    }
    for (const auto& [parent, part] : merges) {
      by_bits.erase(parent + '1');
      by_bits.erase(parent + '0');
      by_bits.emplace(parent, part);
      changed = true;
    }
  }
  t.leaves.clear();
  grouping.clear();
  for (const auto& [bits, part] : by_bits) {
    t.leaves.emplace_back(bits);
    grouping.push_back(part);
  }
}

}  // namespace cantor
