#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cantor/numberfield.hpp"

namespace cantor {

/// The cylinder size r^a (1-r)^b.
struct Cylinder {
  std::uint32_t a = 0;
  std::uint32_t b = 0;

  std::uint32_t length() const { return a + b; }
  Cylinder times(const Cylinder& other) const { return {a + other.a, b + other.b}; }

  bool operator==(const Cylinder&) const = default;
  /// Canonical order: by length, then by a.
  friend bool operator<(const Cylinder& x, const Cylinder& y) {
    if (x.length() != y.length()) return x.length() < y.length();
    return x.a < y.a;
  }
};

std::string to_string(const Cylinder& c);

/// Finite multiset of cylinder sizes, iterated in canonical order.
class CylinderMultiset {
 public:
  using Map = std::map<Cylinder, Integer>;

  CylinderMultiset() = default;
  CylinderMultiset(std::initializer_list<std::pair<Cylinder, long>> entries);
  static CylinderMultiset from_list(const std::vector<Cylinder>& items);

  void add(const Cylinder& c, const Integer& mult = 1);
  /// Throws InvalidArgument if fewer than `mult` copies are present.
  void remove(const Cylinder& c, const Integer& mult = 1);
  Integer count(const Cylinder& c) const;
  Integer total() const;
  bool empty() const { return entries_.empty(); }
  std::size_t distinct() const { return entries_.size(); }

  /// Expanded item list in canonical order (multiplicities unrolled).
  std::vector<Cylinder> to_list() const;
  /// Largest a, or nullopt if empty.
  std::optional<std::uint32_t> max_a() const;

  const Map& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const CylinderMultiset&) const = default;

  std::string to_string() const;

 private:
  Map entries_;
};

FieldElement multiset_sum(const CylinderMultiset& m, const AlgebraicField& field);
FieldElement list_sum(const std::vector<Cylinder>& items, const AlgebraicField& field);

/// A finite word over {0,1}; '1' is the r-branch and '0' the (1-r)-branch.
class Address {
 public:
  Address() = default;
  explicit Address(std::string bits);
  /// Canonical address 1^a 0^b of a cylinder.
  static Address canonical(const Cylinder& c);

  const std::string& bits() const { return bits_; }
  std::size_t length() const { return bits_.size(); }
  bool extends(const Address& prefix) const;
  Address child(char bit) const { return Address(bits_ + bit); }
  Address concat(const Address& suffix) const { return Address(bits_ + suffix.bits_); }
  /// Suffix after `prefix`; throws NotADescendant.
  Address relative_to(const Address& prefix) const;
  /// (ones, zeros).
  Cylinder size() const;

  bool operator==(const Address&) const = default;
  auto operator<=>(const Address&) const = default;

 private:
  std::string bits_;
};

/// (ones, zeros) of the suffix of `addr` after `relative_to`.
Cylinder leaf_size(const Address& addr, const Address& relative_to);

struct TreePartition {
  Address root;
  std::vector<Address> leaves;
};

/// Throws PrefixViolation, IncompletenessGap or NotADescendant.
void validate_tree_partition(const TreePartition& t);
/// Non-throwing form; empty string when valid, otherwise the error name.
std::string tree_partition_violation(const TreePartition& t);

/// Depth-n uniformization: each leaf at relative depth d with k ones expands to
/// C(n-d, j) leaves with k + j ones.
struct Uniformization {
  unsigned n = 0;
  std::vector<Integer> counts;                  // by number of ones, length n+1
  std::vector<std::vector<Integer>> per_leaf;   // per input leaf, length n+1
};

Uniformization uniformize(const TreePartition& t);
/// The partition with every leaf explicitly expanded to the maximum depth.
TreePartition uniformize_explicit(const TreePartition& t);

/// Rows i = 0..n, columns are parts j.
struct RefinementWitness {
  unsigned n = 0;
  std::vector<std::vector<Integer>> p;

  bool operator==(const RefinementWitness&) const = default;
};

/// `grouping[k]` is the part index of `t.leaves[k]`. Throws RowSumMismatch or
/// PartSumMismatch.
RefinementWitness witness_from_grouping(const TreePartition& t, const std::vector<std::size_t>& grouping,
                                        const std::vector<Cylinder>& parts, const AlgebraicField& field);

/// Checks both witness invariant families for the cylinder `whole`.
void check_witness(const RefinementWitness& w, const Cylinder& whole, const std::vector<Cylinder>& parts,
                   const AlgebraicField& field);

/// Merges sibling leaves assigned to the same part until none remain.
void coarsen(TreePartition& t, std::vector<std::size_t>& grouping);

Integer binomial(unsigned n, unsigned k);

}  // namespace cantor
