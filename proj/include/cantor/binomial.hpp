#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cantor/numberfield.hpp"

namespace cantor {

/// s = sum_i a_i r^i (1-r)^{n-i} with 0 <= a_i <= C(n,i).
struct BinomialRep {
  unsigned n = 0;
  std::vector<Integer> a;

  bool operator==(const BinomialRep&) const = default;
};

/// Throws CoefficientOutOfRange (or InvalidArgument for a wrong length).
void check_rep(const BinomialRep& rep);
/// The value of the representation in the field of r.
FieldElement rep_value(const BinomialRep& rep, const AlgebraicField& field);
/// Exact check of rep against target; validates the coefficient bounds first.
bool verify_rep(const BinomialRep& rep, const FieldElement& target);

BinomialRep complement_rep(const BinomialRep& rep);
BinomialRep product_rep(const BinomialRep& x, const BinomialRep& y);
/// t^p (1-t)^q for t given by rep.
BinomialRep cylinder_rep(unsigned p, unsigned q, const BinomialRep& rep);
/// The representation of r itself (n = 1, a = (0, 1)).
BinomialRep identity_rep();
bool is_identity_rep(const BinomialRep& rep);

/// Least n, then lexicographically least a. nullopt means none with n <= n_max
/// within the node budget.
std::optional<BinomialRep> search_rep(const FieldElement& target, unsigned n_max,
                                      std::uint64_t node_budget = 50'000'000);

}  // namespace cantor
