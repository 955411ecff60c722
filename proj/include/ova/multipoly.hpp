#pragma once

#include <span>
#include <vector>

namespace ova {

// Multi-index s = (s_1, ..., s_d), degree = s_1 + ... + s_d.
struct MultiIndex {
  std::vector<int> exponents;
  int degree = 0;
};

// Validates exponents (non-empty, all >= 0) and fills in the degree.
MultiIndex make_multi_index(std::vector<int> exponents);

// All multi-indices with degree <= max_degree in graded order: ascending
// total degree, lexicographic within a degree, so the zero index comes first.
struct PolyBasis {
  int dimension = 0;
  int max_degree = 0;
  std::vector<MultiIndex> indices;

  int size() const { return static_cast<int>(indices.size()); }
};

PolyBasis enumerate_basis(int dimension, int max_degree);

// u^s = prod_i u_i^{s_i}, with 0^0 = 1.
double eval_monomial(std::span<const double> u, const MultiIndex& s);

// sum_i coeffs[i] * u^{basis.indices[i]}; coeffs ordered like the basis.
double eval_poly(std::span<const double> coeffs, const PolyBasis& basis,
                 std::span<const double> u);

}  // namespace ova
