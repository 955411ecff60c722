#include "ova/multipoly.hpp"

#include <stdexcept>
#include <utility>

namespace ova {

MultiIndex make_multi_index(std::vector<int> exponents) {
  if (exponents.empty())
    throw std::invalid_argument("multi-index: dimension must be >= 1");
  int degree = 0;
  for (int e : exponents) {
    if (e < 0) throw std::invalid_argument("multi-index: exponents must be >= 0");
    degree += e;
  }
  return MultiIndex{std::move(exponents), degree};
}

namespace {

// Emits every exponent vector of total degree exactly `remaining` over
// positions [pos, d) in ascending lexicographic order.
void emit_degree(int d, int pos, int remaining, std::vector<int>& cur,
                 std::vector<MultiIndex>& out, int degree) {
  if (pos == d - 1) {
    cur[pos] = remaining;
    out.push_back(MultiIndex{cur, degree});
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[pos] = e;
    emit_degree(d, pos + 1, remaining - e, cur, out, degree);
  }
}

}  // namespace

PolyBasis enumerate_basis(int dimension, int max_degree) {
  if (dimension < 1)
    throw std::invalid_argument("enumerate_basis: dimension must be >= 1");
  if (max_degree < 0)
    throw std::invalid_argument("enumerate_basis: max_degree must be >= 0");
  PolyBasis basis;
  basis.dimension = dimension;
  basis.max_degree = max_degree;
  std::vector<int> cur(dimension, 0);
  for (int g = 0; g <= max_degree; ++g)
    emit_degree(dimension, 0, g, cur, basis.indices, g);
  return basis;
}

double eval_monomial(std::span<const double> u, const MultiIndex& s) {
  if (u.size() != s.exponents.size())
    throw std::invalid_argument("eval_monomial: dimension mismatch");
  double p = 1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    // exponent 0 contributes the empty product, covering 0^0 = 1
    for (int j = 0; j < s.exponents[i]; ++j) p *= u[i];
  }
  return p;
}

double eval_poly(std::span<const double> coeffs, const PolyBasis& basis,
                 std::span<const double> u) {
  if (static_cast<int>(coeffs.size()) != basis.size())
    throw std::invalid_argument("eval_poly: coefficient count mismatch");
  if (static_cast<int>(u.size()) != basis.dimension)
    throw std::invalid_argument("eval_poly: dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < basis.size(); ++i)
    acc += coeffs[i] * eval_monomial(u, basis.indices[i]);
  return acc;
}

}  // namespace ova
