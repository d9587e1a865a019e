#pragma once

// Tensor-product finite-difference stencils for mixed partial derivatives.

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "prb/core.hpp"

namespace prb::detail {

struct Stencil {
  std::vector<int> offsets;
  std::vector<double> coefficients;
};

/// Second-order accurate stencil for the m-th derivative (m <= 4); central,
/// or forward when the negative side is not available.
const Stencil& stencil(int order, bool forward);

/// Mixed partial derivative of f at `point` with per-variable orders and
/// steps. `forward[v]` selects a one-sided stencil for variable v.
/// Evaluations are memoized per call so overlapping stencils share work.
template <class F>
cplx mixed_derivative(F&& f, std::span<const double> point, std::span<const int> orders,
                      std::span<const double> steps, std::span<const bool> forward,
                      std::unordered_map<std::uint64_t, cplx>& cache) {
  const std::size_t nvar = point.size();
  std::vector<const Stencil*> st(nvar);
  std::size_t total = 1;
  for (std::size_t v = 0; v < nvar; ++v) {
    st[v] = &stencil(orders[v], forward[v]);
    total *= st[v]->offsets.size();
  }
  std::vector<double> probe(point.begin(), point.end());
  cplx acc = 0.0;
  for (std::size_t combo = 0; combo < total; ++combo) {
    std::size_t rest = combo;
    double weight = 1.0;
    std::uint64_t key = 0;
    for (std::size_t v = 0; v < nvar; ++v) {
      const std::size_t n = st[v]->offsets.size();
      const std::size_t idx = rest % n;
      rest /= n;
      const int off = st[v]->offsets[idx];
      weight *= st[v]->coefficients[idx];
      probe[v] = point[v] + off * steps[v];
      key = key * 16 + static_cast<std::uint64_t>(off + 4);
    }
    if (weight == 0.0) continue;
    auto it = cache.find(key);
    cplx val;
    if (it == cache.end()) {
      val = f(std::span<const double>(probe));
      cache.emplace(key, val);
    } else {
      val = it->second;
    }
    acc += weight * val;
  }
  double scale = 1.0;
  for (std::size_t v = 0; v < nvar; ++v) {
    for (int k = 0; k < orders[v]; ++k) scale *= steps[v];
  }
  return acc / scale;
}

/// All multi-indices of length `len` with total order <= max_order.
std::vector<std::vector<int>> multi_indices(std::size_t len, int max_order);

/// Unit directions used to sample R^dim (dim <= 3).
std::vector<std::array<double, 3>> probe_directions(int dim);

/// n log-spaced points on [lo, hi] (n >= 2), or {lo} when n == 1.
std::vector<double> logspace(double lo, double hi, int n);

}  // namespace prb::detail
