#include "finite_diff.hpp"

#include <cmath>
#include <functional>

namespace prb::detail {

const Stencil& stencil(int order, bool forward) {
  static const std::array<Stencil, 5> central = {{
      {{0}, {1.0}},
      {{-1, 1}, {-0.5, 0.5}},
      {{-1, 0, 1}, {1.0, -2.0, 1.0}},
      {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},
      {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}},
  }};
  static const std::array<Stencil, 5> one_sided = {{
      {{0}, {1.0}},
      {{0, 1, 2}, {-1.5, 2.0, -0.5}},
      {{0, 1, 2, 3}, {2.0, -5.0, 4.0, -1.0}},
      {{0, 1, 2, 3, 4}, {-2.5, 9.0, -12.0, 7.0, -1.5}},
      {{0, 1, 2, 3, 4, 5}, {3.0, -14.0, 26.0, -24.0, 11.0, -2.0}},
  }};
  if (order < 0 || order > 4) throw ParameterError("finite differences support derivative orders up to 4");
  return forward ? one_sided[order] : central[order];
}

std::vector<std::vector<int>> multi_indices(std::size_t len, int max_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(len, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos == len) {
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[pos] = k;
      rec(pos + 1, left - k);
    }
    cur[pos] = 0;
  };
  rec(0, max_order);
  return out;
}

std::vector<std::array<double, 3>> probe_directions(int dim) {
  std::vector<std::array<double, 3>> dirs;
  if (dim == 1) {
    dirs = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
  } else if (dim == 2) {
    for (int k = 0; k < 8; ++k) {
      const double a = k * pi / 4.0;
      dirs.push_back({std::cos(a), std::sin(a), 0.0});
    }
  } else if (dim == 3) {
    for (int a = 0; a < 3; ++a) {
      for (double sgn : {1.0, -1.0}) {
        std::array<double, 3> d{0.0, 0.0, 0.0};
        d[a] = sgn;
        dirs.push_back(d);
      }
    }
    const double c = 1.0 / std::sqrt(3.0);
    for (int mask = 0; mask < 8; ++mask) {
      dirs.push_back({(mask & 1) ? -c : c, (mask & 2) ? -c : c, (mask & 4) ? -c : c});
    }
  } else {
    throw ParameterError("probe directions support dimensions 1 to 3");
  }
  return dirs;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (n <= 1) return {lo};
  std::vector<double> out(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace prb::detail
