#include <algorithm>
#include <cmath>
#include <limits>

#include "minorant/kernels.hpp"

namespace minorant::kernels::serial {

void pivot_rows(double* tableau, std::size_t rows, std::size_t stride, std::size_t pivot_row,
                std::size_t pivot_col, std::span<const std::size_t> pivot_nonzeros) {
  const double* prow = tableau + pivot_row * stride;
  for (std::size_t i = 0; i < rows; ++i) {
    if (i == pivot_row) continue;
    double* row = tableau + i * stride;
    const double factor = row[pivot_col];
    if (factor == 0.0) continue;
    for (std::size_t j : pivot_nonzeros) row[j] -= factor * prow[j];
    row[pivot_col] = 0.0;
  }
}

void stencil_defect(const GridView& g, std::span<const double> u, std::span<double> out) {
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::size_t p = static_cast<std::size_t>(iy) * g.nx + ix;
      if (!g.mask[p]) {
        out[p] = 0.0;
        continue;
      }
      const double mean = 0.25 * (u[p - 1] + u[p + 1] + u[p - g.nx] + u[p + g.nx]);
      out[p] = mean - u[p];
    }
  }
}

double relax_sweep(const GridView& g, std::span<double> u, std::span<const double> defect) {
  double change = 0.0;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::size_t p = static_cast<std::size_t>(iy) * g.nx + ix;
      if (!g.mask[p]) continue;
      const double next = 0.25 * (u[p - 1] + u[p + 1] + u[p - g.nx] + u[p + g.nx]) - defect[p];
      change = std::max(change, std::abs(next - u[p]));
      u[p] = next;
    }
  }
  return change;
}

double obstacle_sweep(const GridView& g, std::span<double> h, std::span<const double> obstacle) {
  double change = 0.0;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::size_t p = static_cast<std::size_t>(iy) * g.nx + ix;
      if (!g.mask[p]) continue;
      const double mean = 0.25 * (h[p - 1] + h[p + 1] + h[p - g.nx] + h[p + g.nx]);
      const double next = std::min(obstacle[p], mean);
      change = std::max(change, std::abs(next - h[p]));
      h[p] = next;
    }
  }
  return change;
}

void csr_apply(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = a.row_ptr.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.weight[k] * x[a.col[k]];
    y[i] = s;
  }
}

void lipschitz_envelope(std::span<const double> r, std::span<const double> px, std::span<const double> py,
                        std::span<double> out) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      best = std::min(best, r[j] + std::hypot(px[i] - px[j], py[i] - py[j]));
    out[i] = best;
  }
}

}  // namespace minorant::kernels::serial
