#include <algorithm>
#include <cmath>
#include <limits>

#include "minorant/kernels.hpp"

namespace minorant::kernels::parallel {

namespace {
// Below this many touched elements the fork/join cost dominates.
constexpr std::size_t kParallelThreshold = 1 << 14;
}  // namespace

void pivot_rows(double* tableau, std::size_t rows, std::size_t stride, std::size_t pivot_row,
                std::size_t pivot_col, std::span<const std::size_t> pivot_nonzeros) {
  const double* prow = tableau + pivot_row * stride;
  const std::size_t nnz = pivot_nonzeros.size();
  const std::size_t* cols = pivot_nonzeros.data();
  const long long n = static_cast<long long>(rows);
#pragma omp parallel for schedule(static) if (rows * nnz > kParallelThreshold)
  for (long long ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    if (i == pivot_row) continue;
    double* row = tableau + i * stride;
    const double factor = row[pivot_col];
    if (factor == 0.0) continue;
    for (std::size_t k = 0; k < nnz; ++k) row[cols[k]] -= factor * prow[cols[k]];
    row[pivot_col] = 0.0;
  }
}

void stencil_defect(const GridView& g, std::span<const double> u, std::span<double> out) {
  const std::size_t total = static_cast<std::size_t>(g.nx) * g.ny;
#pragma omp parallel for schedule(static) if (total > kParallelThreshold)
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

namespace {

template <class Update>
double red_black(const GridView& g, Update update) {
  double change = 0.0;
  const std::size_t total = static_cast<std::size_t>(g.nx) * g.ny;
  for (int color = 0; color < 2; ++color) {
#pragma omp parallel for schedule(static) reduction(max : change) if (total > kParallelThreshold)
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = (iy + color) % 2; ix < g.nx; ix += 2) {
        const std::size_t p = static_cast<std::size_t>(iy) * g.nx + ix;
        if (!g.mask[p]) continue;
        change = std::max(change, update(p));
      }
    }
  }
  return change;
}

}  // namespace

double relax_sweep(const GridView& g, std::span<double> u, std::span<const double> defect) {
  return red_black(g, [&](std::size_t p) {
    const double next = 0.25 * (u[p - 1] + u[p + 1] + u[p - g.nx] + u[p + g.nx]) - defect[p];
    const double delta = std::abs(next - u[p]);
    u[p] = next;
    return delta;
  });
}

double obstacle_sweep(const GridView& g, std::span<double> h, std::span<const double> obstacle) {
  return red_black(g, [&](std::size_t p) {
    const double mean = 0.25 * (h[p - 1] + h[p + 1] + h[p - g.nx] + h[p + g.nx]);
    const double next = std::min(obstacle[p], mean);
    const double delta = std::abs(next - h[p]);
    h[p] = next;
    return delta;
  });
}

void csr_apply(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const long long n = static_cast<long long>(a.row_ptr.size()) - 1;
#pragma omp parallel for schedule(static) if (a.col.size() > kParallelThreshold)
  for (long long ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double s = 0.0;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.weight[k] * x[a.col[k]];
    y[i] = s;
  }
}

void lipschitz_envelope(std::span<const double> r, std::span<const double> px, std::span<const double> py,
                        std::span<double> out) {
  const long long n = static_cast<long long>(r.size());
#pragma omp parallel for schedule(static) if (r.size() * r.size() > kParallelThreshold)
  for (long long ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < r.size(); ++j)
      best = std::min(best, r[j] + std::hypot(px[i] - px[j], py[i] - py[j]));
    out[i] = best;
  }
}

}  // namespace minorant::kernels::parallel
