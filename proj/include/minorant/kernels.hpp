#pragma once

// Data-parallel inner loops. Every kernel exists twice with an identical
// signature: `serial` is the reference implementation kept for testing and
// benchmarking, `parallel` is the OpenMP version the library calls. Kernels
// whose parallel form performs the same floating-point operations per output
// element (pivot_rows, stencil_defect, csr_apply, lipschitz_envelope) are
// bitwise identical to their serial twins. The relaxation sweeps use
// lexicographic Gauss-Seidel serially and red-black ordering in parallel, so
// they agree only at convergence.

#include <cstddef>
#include <cstdint>
#include <span>

namespace minorant::kernels {

/// Compressed sparse rows: y[i] = sum_k weight[k] * x[col[k]] for k in
/// [row_ptr[i], row_ptr[i+1]).
struct CsrView {
  std::span<const std::size_t> row_ptr;
  std::span<const std::size_t> col;
  std::span<const double> weight;
};

/// Grid topology shared by the stencil kernels. `mask[p]` selects the nodes
/// the kernel updates; neighbors are read unconditionally, so every masked
/// node must have all four axis neighbors inside the array.
struct GridView {
  int nx = 0;
  int ny = 0;
  std::span<const std::uint8_t> mask;
};

namespace serial {

void pivot_rows(double* tableau, std::size_t rows, std::size_t stride, std::size_t pivot_row,
                std::size_t pivot_col, std::span<const std::size_t> pivot_nonzeros);
void stencil_defect(const GridView& g, std::span<const double> u, std::span<double> out);
double relax_sweep(const GridView& g, std::span<double> u, std::span<const double> defect);
double obstacle_sweep(const GridView& g, std::span<double> h, std::span<const double> obstacle);
void csr_apply(const CsrView& a, std::span<const double> x, std::span<double> y);
void lipschitz_envelope(std::span<const double> r, std::span<const double> px, std::span<const double> py,
                        std::span<double> out);

}  // namespace serial

namespace parallel {

void pivot_rows(double* tableau, std::size_t rows, std::size_t stride, std::size_t pivot_row,
                std::size_t pivot_col, std::span<const std::size_t> pivot_nonzeros);
void stencil_defect(const GridView& g, std::span<const double> u, std::span<double> out);
double relax_sweep(const GridView& g, std::span<double> u, std::span<const double> defect);
double obstacle_sweep(const GridView& g, std::span<double> h, std::span<const double> obstacle);
void csr_apply(const CsrView& a, std::span<const double> x, std::span<double> y);
void lipschitz_envelope(std::span<const double> r, std::span<const double> px, std::span<const double> py,
                        std::span<double> out);

}  // namespace parallel

}  // namespace minorant::kernels
