#pragma once

#include <cstddef>
#include <vector>

#include "minorant/ext_real.hpp"
#include "minorant/grid.hpp"

namespace minorant {

/// mean of the four neighbors minus u(p). NotInterior unless p is Interior;
/// InfiniteValue when u is infinite at p or a neighbor.
ExtReal laplacian_defect(const GridDomain& d, const GridFunction& u, std::size_t p);

/// laplacian_defect at every Interior node, 0 elsewhere. u must be finite on
/// the inside nodes.
GridFunction stencil_defect(const GridDomain& d, const GridFunction& u);

/// Defect >= -tol at every Interior node.
bool is_subharmonic(const GridDomain& d, const GridFunction& u, double tol = 1e-9);

/// The unique u equal to g on Boundary nodes with zero defect at every
/// Interior node. g must be finite on the boundary.
GridFunction solve_dirichlet(const GridDomain& d, const GridFunction& g);

/// As solve_dirichlet, with defect prescribed at Interior nodes. A
/// nonnegative defect yields a subharmonic function.
GridFunction solve_poisson(const GridDomain& d, const GridFunction& g, const GridFunction& defect);

/// Probability measure w_p on the boundary of U with value(p) = sum_b w_p(b)
/// value(b) for every function harmonic on U. delta_p when p lies on the
/// boundary of U; NodeOutsideSubdomain when p is outside clos U.
DiscreteMeasure harmonic_measure(const GridDomain& d, const SubDomain& u, std::size_t p);

/// mu off U, plus the mass mu puts on U swept to the boundary of U through
/// the harmonic measures. Mass is preserved and U carries no mass afterwards.
DiscreteMeasure balayage(const DiscreteMeasure& mu, const GridDomain& d, const SubDomain& u);

/// F off U, and inside U the Dirichlet solution with boundary data F on the
/// boundary of U. InfiniteBoundaryValue when F is infinite there.
GridFunction harmonic_extension(const GridFunction& f, const GridDomain& d, const SubDomain& u);

struct ConjugateResult {
  GridFunction v;
  /// Cauchy-Riemann loop sum around each unit cell, stored at the cell's
  /// lower-left node; 0 where the cell is not fully inside.
  GridFunction residue;
  double max_residue = 0.0;
};

/// v with v(anchor) = 0, integrated along a breadth-first spanning tree of
/// the inside nodes from central-difference Cauchy-Riemann increments
/// (one-sided second order at the edge of the domain). NotHarmonic when
/// |defect| > tol * (1 + max|h|) somewhere; MultiplyConnected when the
/// inside node set has a hole or several components.
ConjugateResult harmonic_conjugate(const GridFunction& h, const GridDomain& d, std::size_t anchor, double tol = 1e-8);

}  // namespace minorant
