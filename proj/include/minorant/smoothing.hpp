#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "minorant/ext_real.hpp"
#include "minorant/grid.hpp"

namespace minorant {

/// Lattice offset with its kernel weight; dx, dy in lattice steps.
struct KernelTap {
  int dx;
  int dy;
  double weight;
};

/// A Jensen kernel on the lattice: a mixture, over radii rho in [0, r/h], of
/// the harmonic measures seen from 0 of the lattice discs
/// {|y| <= rho - 1} (the empty disc gives delta_0). The mixing density is
/// proportional to rho (1 - rho^2 / R^2)^2, the radial mass of the profile
/// (1 - (|y|/r)^2)^2. Weights are nonnegative, sum to 1, vanish beyond r and
/// are invariant under the 8 lattice symmetries. Because every component
/// is a harmonic measure, u(0) <= sum w u(y) for every discretely
/// subharmonic u.
class RadialKernel {
 public:
  /// r > 0 in length units, h the lattice spacing. r < h gives delta_0.
  static RadialKernel make(double r, double h);

  double radius() const { return r_; }
  double spacing() const { return h_; }
  const std::vector<KernelTap>& taps() const { return taps_; }
  /// Largest |offset| over the support, in lattice steps.
  int reach() const { return reach_; }
  /// "dx,dy,weight" lines with a header.
  std::string to_csv() const;

 private:
  double r_ = 0.0;
  double h_ = 1.0;
  int reach_ = 0;
  std::vector<KernelTap> taps_;
};

/// Node radii in length units, strictly positive on inside nodes.
using RadiusField = GridFunction;

/// Shrinks r so that (a) every closed ball B(x, r(x)) contains only inside
/// nodes and stays below dist(x, boundary of D) at Interior nodes, with
/// r <= h/2 on Boundary nodes, and (b) balls centered outside U1 miss U0;
/// then makes the result 1-Lipschitz (inf-convolution with |.|), takes the
/// minimum with its own stencil mean and restores the Lipschitz bound.
/// InvalidArgument unless clos U0 lies in U1; EmptyMargin when the boundary
/// of U1 meets the boundary of D.
RadiusField refine_radius(const RadiusField& r, const GridDomain& d, const SubDomain& u0, const SubDomain& u1);

/// F^{*r}(x) = sum_y alpha^{(r(x))}(y) F(x + y) at every inside node.
/// BallLeavesDomain when a kernel tap leaves D; InfiniteValue when F is
/// infinite under a tap.
GridFunction variable_smooth(const GridFunction& f, const RadiusField& r, const GridDomain& d);

/// sum_x mu(x) alpha_x^{(r(x))}. With u1 given, SupportViolation when mu
/// charges U1.
DiscreteMeasure mollified_measure(const DiscreteMeasure& mu, const RadiusField& r, const GridDomain& d,
                                  const SubDomain* u1 = nullptr);

/// Node-count mean of M over {|node - z| < radius}. RadiusTooSmall when
/// radius < h; BallLeavesDomain when a node of the ball is not inside D.
ExtReal ball_average(const GridFunction& m, const GridDomain& d, std::size_t z, double radius);

/// Mean of M over the ring {| |node - z| - radius | <= h/2}. RingTooSparse
/// below 8 ring nodes; BallLeavesDomain when a ring node is not inside D.
ExtReal sphere_average(const GridFunction& m, const GridDomain& d, std::size_t z, double radius);

}  // namespace minorant
