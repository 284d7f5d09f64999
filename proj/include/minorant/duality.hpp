#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "minorant/ext_real.hpp"
#include "minorant/grid.hpp"
#include "minorant/lp.hpp"

namespace minorant {

enum class ConeKind { Subharmonic, Harmonic, Custom };
enum class ConeRelation { GreaterEqual, Equal };

/// One linear condition sum_j coef_j h(node_j)  (>= or =)  offset.
struct ConeRow {
  std::vector<std::pair<std::size_t, double>> terms;
  ConeRelation relation = ConeRelation::GreaterEqual;
  double offset = 0.0;
};

/// The admissible class H = { h : A h >= b (or = b row by row) } over the
/// inside nodes. With b = 0 it is a cone; otherwise a convex set that must
/// contain 0 (b <= 0, and b = 0 on equality rows).
struct ConeSpec {
  ConeKind kind = ConeKind::Custom;
  std::vector<ConeRow> rows;

  /// Mean-value rows (neighbor mean - center >= 0) at every Interior node.
  /// Constants satisfy them with equality.
  static ConeSpec subharmonic(const GridDomain& d);
  /// The same rows as equalities.
  static ConeSpec harmonic(const GridDomain& d);
  /// Subharmonic rows with every offset set to b (b <= 0).
  static ConeSpec truncated_subharmonic(const GridDomain& d, double b);

  bool is_cone() const;
  /// InvalidArgument on nodes that are not inside, non-finite entries, a
  /// positive offset or a nonzero offset on an equality row.
  void validate(const GridDomain& d) const;
  /// A h - b row by row; h must be finite on every node a row touches.
  std::vector<double> residual(const GridFunction& h) const;
};

struct DualityOptions {
  double tol = 1e-9;
  /// Re-solve for the largest optimal h (sum of h maximal among the optimal
  /// set), which is the largest minorant for lattice-closed H.
  bool canonical_argmax = true;
  /// Forwarded to the simplex solver of the primal (or dual) program.
  std::function<void(const lp::IterationInfo&)> observer;
};

struct PrimalResult {
  /// max { int h dnu : h in H, h <= F }; -inf when infeasible, +inf when unbounded.
  ExtReal value;
  std::optional<GridFunction> argmax;
  std::size_t iterations = 0;
};

/// Dual object: mu = nu + A^T lambda >= 0 with lambda >= 0 on inequality rows
/// (free on equality rows) and c = -b . lambda >= 0. For every h in H,
/// int h dnu <= int h dmu + c.
struct SweepCertificate {
  std::vector<double> lambda;
  DiscreteMeasure mu;
  double c = 0.0;
};

struct DualResult {
  /// min { int F dmu + c } over certificates; +inf when none exists, -inf
  /// when a certificate can charge a node where F = -inf.
  ExtReal value;
  std::optional<SweepCertificate> certificate;
  std::size_t iterations = 0;
};

PrimalResult supremal_value(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu,
                            const GridFunction& f, const DualityOptions& opt = {});

/// Cone mode only (InvalidArgument for a nonzero offset).
DualResult sweep_dual_value(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu,
                            const GridFunction& f, const DualityOptions& opt = {});

/// Any valid ConeSpec; reduces to sweep_dual_value when b = 0.
DualResult affine_sweep_dual(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu,
                             const GridFunction& f, const DualityOptions& opt = {});

/// Whether int h dnu <= int h dmu + c for all h in H, decided by an LP over
/// H intersected with the box [-1, 1] (cone mode) or over H itself (an
/// unbounded program means false).
bool jensen_verify(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                   double c = 0.0, double tol = 1e-9);

struct FarkasSummary {
  /// Node where F = -inf, when that alone rules out every finite minorant.
  std::optional<std::size_t> infinite_node;
  /// Otherwise nonnegative weights on the cone rows (free sign on equality
  /// rows) proving that {h in H, h <= F} is empty.
  std::vector<double> row_weights;
  std::string text;
};

struct ExistenceResult {
  bool exists = false;
  std::optional<GridFunction> h;
  std::optional<FarkasSummary> farkas;
};

ExistenceResult minorant_exists(const GridDomain& d, const ConeSpec& cone, const GridFunction& f);

/// Positivity cross-check: the sweep dual re-solved without mu >= 0. It is
/// bounded exactly when F lies in H; then `applicable` is set and `min_mu`
/// is the smallest optimal weight.
struct PositivityCheck {
  bool applicable = false;
  double min_mu = 0.0;
};
PositivityCheck dual_positivity_check(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu,
                                      const GridFunction& f);

/// Largest subharmonic minorant of a finite F by the obstacle iteration
/// h <- min(F, neighbor mean) at Interior nodes, h = F on Boundary nodes,
/// run to a sweep change below tol.
GridFunction obstacle_minorant(const GridDomain& d, const GridFunction& f, double tol = 1e-13, bool parallel = true);

}  // namespace minorant
