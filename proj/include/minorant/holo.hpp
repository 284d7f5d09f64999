#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "minorant/duality.hpp"
#include "minorant/ext_real.hpp"
#include "minorant/grid.hpp"
#include "minorant/smoothing.hpp"

namespace minorant {

struct DivisorAtom {
  double x = 0.0;
  double y = 0.0;
  int multiplicity = 1;
};

/// Zeros with multiplicities. Each point's nearest node is inside the domain.
struct Divisor {
  std::vector<DivisorAtom> atoms;

  void validate(const GridDomain& d) const;
};

/// sum_k m_k log max(|node - z_k|, h/2) at every inside node.
GridFunction divisor_log_potential(const Divisor& z, const GridDomain& d);

enum class UqMode { Max, SqrtSum };

/// Combines two log-moduli: max(a, b) or log sqrt(e^{2a} + e^{2b}).
GridFunction uq_potential(const GridFunction& log_q1, const GridFunction& log_q2, const GridDomain& d, UqMode mode);

struct CriterionReport {
  bool feasible = false;
  ExtReal primal_value;
  ExtReal dual_value;
  std::optional<GridFunction> h;
  /// Smallest C >= 0 with u + h <= M + C on finite nodes.
  std::optional<double> C;
  /// C * nu(D) - int h dnu: for every certificate (mu, c) of a cone that
  /// contains the constants, int u dmu <= int M dmu + integral_constant + c.
  std::optional<double> integral_constant;
  std::optional<SweepCertificate> certificate;
  std::optional<FarkasSummary> farkas;
  std::optional<GridFunction> transformed_weight;
  /// Pipeline only: |int F_bal dmu - int F^{*r} dmu^bal| for the certificate.
  std::optional<double> ifbal_discrepancy;
  std::vector<std::string> notes;
};

/// F = M - u with (-inf) - (-inf) = +inf (a zero of the weight that the
/// potential cancels). UndefinedSum when u = +inf meets M = +inf.
GridFunction criterion_deficit(const GridFunction& u, const GridFunction& m, const GridDomain& d);

/// Largest minorant h in H of F = M - u measured by nu, the optimal sweeping
/// certificate and, when no minorant exists, the Farkas summary.
CriterionReport minorant_criterion(const GridFunction& u, const GridFunction& m, const ConeSpec& cone,
                                   const DiscreteMeasure& nu, const GridDomain& d, const DualityOptions& opt = {});

/// r^ = refine_radius(r), G = F^{*r^}, F_bal = G made harmonic on U1, then
/// the supremal problem against F_bal. On success C >= 0 is minimal with
/// h <= G + C. SupportViolation unless supp nu lies in U0.
CriterionReport theorem71_pipeline(const GridFunction& f, const DiscreteMeasure& nu, const SubDomain& u0,
                                   const SubDomain& u1, const RadiusField& r, const ConeSpec& cone,
                                   const GridDomain& d, const DualityOptions& opt = {});

enum class TransformMode { InfDyadic, FixedD };

struct TransformParams {
  TransformMode mode = TransformMode::InfDyadic;
  double a = 1.0;
  /// InfDyadic: radii d_max(z) 2^{-j}, j = 1..depth, d_max = min(1, dist(z, bd D)).
  int depth = 16;
  /// InfDyadic: optional smoothing radius; M is replaced by M^{*r} first.
  std::optional<RadiusField> smoothing;
  /// FixedD: the radius field d(z); nodes with d(z) = 0 get +inf.
  std::optional<RadiusField> radius;
  /// FixedD: d(p) / d(q) <= ratio_bound for adjacent nodes with d > 0.
  double ratio_bound = 4.0;
};

/// M~(z) = B(z, d) + log(1/d) + (1 + a) log(2 + |z|), minimized over the
/// dyadic radii (InfDyadic) or at d = d(z) (FixedD). Radii below one
/// lattice step or whose ball leaves D are skipped; no admissible radius
/// gives +inf.
GridFunction weight_transform(const GridFunction& m, const GridDomain& d, const TransformParams& params);

struct ZeroSetResult {
  GridFunction h;
  GridFunction g_conjugate;
  GridFunction log_f;
  double C = 0.0;
  double max_residue = 0.0;
  CriterionReport report;
};

/// Harmonic h with log|f_Z| + h <= M + C for nu = delta_{z0}, its conjugate
/// anchored at z0 and log_f = u + h. NotFeasible when no harmonic minorant
/// exists; MultiplyConnected unless the domain is simply connected.
ZeroSetResult zero_set_construct(const Divisor& z, const GridFunction& m, std::size_t z0, const GridDomain& d,
                                 const DualityOptions& opt = {});

}  // namespace minorant
