#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace minorant::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
  std::size_t var;
  double coef;
};

struct Row {
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

/// objective . x  ->  min/max   subject to   rows,   lower <= x <= upper.
/// Bounds may be infinite; coefficients must be finite.
class LinearProgram {
 public:
  explicit LinearProgram(Sense sense = Sense::Minimize) : sense_(sense) {}

  std::size_t add_variable(double lower = 0.0, double upper = kInfinity, double cost = 0.0);
  std::size_t add_row(std::vector<Term> terms, Relation relation, double rhs);

  void set_cost(std::size_t var, double cost) { cost_.at(var) = cost; }
  void set_bounds(std::size_t var, double lower, double upper);
  void set_sense(Sense s) { sense_ = s; }

  Sense sense() const { return sense_; }
  std::size_t num_vars() const { return cost_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  const std::vector<double>& cost() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<Row>& rows() const { return rows_; }

  /// Throws Error(InvalidArgument) on non-finite coefficients, bad indices
  /// or crossed bounds.
  void validate() const;

 private:
  Sense sense_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<Row> rows_;
};

enum class Status { Optimal, Unbounded, Infeasible };
std::string to_string(Status s);

/// Entering-variable choice. `Bland` is the pure smallest-index rule.
/// `Hybrid` prices by most negative reduced cost, breaks every tie by the
/// smallest index, and falls back to Bland after a run of degenerate pivots
/// until the objective strictly improves again; it cannot cycle either.
enum class PivotRule { Bland, Hybrid };

struct IterationInfo {
  int phase = 0;               // 1 or 2
  std::size_t iteration = 0;   // pivots so far, both phases
  double objective = 0.0;      // phase 2: objective of the current basic solution, original sense
};

struct SolveOptions {
  double tol = 1e-9;
  double pivot_tol = 1e-9;     // tableau entries at or below this are treated as zero
  double pivot_floor = 1e-13;  // an accepted pivot below this raises NumericalBreakdown
  PivotRule rule = PivotRule::Hybrid;
  std::size_t degenerate_run = 50;
  std::size_t max_iterations = 200000;
  bool verify = true;          // run verify() on the outcome; failure raises NumericalBreakdown
  std::function<void(const IterationInfo&)> observer;
};

struct Outcome {
  Status status = Status::Infeasible;
  /// Objective at `primal` (optimal value when Optimal).
  double objective = 0.0;
  /// Optimal point, or a feasible point when Unbounded.
  std::vector<double> primal;
  /// Shadow prices d(objective)/d(rhs_i), one per row (Optimal only).
  std::vector<double> dual;
  /// Improving direction (Unbounded only).
  std::vector<double> ray;
  /// Infeasible only: nonnegative weights on the rows written in ">=" form
  /// (<= rows negated; free sign on = rows) whose combination g.x >= y.b
  /// cannot be met anywhere inside the variable bounds.
  std::vector<double> farkas;
  std::vector<std::size_t> basis;
  std::size_t iterations = 0;
};

Outcome solve(const LinearProgram& lp, const SolveOptions& options = {});

struct Verification {
  bool ok = false;
  double primal_residual = 0.0;  // worst scaled row/bound violation
  double dual_residual = 0.0;    // worst scaled sign violation of the multipliers
  double gap = 0.0;              // |primal objective - dual objective| (Optimal)
  double dual_objective = 0.0;
  std::string message;
};

/// Checks an outcome by direct substitution into the original program:
/// feasibility, dual feasibility and the duality gap for Optimal; the ray
/// conditions for Unbounded; the Farkas inequality for Infeasible.
Verification verify(const LinearProgram& lp, const Outcome& outcome, double tol = 1e-9);

}  // namespace minorant::lp
