#include "minorant/lp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "minorant/error.hpp"
#include "minorant/kernels.hpp"

namespace minorant::lp {

std::size_t LinearProgram::add_variable(double lower, double upper, double cost) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return cost_.size() - 1;
}

std::size_t LinearProgram::add_row(std::vector<Term> terms, Relation relation, double rhs) {
  rows_.push_back(Row{std::move(terms), relation, rhs});
  return rows_.size() - 1;
}

void LinearProgram::set_bounds(std::size_t var, double lower, double upper) {
  lower_.at(var) = lower;
  upper_.at(var) = upper;
}

void LinearProgram::validate() const {
  for (std::size_t j = 0; j < num_vars(); ++j) {
    if (!std::isfinite(cost_[j])) throw Error(ErrorCode::InvalidArgument, "non-finite objective coefficient");
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] == kInfinity || upper_[j] == -kInfinity ||
        lower_[j] > upper_[j])
      throw Error(ErrorCode::InvalidArgument, "invalid bounds on variable " + std::to_string(j));
  }
  for (const auto& row : rows_) {
    if (!std::isfinite(row.rhs)) throw Error(ErrorCode::InvalidArgument, "non-finite right-hand side");
    for (const auto& t : row.terms) {
      if (t.var >= num_vars()) throw Error(ErrorCode::InvalidArgument, "row references unknown variable");
      if (!std::isfinite(t.coef)) throw Error(ErrorCode::InvalidArgument, "non-finite constraint coefficient");
    }
  }
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "OPTIMAL";
    case Status::Unbounded: return "UNBOUNDED";
    case Status::Infeasible: return "INFEASIBLE";
  }
  return "UNKNOWN";
}

namespace {

// x_j = offset + sign * x'[col_a] - x'[col_b]   (col_b only for free variables)
struct VarMap {
  double offset = 0.0;
  std::size_t col_a = 0;
  double sign = 1.0;
  std::ptrdiff_t col_b = -1;
};

constexpr std::ptrdiff_t kNone = -1;

// The program rewritten as  min c'.x'  s.t.  A'x' (rel) b' >= 0,  x' >= 0,
// with slack and artificial columns appended. Row k of A' is either an
// original row (orig_row[k] >= 0) or the upper bound of a doubly bounded
// variable.
struct StandardForm {
  std::size_t rows = 0;
  std::size_t structural = 0;
  std::size_t cols = 0;
  std::vector<VarMap> vars;
  std::vector<double> flip;
  std::vector<Relation> relation;
  std::vector<double> rhs;
  std::vector<std::ptrdiff_t> orig_row;
  std::vector<std::vector<std::pair<std::size_t, double>>> column;  // sparse columns of [A' | slack | art]
  std::vector<double> cost;                                          // phase-2 cost (min sense)
  std::vector<char> artificial;
  std::vector<std::size_t> identity_col;  // column equal to e_k initially
  double cost_offset = 0.0;
};

StandardForm standardize(const LinearProgram& lp) {
  StandardForm sf;
  const double dir = lp.sense() == Sense::Maximize ? -1.0 : 1.0;
  const auto& lo = lp.lower();
  const auto& up = lp.upper();

  std::vector<double> scost;
  std::vector<std::pair<std::size_t, double>> bound_rows;  // (structural col, width)
  sf.vars.resize(lp.num_vars());
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    VarMap& v = sf.vars[j];
    const double c = dir * lp.cost()[j];
    if (std::isfinite(lo[j])) {
      v.offset = lo[j];
      v.col_a = scost.size();
      v.sign = 1.0;
      scost.push_back(c);
      if (std::isfinite(up[j])) bound_rows.emplace_back(v.col_a, up[j] - lo[j]);
    } else if (std::isfinite(up[j])) {
      v.offset = up[j];
      v.col_a = scost.size();
      v.sign = -1.0;
      scost.push_back(-c);
    } else {
      v.col_a = scost.size();
      v.sign = 1.0;
      scost.push_back(c);
      v.col_b = static_cast<std::ptrdiff_t>(scost.size());
      scost.push_back(-c);
    }
    sf.cost_offset += c * v.offset;
  }
  sf.structural = scost.size();

  // Assemble rows in x' space.
  std::vector<std::vector<std::pair<std::size_t, double>>> row_terms;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const Row& r = lp.rows()[i];
    std::vector<std::pair<std::size_t, double>> terms;
    double rhs = r.rhs;
    for (const auto& t : r.terms) {
      const VarMap& v = sf.vars[t.var];
      terms.emplace_back(v.col_a, t.coef * v.sign);
      if (v.col_b != kNone) terms.emplace_back(static_cast<std::size_t>(v.col_b), -t.coef);
      rhs -= t.coef * v.offset;
    }
    row_terms.push_back(std::move(terms));
    sf.relation.push_back(r.relation);
    sf.rhs.push_back(rhs);
    sf.orig_row.push_back(static_cast<std::ptrdiff_t>(i));
  }
  for (const auto& [col, width] : bound_rows) {
    row_terms.push_back({{col, 1.0}});
    sf.relation.push_back(Relation::LessEqual);
    sf.rhs.push_back(width);
    sf.orig_row.push_back(kNone);
  }
  sf.rows = row_terms.size();

  // Normalize to b' >= 0. Homogeneous >= rows are flipped to <= so that
  // they start with a basic slack instead of a degenerate artificial.
  double rhs_scale = 0.0;
  for (double b : sf.rhs) rhs_scale = std::max(rhs_scale, std::abs(b));
  sf.flip.assign(sf.rows, 1.0);
  for (std::size_t k = 0; k < sf.rows; ++k) {
    if (std::abs(sf.rhs[k]) <= 1e-15 * (1.0 + rhs_scale)) sf.rhs[k] = 0.0;
    if (sf.rhs[k] < 0.0 || (sf.rhs[k] == 0.0 && sf.relation[k] == Relation::GreaterEqual)) {
      sf.flip[k] = -1.0;
      sf.rhs[k] = -sf.rhs[k] + 0.0;
      for (auto& t : row_terms[k]) t.second = -t.second;
      if (sf.relation[k] == Relation::LessEqual)
        sf.relation[k] = Relation::GreaterEqual;
      else if (sf.relation[k] == Relation::GreaterEqual)
        sf.relation[k] = Relation::LessEqual;
    }
  }

  sf.column.assign(sf.structural, {});
  for (std::size_t k = 0; k < sf.rows; ++k)
    for (const auto& [col, coef] : row_terms[k]) sf.column[col].emplace_back(k, coef);
  sf.cost = scost;
  sf.artificial.assign(sf.structural, 0);
  sf.identity_col.assign(sf.rows, 0);

  // Slack / surplus columns.
  for (std::size_t k = 0; k < sf.rows; ++k) {
    if (sf.relation[k] == Relation::Equal) continue;
    const double s = sf.relation[k] == Relation::LessEqual ? 1.0 : -1.0;
    sf.column.push_back({{k, s}});
    sf.cost.push_back(0.0);
    sf.artificial.push_back(0);
    if (s > 0) sf.identity_col[k] = sf.column.size() - 1;
  }
  // Artificial columns.
  for (std::size_t k = 0; k < sf.rows; ++k) {
    if (sf.relation[k] == Relation::LessEqual) continue;
    sf.column.push_back({{k, 1.0}});
    sf.cost.push_back(0.0);
    sf.artificial.push_back(1);
    sf.identity_col[k] = sf.column.size() - 1;
  }
  sf.cols = sf.column.size();
  return sf;
}

class Tableau {
 public:
  Tableau(const StandardForm& sf, const SolveOptions& opt)
      : sf_(sf), opt_(opt), m_(sf.rows), n_(sf.cols), stride_(sf.cols + 2), t_((m_ + 1) * stride_, 0.0),
        basis_(m_), barred_(sf.artificial) {
    for (std::size_t j = 0; j < n_; ++j)
      for (const auto& [k, coef] : sf.column[j]) at(k, j) += coef;
    for (std::size_t k = 0; k < m_; ++k) {
      at(k, n_) = sf.rhs[k];
      at(k, n_ + 1) = sf.rhs[k];
      basis_[k] = sf.identity_col[k];
    }
    for (double b : sf.rhs) rhs_scale_ = std::max(rhs_scale_, std::abs(b));
  }

  double& at(std::size_t i, std::size_t j) { return t_[i * stride_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * stride_ + j]; }
  // Column n_ drives the ratio test and may carry a perturbation; column
  // n_ + 1 is pivoted alongside and holds the unperturbed basic values.
  double objective_value() const { return -at(m_, n_ + 1); }
  const std::vector<std::size_t>& basis() const { return basis_; }
  std::size_t iterations() const { return iterations_; }

  void load_costs(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= n_ + 1; ++j) at(m_, j) = j < n_ ? c[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n_ + 1; ++j) at(m_, j) -= cb * at(i, j);
    }
  }

  enum class Result { Optimal, Unbounded };

  Result run(int phase, std::size_t* entering_out) {
    phase_ = phase;
    bool bland = opt_.rule == PivotRule::Bland;
    std::size_t degenerate = 0;
    for (;;) {
      // Phase 1 is done once the artificials sum to zero; optimality of that
      // basis for the auxiliary cost is irrelevant.
      if (phase == 1 && objective_value() <= opt_.tol * feasibility_scale()) return Result::Optimal;
      const std::size_t enter = choose_entering(bland);
      if (enter == n_) return Result::Optimal;
      double ratio = 0.0;
      const std::size_t leave = choose_leaving(enter, bland, &ratio);
      if (leave == m_) {
        *entering_out = enter;
        return Result::Unbounded;
      }
      pivot(leave, enter);
      if (ratio <= opt_.tol) {
        if (++degenerate >= opt_.degenerate_run) bland = true;
      } else {
        degenerate = 0;
        bland = opt_.rule == PivotRule::Bland;
      }
      if (phase == 2 && opt_.observer)
        opt_.observer(IterationInfo{2, iterations_, report_dir_ * (objective_value() + report_offset_)});
      if (iterations_ >= opt_.max_iterations)
        throw Error(ErrorCode::NumericalBreakdown, "simplex iteration limit reached");
    }
  }

  // Pivot remaining artificials out of the basis after a feasible phase 1.
  void expel_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!sf_.artificial[basis_[i]]) continue;
      std::size_t best = n_;
      double mag = opt_.pivot_tol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (sf_.artificial[j]) continue;
        if (std::abs(at(i, j)) > mag) {
          mag = std::abs(at(i, j));
          best = j;
        }
      }
      if (best != n_) pivot(i, best);
    }
  }

  // Lifts every basic value that an artificial does not hold by a distinct
  // tiny amount so that ties in the ratio test disappear and degenerate
  // stalls cannot occur. The unperturbed column is left untouched.
  void perturb(double relative) {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    const double eps = relative * feasibility_scale();
    for (std::size_t i = 0; i < m_; ++i)
      if (!sf_.artificial[basis_[i]]) at(i, n_) += eps * u(rng);
  }

  std::vector<double> structural_values() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = at(i, n_ + 1);
    return x;
  }

  double feasibility_scale() const { return 1.0 + rhs_scale_; }

  void set_reporting(double dir, double offset) {
    report_dir_ = dir;
    report_offset_ = offset;
  }

 private:
  std::size_t choose_entering(bool bland) const {
    const double* r = &t_[m_ * stride_];
    std::size_t best = n_;
    double best_val = -opt_.tol;
    for (std::size_t j = 0; j < n_; ++j) {
      if (barred_[j]) continue;
      if (r[j] < best_val) {
        best = j;
        if (bland) return j;
        best_val = r[j];
      }
    }
    return best;
  }

  // Harris two-pass ratio test. Pass one bounds the step with every basic
  // value relaxed by the feasibility tolerance; pass two picks, among rows
  // whose exact ratio fits under that bound, the largest pivot (Bland: the
  // smallest basic index). Tiny pivots on degenerate rows are thereby
  // avoided unless nothing else limits the step.
  std::size_t choose_leaving(std::size_t enter, bool bland, double* ratio_out) const {
    const double delta = opt_.tol * feasibility_scale();
    double bound = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = at(i, enter);
      // An artificial left basic on a redundant row must stay at zero.
      if (stuck(i, a)) {
        bound = 0.0;
        any = true;
        continue;
      }
      if (a <= opt_.pivot_tol) continue;
      bound = std::min(bound, (std::max(0.0, at(i, n_)) + delta) / a);
      any = true;
    }
    if (!any) return m_;
    std::size_t best = m_;
    double best_mag = 0.0;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = at(i, enter);
      const bool st = stuck(i, a);
      if (a <= opt_.pivot_tol && !st) continue;
      const double ratio = st ? 0.0 : std::max(0.0, at(i, n_)) / a;
      if (ratio > bound) continue;
      const double mag = std::abs(a);
      const bool better = best == m_ || (bland ? basis_[i] < basis_[best] : mag > best_mag);
      if (better) {
        best = i;
        best_mag = mag;
        best_ratio = ratio;
      }
    }
    *ratio_out = best_ratio;
    return best;
  }

  bool stuck(std::size_t i, double a) const {
    return phase_ == 2 && sf_.artificial[basis_[i]] && std::abs(a) > opt_.pivot_tol;
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    if (std::abs(p) < opt_.pivot_floor)
      throw Error(ErrorCode::NumericalBreakdown, "pivot magnitude below floor");
    double* prow = &t_[row * stride_];
    nonzeros_.clear();
    for (std::size_t j = 0; j <= n_ + 1; ++j) {
      if (prow[j] == 0.0) continue;
      prow[j] /= p;
      nonzeros_.push_back(j);
    }
    prow[col] = 1.0;
    kernels::parallel::pivot_rows(t_.data(), m_ + 1, stride_, row, col, nonzeros_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j : {n_, n_ + 1}) {
        double& b = at(i, j);
        if (b < 0.0 && b > -opt_.tol * feasibility_scale()) b = 0.0;
      }
    }
    basis_[row] = col;
    if (sf_.artificial[col]) barred_[col] = 1;
    ++iterations_;
  }

  const StandardForm& sf_;
  const SolveOptions& opt_;
  std::size_t m_, n_, stride_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<char> barred_;
  std::vector<std::size_t> nonzeros_;
  std::size_t iterations_ = 0;
  int phase_ = 1;
  double rhs_scale_ = 0.0;
  double report_dir_ = 1.0;
  double report_offset_ = 0.0;
};

std::vector<double> to_original(const StandardForm& sf, const std::vector<double>& xs, bool with_offset) {
  std::vector<double> x(sf.vars.size());
  for (std::size_t j = 0; j < sf.vars.size(); ++j) {
    const VarMap& v = sf.vars[j];
    double val = (with_offset ? v.offset : 0.0) + v.sign * xs[v.col_a];
    if (v.col_b != kNone) val -= xs[static_cast<std::size_t>(v.col_b)];
    x[j] = val;
  }
  return x;
}

// Re-solve B x_B = b and B^T y = c_B from the untouched standard-form data
// so that the reported point and multipliers carry no accumulated pivoting
// error. Returns false when the basis matrix cannot be factorized.
bool refactor(const StandardForm& sf, const std::vector<std::size_t>& basis, std::vector<double>& xs,
              std::vector<double>& y) {
  const auto m = static_cast<Eigen::Index>(sf.rows);
  if (m == 0) return true;
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = 0; i < sf.rows; ++i)
    for (const auto& [k, coef] : sf.column[basis[i]])
      trip.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i), coef);
  Eigen::SparseMatrix<double> b(m, m);
  b.setFromTriplets(trip.begin(), trip.end());
  b.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(b);
  if (lu.info() != Eigen::Success) return false;
  Eigen::VectorXd rhs(m), cb(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    rhs[i] = sf.rhs[static_cast<std::size_t>(i)];
    cb[i] = sf.cost[basis[static_cast<std::size_t>(i)]];
  }
  Eigen::VectorXd xb = lu.solve(rhs);
  Eigen::VectorXd yy = lu.transpose().solve(cb);
  if (lu.info() != Eigen::Success || !xb.allFinite() || !yy.allFinite()) return false;
  std::fill(xs.begin(), xs.end(), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) xs[basis[static_cast<std::size_t>(i)]] = std::max(0.0, xb[i]);
  y.assign(yy.data(), yy.data() + m);
  return true;
}


constexpr double kPerturbation = 1e-11;

Outcome solve_once(const LinearProgram& lp, const SolveOptions& options, bool perturb) {
  const StandardForm sf = standardize(lp);
  Tableau tab(sf, options);
  const double dir = lp.sense() == Sense::Maximize ? -1.0 : 1.0;

  Outcome out;
  std::size_t entering = 0;

  // Phase 1: minimize the sum of artificials.
  std::vector<double> phase1(sf.cols, 0.0);
  for (std::size_t j = 0; j < sf.cols; ++j) phase1[j] = sf.artificial[j] ? 1.0 : 0.0;
  tab.load_costs(phase1);
  tab.run(1, &entering);

  if (tab.objective_value() > options.tol * tab.feasibility_scale()) {
    out.status = Status::Infeasible;
    out.farkas.assign(lp.num_rows(), 0.0);
    for (std::size_t k = 0; k < sf.rows; ++k) {
      if (sf.orig_row[k] == kNone) continue;
      const std::size_t col = sf.identity_col[k];
      const double y = phase1[col] - tab.at(sf.rows, col);
      const double z = sf.flip[k] * y;
      const auto i = static_cast<std::size_t>(sf.orig_row[k]);
      out.farkas[i] = lp.rows()[i].relation == Relation::LessEqual ? -z : z;
    }
    out.basis = tab.basis();
    out.iterations = tab.iterations();
  } else {
    tab.expel_artificials();
    tab.load_costs(sf.cost);
    if (perturb) tab.perturb(kPerturbation);
    tab.set_reporting(dir, sf.cost_offset);
    const auto result = tab.run(2, &entering);
    const std::vector<double> xs = tab.structural_values();
    if (result == Tableau::Result::Unbounded) {
      out.status = Status::Unbounded;
      out.primal = to_original(sf, xs, true);
      std::vector<double> dir_s(sf.cols, 0.0);
      dir_s[entering] = 1.0;
      for (std::size_t i = 0; i < sf.rows; ++i) dir_s[tab.basis()[i]] -= tab.at(i, entering);
      dir_s[entering] = 1.0;
      out.ray = to_original(sf, dir_s, false);
    } else {
      out.status = Status::Optimal;
      std::vector<double> xr = xs;
      std::vector<double> y(sf.rows, 0.0);
      if (!refactor(sf, tab.basis(), xr, y)) {
        xr = xs;
        for (std::size_t k = 0; k < sf.rows; ++k) y[k] = -tab.at(sf.rows, sf.identity_col[k]);
      }
      out.primal = to_original(sf, xr, true);
      out.dual.assign(lp.num_rows(), 0.0);
      for (std::size_t k = 0; k < sf.rows; ++k) {
        if (sf.orig_row[k] == kNone) continue;
        out.dual[static_cast<std::size_t>(sf.orig_row[k])] = dir * sf.flip[k] * y[k];
      }
    }
    out.basis = tab.basis();
    out.iterations = tab.iterations();
  }

  if (!out.primal.empty()) {
    double obj = 0.0;
    for (std::size_t j = 0; j < lp.num_vars(); ++j) obj += lp.cost()[j] * out.primal[j];
    out.objective = obj;
  }

  return out;
}

}  // namespace

Outcome solve(const LinearProgram& lp, const SolveOptions& options) {
  lp.validate();
  // Perturbed phase 2 first; the unperturbed Hybrid and Bland paths are
  // fallbacks for the rare basis that is optimal only under perturbation.
  struct Attempt {
    PivotRule rule;
    bool perturb;
  };
  const Attempt attempts[] = {{options.rule, true}, {options.rule, false}, {PivotRule::Bland, false}};
  Outcome out;
  Verification v;
  std::string failure;
  for (const Attempt& a : attempts) {
    SolveOptions o = options;
    o.rule = a.rule;
    try {
      out = solve_once(lp, o, a.perturb);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NumericalBreakdown) throw;
      failure = e.what();
      v.ok = false;
      continue;
    }
    if (!options.verify) return out;
    v = verify(lp, out, std::max(options.tol, 1e-9));
    if (v.ok) return out;
    failure = "outcome failed verification: " + v.message;
  }
  throw Error(ErrorCode::NumericalBreakdown, failure);
}

}  // namespace minorant::lp
