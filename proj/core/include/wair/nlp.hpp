#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace wair {

// General NLP:
//   min f(y)  s.t.  c_E(y) = 0,  c_I(y) >= 0,  lb <= y <= ub.
// Jacobian callbacks may receive a column mask of variables the solver holds
// fixed (lb == ub); implementations may skip those columns but must keep the
// sparsity pattern stable.  When the objective is a sum of squares, supplying
// ls_residual/ls_jacobian (f == ||r||^2) enables the Gauss-Newton path.
struct NLPProblem {
  int n = 0;
  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;

  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> ls_residual;
  std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&,
                                            const std::vector<char>*)>
      ls_jacobian;

  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> equality;
  std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&,
                                            const std::vector<char>*)>
      equality_jacobian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inequality;
  std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&,
                                            const std::vector<char>*)>
      inequality_jacobian;

  Eigen::VectorXd lb, ub;     // empty => unbounded
  Eigen::VectorXd scaling;    // characteristic magnitudes; empty => ones
  Eigen::VectorXd y0;
};

struct SolverOptions {
  double opt_tol = 1e-5;     // scaled projected-gradient threshold
  double feas_tol = 1e-5;    // max constraint violation
  int max_outer = 50;
  int max_inner = 500;       // per outer iteration
  double rho0 = 10.0;
  double rho_growth = 10.0;
  double rho_max = 1e8;
  // Multipliers update when violation <= max(feas_tol, gamma * previous).
  double update_ratio = 0.25;
  bool verbose = false;
};

enum class SolveStatus { kConverged, kMaxIterations, kNumericalFailure };

const char* to_string(SolveStatus s);

struct SolveReport {
  Eigen::VectorXd y;
  Eigen::VectorXd lambda;  // equality multipliers
  Eigen::VectorXd mu;      // inequality multipliers (>= 0)
  double objective = 0.0;
  double max_eq_violation = 0.0;
  double max_ineq_violation = 0.0;
  double kkt = 0.0;
  double rho_final = 0.0;  // penalty at exit, reusable as WarmStart::rho
  int outer_iterations = 0;
  int inner_iterations = 0;
  SolveStatus status = SolveStatus::kMaxIterations;
  std::string log;  // one line per outer iteration
};

// Optional warm start: primal iterate, multiplier estimates, and starting
// penalty carried over from a previous solve of a nearby problem (e.g. the
// preceding step of a continuation sweep).  Empty vectors fall back to the
// cold-start defaults (y0 / zeros); rho <= 0 falls back to rho0.
struct WarmStart {
  Eigen::VectorXd y;
  Eigen::VectorXd lambda;
  Eigen::VectorXd mu;
  double rho = 0.0;
};

// Augmented-Lagrangian solve: inner bound-projected minimization of
//   L_A = f + rho/2 ||c_E + lambda/rho||^2 + rho/2 ||max(0, mu/rho - c_I)||^2
// (Gauss-Newton/Levenberg-Marquardt when the least-squares form is supplied,
// dense BFGS otherwise), outer first-order multiplier updates with monotone
// penalty growth capped at rho_max.  Deterministic.
SolveReport solve(const NLPProblem& problem, const SolverOptions& options = {},
                  const WarmStart* warm = nullptr);

// Unscaled KKT residual at (y, lambda, mu): the bound-projected infinity norm
// of grad f + J_E^T lambda - J_I^T mu, plus max_i |min(c_I_i, mu_i)|.
double kkt_residual(const NLPProblem& problem, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& lambda, const Eigen::VectorXd& mu);

}  // namespace wair
