#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wair/nlp.hpp"

using namespace wair;

namespace {

Eigen::SparseMatrix<double> dense_to_sparse(const Eigen::MatrixXd& M) {
  return M.sparseView(0.0, 0.0);
}

// min x^2 + y^2  s.t.  x + y = 2  ->  (1, 1).
NLPProblem line_projection() {
  NLPProblem p;
  p.n = 2;
  p.objective = [](const Eigen::VectorXd& y) { return y.squaredNorm(); };
  p.gradient = [](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return 2.0 * y;
  };
  p.equality = [](const Eigen::VectorXd& y) {
    return Eigen::VectorXd::Constant(1, y[0] + y[1] - 2.0);
  };
  p.equality_jacobian = [](const Eigen::VectorXd&, const std::vector<char>*) {
    Eigen::MatrixXd J(1, 2);
    J << 1.0, 1.0;
    return dense_to_sparse(J);
  };
  p.y0 = Eigen::VectorXd::Zero(2);
  return p;
}

}  // namespace

TEST_SUITE("nlp") {

TEST_CASE("projection onto a line") {
  const NLPProblem p = line_projection();
  const SolveReport rep = solve(p);
  CHECK(rep.status == SolveStatus::kConverged);
  CHECK(rep.y[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(rep.y[1] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(rep.objective == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(rep.max_eq_violation <= 1e-5);
  // The equality multiplier converges to -2 (gradient 2y balanced by J^T l).
  CHECK(rep.lambda[0] == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("active upper bound") {
  // min (x-3)^2 s.t. x <= 1.
  NLPProblem p;
  p.n = 1;
  p.objective = [](const Eigen::VectorXd& y) {
    return (y[0] - 3.0) * (y[0] - 3.0);
  };
  p.gradient = [](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, 2.0 * (y[0] - 3.0));
  };
  p.lb = Eigen::VectorXd::Constant(1, -1e20);
  p.ub = Eigen::VectorXd::Constant(1, 1.0);
  p.y0 = Eigen::VectorXd::Constant(1, -2.0);
  const SolveReport rep = solve(p);
  CHECK(rep.status == SolveStatus::kConverged);
  CHECK(rep.y[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("active inequality constraint") {
  // Same problem with x <= 1 written as c_I(x) = 1 - x >= 0.
  NLPProblem p;
  p.n = 1;
  p.objective = [](const Eigen::VectorXd& y) {
    return (y[0] - 3.0) * (y[0] - 3.0);
  };
  p.gradient = [](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, 2.0 * (y[0] - 3.0));
  };
  p.inequality = [](const Eigen::VectorXd& y) {
    return Eigen::VectorXd::Constant(1, 1.0 - y[0]);
  };
  p.inequality_jacobian = [](const Eigen::VectorXd&,
                             const std::vector<char>*) {
    Eigen::MatrixXd J(1, 1);
    J << -1.0;
    return dense_to_sparse(J);
  };
  p.y0 = Eigen::VectorXd::Constant(1, -2.0);
  const SolveReport rep = solve(p);
  CHECK(rep.status == SolveStatus::kConverged);
  CHECK(rep.y[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rep.max_ineq_violation <= 1e-5);
  CHECK(rep.mu[0] > 0.0);  // constraint is active
}

TEST_CASE("rosenbrock from the classic start") {
  NLPProblem p;
  p.n = 2;
  p.objective = [](const Eigen::VectorXd& y) {
    const double a = 1.0 - y[0];
    const double b = y[1] - y[0] * y[0];
    return a * a + 100.0 * b * b;
  };
  p.gradient = [](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    Eigen::VectorXd g(2);
    const double b = y[1] - y[0] * y[0];
    g[0] = -2.0 * (1.0 - y[0]) - 400.0 * y[0] * b;
    g[1] = 200.0 * b;
    return g;
  };
  p.y0 = Eigen::VectorXd(2);
  p.y0 << -1.2, 1.0;
  SolverOptions opts;
  opts.opt_tol = 1e-9;
  opts.max_inner = 2000;
  const SolveReport rep = solve(p, opts);
  CHECK(rep.status == SolveStatus::kConverged);
  CHECK(std::abs(rep.y[0] - 1.0) < 1e-6);
  CHECK(std::abs(rep.y[1] - 1.0) < 1e-6);
}

TEST_CASE("rosenbrock via the least-squares path") {
  // r = [1 - x, 10(y - x^2)], f = ||r||^2.
  NLPProblem p;
  p.n = 2;
  p.ls_residual = [](const Eigen::VectorXd& y) {
    Eigen::VectorXd r(2);
    r[0] = 1.0 - y[0];
    r[1] = 10.0 * (y[1] - y[0] * y[0]);
    return r;
  };
  p.ls_jacobian = [](const Eigen::VectorXd& y, const std::vector<char>*) {
    Eigen::MatrixXd J(2, 2);
    J << -1.0, 0.0, -20.0 * y[0], 10.0;
    return dense_to_sparse(J);
  };
  p.objective = [&](const Eigen::VectorXd& y) {
    const double a = 1.0 - y[0];
    const double b = y[1] - y[0] * y[0];
    return a * a + 100.0 * b * b;
  };
  p.y0 = Eigen::VectorXd(2);
  p.y0 << -1.2, 1.0;
  SolverOptions opts;
  opts.opt_tol = 1e-10;
  const SolveReport rep = solve(p, opts);
  CHECK(rep.status == SolveStatus::kConverged);
  CHECK(std::abs(rep.y[0] - 1.0) < 1e-6);
  CHECK(std::abs(rep.y[1] - 1.0) < 1e-6);
}

TEST_CASE("constrained least squares with bounds and scaling") {
  // min ||y - a||^2 s.t. y_0 = y_1, 0 <= y <= 0.6; a = (1, 0.2).
  // Unconstrained projection onto y_0 = y_1 gives (0.6, 0.6); the upper bound
  // is exactly active.
  NLPProblem p;
  p.n = 2;
  const Eigen::Vector2d a(1.0, 0.2);
  p.ls_residual = [a](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return y - a;
  };
  p.ls_jacobian = [](const Eigen::VectorXd&, const std::vector<char>*) {
    return dense_to_sparse(Eigen::MatrixXd::Identity(2, 2));
  };
  p.objective = [a](const Eigen::VectorXd& y) { return (y - a).squaredNorm(); };
  p.equality = [](const Eigen::VectorXd& y) {
    return Eigen::VectorXd::Constant(1, y[0] - y[1]);
  };
  p.equality_jacobian = [](const Eigen::VectorXd&, const std::vector<char>*) {
    Eigen::MatrixXd J(1, 2);
    J << 1.0, -1.0;
    return dense_to_sparse(J);
  };
  p.lb = Eigen::VectorXd::Zero(2);
  p.ub = Eigen::VectorXd::Constant(2, 0.6);
  p.scaling = Eigen::VectorXd::Constant(2, 0.5);
  p.y0 = Eigen::VectorXd::Zero(2);
  const SolveReport rep = solve(p);
  CHECK(rep.status == SolveStatus::kConverged);
  CHECK(rep.y[0] == doctest::Approx(0.6).epsilon(1e-4));
  CHECK(rep.y[1] == doctest::Approx(0.6).epsilon(1e-4));
}

TEST_CASE("fixed variables are honored exactly") {
  // lb == ub pins y_1; the rest solves freely.
  NLPProblem p;
  p.n = 3;
  const Eigen::Vector3d a(2.0, -1.0, 0.5);
  p.ls_residual = [a](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return y - a;
  };
  p.ls_jacobian = [](const Eigen::VectorXd&, const std::vector<char>*) {
    return dense_to_sparse(Eigen::MatrixXd::Identity(3, 3));
  };
  p.objective = [a](const Eigen::VectorXd& y) { return (y - a).squaredNorm(); };
  p.lb = Eigen::VectorXd::Constant(3, -1e20);
  p.ub = Eigen::VectorXd::Constant(3, 1e20);
  p.lb[1] = p.ub[1] = 7.0;
  p.y0 = Eigen::VectorXd::Zero(3);
  const SolveReport rep = solve(p);
  CHECK(rep.status == SolveStatus::kConverged);
  CHECK(rep.y[1] == 7.0);
  CHECK(rep.y[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rep.y[2] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("kkt residual") {
  const NLPProblem p = line_projection();

  SUBCASE("zero at the optimum with the right multiplier") {
    Eigen::VectorXd y(2), lambda(1), mu;
    y << 1.0, 1.0;
    lambda << -2.0;
    CHECK(kkt_residual(p, y, lambda, mu) < 1e-12);
  }

  SUBCASE("positive away from stationarity") {
    Eigen::VectorXd y(2), lambda(1), mu;
    y << 0.3, -0.7;
    lambda << 0.0;
    CHECK(kkt_residual(p, y, lambda, mu) > 0.1);
  }

  SUBCASE("projected gradient ignores pushes into active bounds") {
    NLPProblem q;
    q.n = 1;
    q.objective = [](const Eigen::VectorXd& y) {
      return (y[0] - 3.0) * (y[0] - 3.0);
    };
    q.gradient = [](const Eigen::VectorXd& y) -> Eigen::VectorXd {
      return Eigen::VectorXd::Constant(1, 2.0 * (y[0] - 3.0));
    };
    q.lb = Eigen::VectorXd::Constant(1, -1e20);
    q.ub = Eigen::VectorXd::Constant(1, 1.0);
    Eigen::VectorXd y(1), lambda, mu;
    y << 1.0;
    // Gradient is negative (wants to increase x) but x sits at its upper
    // bound: the projected measure is zero.
    CHECK(kkt_residual(q, y, lambda, mu) == 0.0);
  }
}

TEST_CASE("solver reports and determinism") {
  const NLPProblem p = line_projection();
  const SolveReport a = solve(p);
  const SolveReport b = solve(p);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.objective == b.objective);
  CHECK(a.outer_iterations == b.outer_iterations);
  CHECK(a.inner_iterations == b.inner_iterations);
  CHECK(a.log == b.log);
  CHECK(!a.log.empty());

  // Feasible start cannot end worse than it began.
  NLPProblem q = p;
  q.y0 << 2.0, 0.0;  // on the line already
  const SolveReport rep = solve(q);
  CHECK(rep.status == SolveStatus::kConverged);
  CHECK(rep.objective <= q.objective(q.y0) + 1e-12);
}

TEST_CASE("numerical failure surfaces as a status") {
  NLPProblem p;
  p.n = 1;
  p.objective = [](const Eigen::VectorXd& y) {
    return std::sqrt(y[0]);  // NaN for y < 0
  };
  p.gradient = [](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, 0.5 / std::sqrt(y[0]));
  };
  p.y0 = Eigen::VectorXd::Constant(1, -1.0);
  const SolveReport rep = solve(p);
  CHECK(rep.status == SolveStatus::kNumericalFailure);
}

TEST_CASE("status strings") {
  CHECK(std::string(to_string(SolveStatus::kConverged)) == "converged");
  CHECK(std::string(to_string(SolveStatus::kMaxIterations)) == "max-iter");
  CHECK(std::string(to_string(SolveStatus::kNumericalFailure)) ==
        "numerical-failure");
}

}  // TEST_SUITE
