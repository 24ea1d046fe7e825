#include "wair/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include <Eigen/SparseCholesky>

namespace wair {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
constexpr double kInf = 1e19;

struct Workspace {
  const NLPProblem* P = nullptr;
  int n = 0;                  // full variable count
  int nf = 0;                 // free variables
  std::vector<int> free_idx;  // free slot -> full index
  std::vector<char> fixed;    // full index -> fixed flag
  Eigen::VectorXd s;          // scaling magnitudes (full)
  Eigen::VectorXd lb, ub;     // full, y-space
  Eigen::VectorXd zlb, zub;   // free, scaled space
  Eigen::VectorXd y_fixed;    // full vector with fixed entries set

  Eigen::VectorXd compose(const Eigen::VectorXd& z) const {
    Eigen::VectorXd y = y_fixed;
    for (int j = 0; j < nf; ++j) y[free_idx[j]] = s[free_idx[j]] * z[j];
    return y;
  }
  Eigen::VectorXd clampz(const Eigen::VectorXd& z) const {
    return z.cwiseMax(zlb).cwiseMin(zub);
  }
  // Projected-gradient measure honoring active bounds.
  double proj_grad_inf(const Eigen::VectorXd& z, const Eigen::VectorXd& g) const {
    double m = 0.0;
    for (int j = 0; j < nf; ++j) {
      const double span = 1e-12 * (1.0 + std::abs(z[j]));
      double v;
      if (z[j] <= zlb[j] + span)
        v = std::max(0.0, -g[j]);
      else if (z[j] >= zub[j] - span)
        v = std::max(0.0, g[j]);
      else
        v = std::abs(g[j]);
      m = std::max(m, v);
    }
    return m;
  }
};

// Reduce full-space sparse J to free columns with column scaling,
// accumulating scaled triplets at a row offset.  row_scale may be null.
void append_scaled(const SpMat& J, const Workspace& W, int row_offset,
                   const Eigen::VectorXd* row_scale, double factor,
                   const std::vector<int>& col_to_free,
                   std::vector<Triplet>& out) {
  for (int c = 0; c < J.outerSize(); ++c) {
    const int fc = col_to_free[c];
    if (fc < 0) continue;
    const double cs = W.s[c] * factor;
    for (SpMat::InnerIterator it(J, c); it; ++it) {
      const double rs = row_scale ? (*row_scale)[it.row()] : 1.0;
      out.emplace_back(row_offset + it.row(), fc, it.value() * cs * rs);
    }
  }
}

Eigen::VectorXd reduce_scaled_vec(const Eigen::VectorXd& g_full,
                                  const Workspace& W) {
  Eigen::VectorXd g(W.nf);
  for (int j = 0; j < W.nf; ++j)
    g[j] = g_full[W.free_idx[j]] * W.s[W.free_idx[j]];
  return g;
}

struct ALState {
  double rho = 10.0;
  Eigen::VectorXd lambda, mu;
};

struct InnerResult {
  Eigen::VectorXd z;
  double pg = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool nan = false;
};

// ---- Gauss-Newton / Levenberg-Marquardt on the stacked AL residual ----

struct ResidualEval {
  Eigen::VectorXd r_f, cE, cI;
  long double F = 0.0;  // extended precision: the endgame line search must
                        // resolve decreases at the last few bits of a
                        // double-width sum of squares
  bool nan = false;
};

// Sum of squares accumulated in extended precision.
long double sq_norm_ld(const Eigen::VectorXd& v) {
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    acc += static_cast<long double>(v[i]) * static_cast<long double>(v[i]);
  return acc;
}

ResidualEval eval_residuals(const Workspace& W, const ALState& al,
                            const Eigen::VectorXd& z) {
  ResidualEval ev;
  const Eigen::VectorXd y = W.compose(z);
  ev.r_f = W.P->ls_residual(y);
  long double F = sq_norm_ld(ev.r_f);
  if (W.P->equality) {
    ev.cE = W.P->equality(y);
    F += 0.5L * static_cast<long double>(al.rho) *
         sq_norm_ld(ev.cE + al.lambda / al.rho);
  }
  if (W.P->inequality) {
    ev.cI = W.P->inequality(y);
    const Eigen::VectorXd pen =
        (al.mu / al.rho - ev.cI).cwiseMax(0.0);
    F += 0.5L * static_cast<long double>(al.rho) * sq_norm_ld(pen);
  }
  ev.F = F;
  ev.nan = !std::isfinite(static_cast<double>(F));
  return ev;
}

InnerResult minimize_lm(const Workspace& W, const ALState& al,
                        Eigen::VectorXd z, double tol, int max_iter,
                        std::vector<int>& col_to_free,
                        Eigen::VectorXd* curvature_out = nullptr) {
  InnerResult res;
  ResidualEval cur = eval_residuals(W, al, z);
  if (cur.nan) {
    res.nan = true;
    res.z = z;
    return res;
  }

  const int mf = static_cast<int>(cur.r_f.size());
  const int mE = static_cast<int>(cur.cE.size());
  const int mI = static_cast<int>(cur.cI.size());
  const double w = std::sqrt(0.5 * al.rho);

  double nu = -1.0;  // initialized from the first JtJ diagonal
  SpMat H;
  Eigen::VectorXd g, d;
  Eigen::SimplicialLLT<SpMat> llt;

  auto linearize = [&](const ResidualEval& ev) {
    std::vector<Triplet> trips;
    const SpMat Jf = W.P->ls_jacobian(W.compose(z), &W.fixed);
    append_scaled(Jf, W, 0, nullptr, 1.0, col_to_free, trips);
    Eigen::VectorXd R(mf + mE + mI);
    R.head(mf) = ev.r_f;
    if (mE > 0) {
      const SpMat JE = W.P->equality_jacobian(W.compose(z), &W.fixed);
      append_scaled(JE, W, mf, nullptr, w, col_to_free, trips);
      R.segment(mf, mE) = w * (ev.cE + al.lambda / al.rho);
    }
    if (mI > 0) {
      const SpMat JI = W.P->inequality_jacobian(W.compose(z), &W.fixed);
      Eigen::VectorXd row_scale(mI);
      Eigen::VectorXd pen(mI);
      for (int i = 0; i < mI; ++i) {
        const double p = al.mu[i] / al.rho - ev.cI[i];
        pen[i] = std::max(0.0, p);
        row_scale[i] = (p > 0.0) ? -1.0 : 0.0;
      }
      append_scaled(JI, W, mf + mE, &row_scale, w, col_to_free, trips);
      R.tail(mI) = w * pen;
    }
    SpMat J(mf + mE + mI, W.nf);
    J.setFromTriplets(trips.begin(), trips.end());
    H = SpMat(J.transpose() * J);
    g = J.transpose() * R;
  };

  linearize(cur);
  Eigen::VectorXd D(W.nf);
  int stalled = 0;  // consecutive accepted steps with negligible F decrease
  for (int it = 0; it < max_iter; ++it) {
    ++res.iterations;
    res.pg = W.proj_grad_inf(z, 2.0 * g);
    if (res.pg <= tol) break;
    if (stalled >= 10) break;

    for (int j = 0; j < W.nf; ++j) D[j] = std::max(H.coeff(j, j), 1e-10);
    if (nu < 0.0) nu = 1e-6;

    SpMat Hnu = H;
    // Damped system (H + nu * diag(H)) d = -g.
    std::vector<Triplet> dt;
    dt.reserve(W.nf);
    for (int j = 0; j < W.nf; ++j) dt.emplace_back(j, j, nu * D[j]);
    SpMat Dm(W.nf, W.nf);
    Dm.setFromTriplets(dt.begin(), dt.end());
    Hnu = H + Dm;
    llt.compute(Hnu);
    if (llt.info() != Eigen::Success) {
      nu *= 10.0;
      if (nu > 1e15) break;
      continue;
    }
    d = llt.solve(-g);
    const Eigen::VectorXd z_trial = W.clampz(z + d);
    const double step = (z_trial - z).norm();
    if (step <= 1e-14 * (1.0 + z.norm())) break;

    const ResidualEval trial = eval_residuals(W, al, z_trial);
    if (!trial.nan && trial.F < cur.F) {
      // "Negligible" means at the arithmetic floor of the extended-precision
      // objective, not merely small: near the optimum a productive step only
      // decreases F by ~(gradient)^2 / curvature, which for a tightly
      // converged iterate sits far below 1e-13 * F.
      stalled = (cur.F - trial.F <= 1e-16L * (1.0L + cur.F)) ? stalled + 1 : 0;
      z = z_trial;
      cur = trial;
      linearize(cur);
      nu = std::max(nu / 3.0, 1e-12);
    } else {
      nu *= 4.0;
      if (nu > 1e15) break;
    }
  }
  res.pg = W.proj_grad_inf(z, 2.0 * g);
  res.z = z;
  res.nan = cur.nan;
  if (curvature_out) {
    curvature_out->resize(W.nf);
    for (int j = 0; j < W.nf; ++j)
      (*curvature_out)[j] = std::max(2.0 * H.coeff(j, j), 1e-10);
  }
  return res;
}

// ---- Dense projected BFGS for generic objectives ----

struct ValueGrad {
  long double F = 0.0;  // extended precision, matching ResidualEval::F
  Eigen::VectorXd g;    // scaled free-space gradient
  Eigen::VectorXd cE, cI;
  bool nan = false;
};

ValueGrad eval_generic(const Workspace& W, const ALState& al,
                       const Eigen::VectorXd& z) {
  ValueGrad ev;
  const Eigen::VectorXd y = W.compose(z);
  long double F = W.P->objective(y);
  Eigen::VectorXd g_full = W.P->gradient(y);
  if (W.P->equality) {
    ev.cE = W.P->equality(y);
    const Eigen::VectorXd shifted = ev.cE + al.lambda / al.rho;
    F += 0.5L * static_cast<long double>(al.rho) * sq_norm_ld(shifted);
    const SpMat JE = W.P->equality_jacobian(y, &W.fixed);
    g_full += JE.transpose() * (al.rho * shifted);
  }
  if (W.P->inequality) {
    ev.cI = W.P->inequality(y);
    const Eigen::VectorXd pen = (al.mu / al.rho - ev.cI).cwiseMax(0.0);
    F += 0.5L * static_cast<long double>(al.rho) * sq_norm_ld(pen);
    const SpMat JI = W.P->inequality_jacobian(y, &W.fixed);
    g_full -= JI.transpose() * (al.rho * pen);
  }
  ev.F = F;
  ev.g = reduce_scaled_vec(g_full, W);
  ev.nan = !std::isfinite(static_cast<double>(F)) || !ev.g.allFinite();
  return ev;
}

InnerResult minimize_bfgs(const Workspace& W, const ALState& al,
                          Eigen::VectorXd z, double tol, int max_iter,
                          const Eigen::VectorXd* curvature0 = nullptr) {
  InnerResult res;
  ValueGrad cur = eval_generic(W, al, z);
  if (cur.nan) {
    res.nan = true;
    res.z = z;
    return res;
  }
  // Seeding the inverse Hessian with known curvature scales (e.g. the
  // Gauss-Newton diagonal) lets the secant updates spend their budget on
  // the couplings instead of relearning per-variable magnitudes.
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(W.nf, W.nf);
  if (curvature0)
    for (int j = 0; j < W.nf; ++j) Hinv(j, j) = 1.0 / (*curvature0)[j];
  for (int it = 0; it < max_iter; ++it) {
    ++res.iterations;
    res.pg = W.proj_grad_inf(z, cur.g);
    if (res.pg <= tol) break;

    Eigen::VectorXd d = -Hinv * cur.g;
    if (d.dot(cur.g) >= 0.0) d = -cur.g;  // safeguard to a descent direction

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd z_new;
    ValueGrad next;
    for (int bt = 0; bt < 40; ++bt) {
      z_new = W.clampz(z + alpha * d);
      const Eigen::VectorXd actual = z_new - z;
      if (actual.norm() <= 1e-15 * (1.0 + z.norm())) break;
      next = eval_generic(W, al, z_new);
      if (!next.nan && next.F <= cur.F + 1e-4 * cur.g.dot(actual)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd sk = z_new - z;
    const Eigen::VectorXd yk = next.g - cur.g;
    const double sy = sk.dot(yk);
    if (sy > 1e-12 * sk.norm() * yk.norm()) {
      const Eigen::VectorXd Hy = Hinv * yk;
      const double yHy = yk.dot(Hy);
      // BFGS inverse update.
      Hinv += ((sy + yHy) / (sy * sy)) * (sk * sk.transpose()) -
              (Hy * sk.transpose() + sk * Hy.transpose()) / sy;
    }
    z = z_new;
    cur = next;
  }
  res.pg = W.proj_grad_inf(z, cur.g);
  res.z = z;
  res.nan = cur.nan;
  return res;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max-iter";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

SolveReport solve(const NLPProblem& problem, const SolverOptions& options,
                  const WarmStart* warm) {
  Workspace W;
  W.P = &problem;
  W.n = problem.n;
  W.s = problem.scaling.size() ? problem.scaling
                               : Eigen::VectorXd::Ones(W.n);
  W.lb = problem.lb.size() ? problem.lb
                           : Eigen::VectorXd::Constant(W.n, -kInf);
  W.ub = problem.ub.size() ? problem.ub
                           : Eigen::VectorXd::Constant(W.n, kInf);

  W.fixed.assign(W.n, 0);
  W.y_fixed = Eigen::VectorXd::Zero(W.n);
  for (int i = 0; i < W.n; ++i) {
    if (W.lb[i] == W.ub[i]) {
      W.fixed[i] = 1;
      W.y_fixed[i] = W.lb[i];
    } else {
      W.free_idx.push_back(i);
    }
  }
  W.nf = static_cast<int>(W.free_idx.size());
  W.zlb.resize(W.nf);
  W.zub.resize(W.nf);
  const Eigen::VectorXd& y_start =
      (warm && warm->y.size() == problem.n) ? warm->y : problem.y0;
  Eigen::VectorXd z(W.nf);
  for (int j = 0; j < W.nf; ++j) {
    const int i = W.free_idx[j];
    W.zlb[j] = W.lb[i] / W.s[i];
    W.zub[j] = W.ub[i] / W.s[i];
    z[j] = std::clamp(y_start[i] / W.s[i], W.zlb[j], W.zub[j]);
  }
  std::vector<int> col_to_free(W.n, -1);
  for (int j = 0; j < W.nf; ++j) col_to_free[W.free_idx[j]] = j;

  const bool has_ls = static_cast<bool>(problem.ls_residual);

  ALState al;
  al.rho = (warm && warm->rho > 0.0)
               ? std::clamp(warm->rho, options.rho0, options.rho_max)
               : options.rho0;
  {
    const Eigen::VectorXd y = W.compose(z);
    al.lambda = problem.equality
                    ? Eigen::VectorXd::Zero(problem.equality(y).size())
                    : Eigen::VectorXd();
    al.mu = problem.inequality
                ? Eigen::VectorXd::Zero(problem.inequality(y).size())
                : Eigen::VectorXd();
    if (warm && warm->lambda.size() == al.lambda.size())
      al.lambda = warm->lambda;
    if (warm && warm->mu.size() == al.mu.size())
      al.mu = warm->mu.cwiseMax(0.0);
  }
  const bool constrained = al.lambda.size() + al.mu.size() > 0;

  SolveReport rep;
  rep.status = SolveStatus::kMaxIterations;
  double viol_prev = std::numeric_limits<double>::infinity();
  double viol_last = std::numeric_limits<double>::infinity();
  double omega = constrained ? 1e-2 : options.opt_tol;
  char line[256];

  // The inner loop must solve subproblems tighter than the outer convergence
  // test: the test re-evaluates the gradient at the updated multipliers,
  // which shifts it by O(rho * violation), so an inner tolerance equal to
  // opt_tol would leave the reported KKT residual permanently just above it.
  const double inner_floor = options.opt_tol / 3.0;
  for (int outer = 0; outer < options.max_outer; ++outer) {
    const double inner_tol = std::max(inner_floor, omega);
    InnerResult inner;
    if (has_ls) {
      Eigen::VectorXd curvature;
      inner = minimize_lm(W, al, z, inner_tol, options.max_inner, col_to_free,
                          &curvature);
      // Gauss-Newton ignores the second-order term of the residual, so when
      // the multipliers are large its tail convergence is only linear.  Once
      // the iterate is nearly feasible (the optimality-polish phase), a
      // budget-exhausted inner loop continues with the secant method, which
      // recovers the missing curvature from gradient differences.
      if (!inner.nan && inner.pg > inner_tol &&
          inner.iterations >= options.max_inner && problem.gradient &&
          viol_last <= 100.0 * options.feas_tol) {
        InnerResult polish = minimize_bfgs(W, al, inner.z, inner_tol,
                                           options.max_inner, &curvature);
        polish.iterations += inner.iterations;
        if (!polish.nan) inner = polish;
      }
    } else {
      inner = minimize_bfgs(W, al, z, inner_tol, options.max_inner);
    }
    z = inner.z;
    rep.inner_iterations += inner.iterations;
    rep.outer_iterations = outer + 1;
    if (inner.nan) {
      rep.status = SolveStatus::kNumericalFailure;
      break;
    }

    const Eigen::VectorXd y = W.compose(z);
    const Eigen::VectorXd cE =
        problem.equality ? problem.equality(y) : Eigen::VectorXd();
    const Eigen::VectorXd cI =
        problem.inequality ? problem.inequality(y) : Eigen::VectorXd();
    const double eq_viol = cE.size() ? cE.cwiseAbs().maxCoeff() : 0.0;
    const double in_viol = cI.size() ? (-cI).cwiseMax(0.0).maxCoeff() : 0.0;
    const double viol = std::max(eq_viol, in_viol);
    viol_last = viol;

    Eigen::VectorXd lambda_hat = al.lambda, mu_hat = al.mu;
    if (cE.size()) lambda_hat = al.lambda + al.rho * cE;
    if (cI.size()) mu_hat = (al.mu - al.rho * cI).cwiseMax(0.0);
    double comp = 0.0;
    for (int i = 0; i < cI.size(); ++i)
      comp = std::max(comp, std::abs(std::min(cI[i], mu_hat[i])));

    rep.max_eq_violation = eq_viol;
    rep.max_ineq_violation = in_viol;
    rep.kkt = inner.pg + comp;
    rep.objective = problem.objective(W.compose(z));

    std::snprintf(line, sizeof(line),
                  "outer %3d  rho %.1e  inner %4d  f %.8e  viol %.3e  "
                  "kkt %.3e\n",
                  outer + 1, al.rho, inner.iterations, rep.objective, viol,
                  rep.kkt);
    rep.log += line;
    if (options.verbose) std::fputs(line, stderr);
    if (options.verbose && std::getenv("WAIR_NLP_TRACE") &&
        problem.gradient) {
      Eigen::VectorXd gL = problem.gradient(y);
      if (cE.size())
        gL += problem.equality_jacobian(y, &W.fixed).transpose() * lambda_hat;
      if (cI.size())
        gL -= problem.inequality_jacobian(y, &W.fixed).transpose() * mu_hat;
      std::vector<std::pair<double, int>> top;
      for (int j = 0; j < W.nf; ++j) {
        const int i = W.free_idx[j];
        const double span = 1e-12 * (1.0 + std::abs(z[j]));
        double v = gL[i] * W.s[i];
        if (z[j] <= W.zlb[j] + span) v = std::min(0.0, v);
        else if (z[j] >= W.zub[j] - span) v = std::max(0.0, v);
        top.emplace_back(std::abs(v), i);
      }
      std::partial_sort(top.begin(), top.begin() + 5, top.end(),
                        std::greater<>());
      for (int t = 0; t < 5; ++t)
        std::fprintf(stderr, "    g[%d] = %.3e  (y = %.6e)\n", top[t].second,
                     top[t].first, y[top[t].second]);
    }

    if (!std::isfinite(viol) || !std::isfinite(rep.objective)) {
      rep.status = SolveStatus::kNumericalFailure;
      break;
    }

    if (viol <= options.feas_tol && rep.kkt <= options.opt_tol) {
      al.lambda = lambda_hat;
      al.mu = mu_hat;
      rep.status = SolveStatus::kConverged;
      break;
    }

    if (viol <= std::max(options.feas_tol, options.update_ratio * viol_prev)) {
      al.lambda = lambda_hat;
      al.mu = mu_hat;
      viol_prev = viol;
      omega = std::max(inner_floor, omega * 0.2);
      // Feasible to tolerance with optimality still out of reach: a large
      // penalty only ill-conditions the subproblem, and the multipliers --
      // not the penalty -- are what hold the constraints by now.  Step the
      // penalty down two growth factors at a time: the walk stops at the
      // first level where the inner loop succeeds, which balances inner
      // conditioning against the per-outer violation contraction (both
      // degrade as rho shrinks).  If feasibility degrades instead, the
      // growth branch restores the penalty.
      if (viol <= options.feas_tol && inner.pg > inner_tol &&
          al.rho > options.rho0)
        al.rho = std::max(
            al.rho / (options.rho_growth * options.rho_growth),
            options.rho0);
    } else {
      al.rho = std::min(al.rho * options.rho_growth, options.rho_max);
      omega = std::max(inner_floor, omega * 0.5);
    }
  }

  rep.y = W.compose(z);
  rep.lambda = al.lambda;
  rep.mu = al.mu;
  rep.rho_final = al.rho;
  if (rep.objective == 0.0) rep.objective = problem.objective(rep.y);
  return rep;
}

double kkt_residual(const NLPProblem& problem, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& lambda, const Eigen::VectorXd& mu) {
  Eigen::VectorXd g = problem.gradient
                          ? problem.gradient(y)
                          : Eigen::VectorXd(2.0 *
                                            (problem.ls_jacobian(y, nullptr)
                                                 .transpose() *
                                             problem.ls_residual(y)));
  if (lambda.size())
    g += problem.equality_jacobian(y, nullptr).transpose() * lambda;
  if (mu.size())
    g -= problem.inequality_jacobian(y, nullptr).transpose() * mu;

  const Eigen::VectorXd lb =
      problem.lb.size() ? problem.lb : Eigen::VectorXd::Constant(problem.n, -kInf);
  const Eigen::VectorXd ub =
      problem.ub.size() ? problem.ub : Eigen::VectorXd::Constant(problem.n, kInf);
  double stat = 0.0;
  for (int i = 0; i < problem.n; ++i) {
    if (lb[i] == ub[i]) continue;
    const double span = 1e-12 * (1.0 + std::abs(y[i]));
    double v;
    if (y[i] <= lb[i] + span)
      v = std::max(0.0, -g[i]);
    else if (y[i] >= ub[i] - span)
      v = std::max(0.0, g[i]);
    else
      v = std::abs(g[i]);
    stat = std::max(stat, v);
  }
  double comp = 0.0;
  if (mu.size()) {
    const Eigen::VectorXd cI = problem.inequality(y);
    for (int i = 0; i < cI.size(); ++i)
      comp = std::max(comp, std::abs(std::min(cI[i], mu[i])));
  }
  return stat + comp;
}

}  // namespace wair
