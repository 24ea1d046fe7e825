#include "wair/collocation.hpp"

#include <cmath>
#include <stdexcept>

namespace wair {

namespace {
constexpr double kInf = 1e20;
constexpr double kFdRel = 1e-6;

double fd_step(double y) { return kFdRel * (1.0 + std::abs(y)); }
}  // namespace

StateVec CostWeights::q_diag() const {
  StateVec q;
  q.segment<12>(0).setConstant(q_pose);   // q_L
  q.segment<12>(12).setConstant(q_rate);  // dq_L
  q.segment<9>(24).setConstant(q_pose);   // r_b
  q.segment<3>(33).setConstant(q_pose);   // p_b
  q.segment<3>(36).setConstant(q_rate);   // w_b
  q.segment<3>(39).setConstant(q_rate);   // dp_b
  return q;
}

InputVec CostWeights::r_diag() const {
  InputVec r;
  r.segment<12>(0).setConstant(r_uL);
  r.segment<12>(12).setConstant(r_ug);
  r.segment<3>(24).setConstant(r_uT);
  return r;
}

HermiteSegment hermite_segment(const StateVec& x0, const StateVec& x1,
                               const StateVec& f0, const StateVec& f1,
                               double h) {
  if (h <= 0.0) throw std::invalid_argument("hermite_segment: h must be > 0");
  HermiteSegment seg;
  seg.h = h;
  seg.c0 = x0;
  seg.c1 = h * f0;
  seg.c2 = -3.0 * x0 - 2.0 * h * f0 + 3.0 * x1 - h * f1;
  seg.c3 = 2.0 * x0 + h * f0 - 2.0 * x1 + h * f1;
  return seg;
}

StateVec segment_eval(const HermiteSegment& seg, double s) {
  return seg.c0 + s * (seg.c1 + s * (seg.c2 + s * seg.c3));
}

StateVec segment_deriv(const HermiteSegment& seg, double s) {
  return (seg.c1 + s * (2.0 * seg.c2 + 3.0 * s * seg.c3)) / seg.h;
}

InputVec input_interpolant(const std::vector<InputVec>& U,
                           const CollocationGrid& grid, double t) {
  const double tol = 1e-9 * std::max(1.0, grid.t_f);
  if (t < -tol || t > grid.t_f + tol)
    throw std::out_of_range("input_interpolant: t outside [0, t_f]");
  const double h = grid.h(0);
  int k = static_cast<int>(std::floor(t / h));
  k = std::max(0, std::min(k, grid.N - 2));
  const double a = (t - grid.node_time(k)) / h;
  return U[k] + a * (U[k + 1] - U[k]);
}

TranscribedProblem::TranscribedProblem(TranscriptionData data)
    : data_(std::move(data)) {
  const int N = data_.grid.N;
  if (static_cast<int>(data_.reference.size()) != N)
    throw std::invalid_argument("transcription: reference length != N");
  if (static_cast<int>(data_.stance.size()) != N)
    throw std::invalid_argument("transcription: stance schedule length != N");
  layout_.N = N;
  slope_R_ = slope_frame(data_.plane);

  ineq_row_offset_.resize(N + 1);
  int rows = 0;
  for (int k = 0; k < N; ++k) {
    ineq_row_offset_[k] = rows;
    int stance_count = 0;
    for (bool s : data_.stance[k]) stance_count += s ? 1 : 0;
    rows += 2 * stance_count + (data_.thrust_enabled ? 2 : 0);
  }
  ineq_row_offset_[N] = rows;
  ineq_rows_total_ = rows;

  build_bounds();

  // Constant least-squares Jacobian: diag(sqrt(Q)) on state variables,
  // diag(sqrt(R)) on input variables; the t_f column is empty.
  const StateVec sq = data_.weights.q_diag().cwiseSqrt();
  const InputVec sr = data_.weights.r_diag().cwiseSqrt();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(N * kVarsPerNode);
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < kStateDim; ++i) {
      const int idx = layout_.state_offset(k) + i;
      trips.emplace_back(idx, idx, sq[i]);
    }
    for (int i = 0; i < kInputDim; ++i) {
      const int idx = layout_.input_offset(k) + i;
      trips.emplace_back(idx, idx, sr[i]);
    }
  }
  ls_jac_.resize(N * kVarsPerNode, layout_.size());
  ls_jac_.setFromTriplets(trips.begin(), trips.end());
}

int TranscribedProblem::num_boundary_rows() const {
  int rows = kStateDim + 1;
  if (data_.boundary.zero_terminal_angular_rate) rows += 3;
  if (data_.boundary.zero_terminal_linear_rate) rows += 3;
  return rows;
}

int TranscribedProblem::ineq_rows_at(int k) const {
  return ineq_row_offset_[k + 1] - ineq_row_offset_[k];
}

Eigen::VectorXd TranscribedProblem::pack(const std::vector<StateVec>& X,
                                         const std::vector<InputVec>& U,
                                         double t_f) const {
  const int N = layout_.N;
  if (static_cast<int>(X.size()) != N || static_cast<int>(U.size()) != N)
    throw std::invalid_argument("pack: X/U length != N");
  Eigen::VectorXd Y(layout_.size());
  for (int k = 0; k < N; ++k) {
    Y.segment<kStateDim>(layout_.state_offset(k)) = X[k];
    Y.segment<kInputDim>(layout_.input_offset(k)) = U[k];
  }
  Y[layout_.t_f_index()] = t_f;
  return Y;
}

void TranscribedProblem::unpack(const Eigen::VectorXd& Y,
                                std::vector<StateVec>& X,
                                std::vector<InputVec>& U, double* t_f) const {
  const int N = layout_.N;
  X.resize(N);
  U.resize(N);
  for (int k = 0; k < N; ++k) {
    X[k] = Y.segment<kStateDim>(layout_.state_offset(k));
    U[k] = Y.segment<kInputDim>(layout_.input_offset(k));
  }
  if (t_f) *t_f = Y[layout_.t_f_index()];
}

namespace {

// Midpoint defect for one interval given endpoint data.
StateVec defect_block(const StateVec& xa, const InputVec& ua,
                      const StateVec& fa, const StateVec& xb,
                      const InputVec& ub, const StateVec& fb, double h,
                      const RobotParams& robot) {
  const HermiteSegment seg = hermite_segment(xa, xb, fa, fb, h);
  const StateVec xc = segment_eval(seg, 0.5);
  const StateVec dxc = segment_deriv(seg, 0.5);
  const InputVec uc = 0.5 * (ua + ub);
  const StateVec fc = f_rom(HROMState::unflatten(xc),
                            ControlInput::unflatten(uc), robot);
  return fc - dxc;
}

StateVec node_dynamics(const Eigen::VectorXd& Y, const DecisionLayout& lay,
                       int k, const RobotParams& robot) {
  const StateVec x = Y.segment<kStateDim>(lay.state_offset(k));
  const InputVec u = Y.segment<kInputDim>(lay.input_offset(k));
  return f_rom(HROMState::unflatten(x), ControlInput::unflatten(u), robot);
}

}  // namespace

Eigen::VectorXd TranscribedProblem::defect_constraints(
    const Eigen::VectorXd& Y) const {
  const int N = layout_.N;
  const double t_f = Y[layout_.t_f_index()];
  const double h = t_f / (N - 1);
  std::vector<StateVec> f(N);
  for (int k = 0; k < N; ++k) f[k] = node_dynamics(Y, layout_, k, data_.robot);

  Eigen::VectorXd out(num_defect_rows());
  for (int j = 0; j < N - 1; ++j) {
    const StateVec xa = Y.segment<kStateDim>(layout_.state_offset(j));
    const StateVec xb = Y.segment<kStateDim>(layout_.state_offset(j + 1));
    const InputVec ua = Y.segment<kInputDim>(layout_.input_offset(j));
    const InputVec ub = Y.segment<kInputDim>(layout_.input_offset(j + 1));
    out.segment<kStateDim>(j * kStateDim) =
        defect_block(xa, ua, f[j], xb, ub, f[j + 1], h, data_.robot);
  }
  return out;
}

Eigen::VectorXd TranscribedProblem::boundary_constraints(
    const Eigen::VectorXd& Y) const {
  const int N = layout_.N;
  Eigen::VectorXd out(num_boundary_rows());
  out.segment<kStateDim>(0) =
      Y.segment<kStateDim>(layout_.state_offset(0)) - data_.boundary.x_init;
  const Eigen::Vector3d p0 = Y.segment<3>(layout_.state_offset(0) + 33);
  const Eigen::Vector3d pN = Y.segment<3>(layout_.state_offset(N - 1) + 33);
  out[kStateDim] =
      (pN - p0).dot(data_.boundary.tangent) - data_.boundary.progress_target;
  int row = kStateDim + 1;
  if (data_.boundary.zero_terminal_angular_rate) {
    out.segment<3>(row) = Y.segment<3>(layout_.state_offset(N - 1) + 36);
    row += 3;
  }
  if (data_.boundary.zero_terminal_linear_rate) {
    out.segment<3>(row) = Y.segment<3>(layout_.state_offset(N - 1) + 39);
    row += 3;
  }
  return out;
}

Eigen::VectorXd TranscribedProblem::equality_constraints(
    const Eigen::VectorXd& Y) const {
  Eigen::VectorXd out(num_defect_rows() + num_boundary_rows());
  out.head(num_defect_rows()) = defect_constraints(Y);
  out.tail(num_boundary_rows()) = boundary_constraints(Y);
  return out;
}

void TranscribedProblem::node_inequalities(int k, const StateVec& x,
                                           const InputVec& u,
                                           double* out) const {
  int idx = 0;
  // Cone margins for stance feet, slope frame.  The tangential magnitude is
  // regularized as sqrt(t^2 + eps^2) >= |t|: lightly loaded feet sit right at
  // the cone apex where the exact norm has a derivative kink that corrupts
  // finite-difference Jacobians and stalls the solver.  The regularized row is
  // strictly tighter than the true cone (so converged margins stay valid) and
  // shifts the value by at most eps^2 / (2 |t|) away from the apex.
  constexpr double kConeApexEps = 5e-3;  // N
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (!data_.stance[k][leg]) continue;
    const Eigen::Vector3d ug = slope_R_.transpose() * u.segment<3>(12 + 3 * leg);
    out[idx++] = data_.cone_mu * ug.z() -
                 std::sqrt(ug.x() * ug.x() + ug.y() * ug.y() +
                           kConeApexEps * kConeApexEps);
  }
  // Normal components for stance feet.
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (!data_.stance[k][leg]) continue;
    const Eigen::Vector3d ug = u.segment<3>(12 + 3 * leg);
    out[idx++] = (slope_R_.transpose() * ug).z();
  }
  if (data_.thrust_enabled) {
    const Eigen::Vector3d uT = u.segment<3>(24);
    // Smooth version of u_T_max - ||u_T||, scaled to stay in Newtons.
    out[idx++] = (data_.u_T_max * data_.u_T_max - uT.squaredNorm()) /
                 (2.0 * data_.u_T_max);
    const Eigen::Matrix3d R_b =
        Eigen::Map<const Eigen::Matrix3d>(x.segment<9>(24).data());
    out[idx++] = (R_b.transpose() * uT).z();
  }
}

Eigen::VectorXd TranscribedProblem::path_inequalities(
    const Eigen::VectorXd& Y) const {
  Eigen::VectorXd out(ineq_rows_total_);
  for (int k = 0; k < layout_.N; ++k) {
    const StateVec x = Y.segment<kStateDim>(layout_.state_offset(k));
    const InputVec u = Y.segment<kInputDim>(layout_.input_offset(k));
    node_inequalities(k, x, u, out.data() + ineq_row_offset_[k]);
  }
  return out;
}

double TranscribedProblem::tracking_cost(const Eigen::VectorXd& Y,
                                         Eigen::VectorXd* grad) const {
  const int N = layout_.N;
  const StateVec q = data_.weights.q_diag();
  const InputVec r = data_.weights.r_diag();
  double J = 0.0;
  if (grad) grad->setZero(layout_.size());
  for (int k = 0; k < N; ++k) {
    const StateVec e =
        Y.segment<kStateDim>(layout_.state_offset(k)) - data_.reference[k];
    const InputVec u = Y.segment<kInputDim>(layout_.input_offset(k));
    J += e.dot(q.asDiagonal() * e) + u.dot(r.asDiagonal() * u);
    if (grad) {
      grad->segment<kStateDim>(layout_.state_offset(k)) =
          2.0 * q.asDiagonal() * e;
      grad->segment<kInputDim>(layout_.input_offset(k)) =
          2.0 * r.asDiagonal() * u;
    }
  }
  return J;
}

Eigen::VectorXd TranscribedProblem::ls_residual(
    const Eigen::VectorXd& Y) const {
  const int N = layout_.N;
  const StateVec sq = data_.weights.q_diag().cwiseSqrt();
  const InputVec sr = data_.weights.r_diag().cwiseSqrt();
  Eigen::VectorXd out(N * kVarsPerNode);
  for (int k = 0; k < N; ++k) {
    out.segment<kStateDim>(layout_.state_offset(k)) =
        sq.cwiseProduct(Y.segment<kStateDim>(layout_.state_offset(k)) -
                        data_.reference[k]);
    out.segment<kInputDim>(layout_.input_offset(k)) =
        sr.cwiseProduct(Y.segment<kInputDim>(layout_.input_offset(k)));
  }
  return out;
}

Eigen::SparseMatrix<double> TranscribedProblem::defect_jacobian(
    const Eigen::VectorXd& Y, const std::vector<char>* skip) const {
  const int N = layout_.N;
  const double t_f = Y[layout_.t_f_index()];
  const double h = t_f / (N - 1);

  std::vector<StateVec> f(N);
  for (int k = 0; k < N; ++k) f[k] = node_dynamics(Y, layout_, k, data_.robot);

  std::vector<StateVec> base(N - 1);
  auto interval = [&](const Eigen::VectorXd& y, int j, const StateVec& fa,
                      const StateVec& fb, double hj) {
    const StateVec xa = y.segment<kStateDim>(layout_.state_offset(j));
    const StateVec xb = y.segment<kStateDim>(layout_.state_offset(j + 1));
    const InputVec ua = y.segment<kInputDim>(layout_.input_offset(j));
    const InputVec ub = y.segment<kInputDim>(layout_.input_offset(j + 1));
    return defect_block(xa, ua, fa, xb, ub, fb, hj, data_.robot);
  };
  for (int j = 0; j < N - 1; ++j) base[j] = interval(Y, j, f[j], f[j + 1], h);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(N) * kVarsPerNode * 2 * kStateDim);
  Eigen::VectorXd y = Y;

  auto emit_column = [&](int col, int k, double delta) {
    const StateVec fk = node_dynamics(y, layout_, k, data_.robot);
    for (int j = std::max(0, k - 1); j <= std::min(N - 2, k); ++j) {
      const StateVec& fa = (j == k) ? fk : f[j];
      const StateVec& fb = (j + 1 == k) ? fk : f[j + 1];
      const StateVec d = (interval(y, j, fa, fb, h) - base[j]) / delta;
      for (int rloc = 0; rloc < kStateDim; ++rloc)
        trips.emplace_back(j * kStateDim + rloc, col, d[rloc]);
    }
  };

  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < kVarsPerNode; ++i) {
      const int col = (i < kStateDim)
                          ? layout_.state_offset(k) + i
                          : layout_.input_offset(k) + (i - kStateDim);
      if (skip && (*skip)[col]) {
        // Keep the structural block so the pattern is Y-independent.
        for (int j = std::max(0, k - 1); j <= std::min(N - 2, k); ++j)
          for (int rloc = 0; rloc < kStateDim; ++rloc)
            trips.emplace_back(j * kStateDim + rloc, col, 0.0);
        continue;
      }
      const double delta = fd_step(y[col]);
      const double saved = y[col];
      y[col] = saved + delta;
      emit_column(col, k, delta);
      y[col] = saved;
    }
  }

  // t_f column: the segment width h = t_f/(N-1) enters every interval.
  const int tcol = layout_.t_f_index();
  if (!(skip && (*skip)[tcol])) {
    const double delta = fd_step(y[tcol]);
    const double hp = (t_f + delta) / (N - 1);
    for (int j = 0; j < N - 1; ++j) {
      const StateVec d = (interval(y, j, f[j], f[j + 1], hp) - base[j]) / delta;
      for (int rloc = 0; rloc < kStateDim; ++rloc)
        trips.emplace_back(j * kStateDim + rloc, tcol, d[rloc]);
    }
  } else {
    for (int j = 0; j < N - 1; ++j)
      for (int rloc = 0; rloc < kStateDim; ++rloc)
        trips.emplace_back(j * kStateDim + rloc, tcol, 0.0);
  }

  Eigen::SparseMatrix<double> Jc(num_defect_rows(), layout_.size());
  Jc.setFromTriplets(trips.begin(), trips.end());
  return Jc;
}

Eigen::SparseMatrix<double> TranscribedProblem::boundary_jacobian() const {
  const int N = layout_.N;
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < kStateDim; ++i)
    trips.emplace_back(i, layout_.state_offset(0) + i, 1.0);
  for (int a = 0; a < 3; ++a) {
    trips.emplace_back(kStateDim, layout_.state_offset(0) + 33 + a,
                       -data_.boundary.tangent[a]);
    trips.emplace_back(kStateDim, layout_.state_offset(N - 1) + 33 + a,
                       data_.boundary.tangent[a]);
  }
  int row = kStateDim + 1;
  if (data_.boundary.zero_terminal_angular_rate) {
    for (int a = 0; a < 3; ++a)
      trips.emplace_back(row++, layout_.state_offset(N - 1) + 36 + a, 1.0);
  }
  if (data_.boundary.zero_terminal_linear_rate) {
    for (int a = 0; a < 3; ++a)
      trips.emplace_back(row++, layout_.state_offset(N - 1) + 39 + a, 1.0);
  }
  Eigen::SparseMatrix<double> Jb(num_boundary_rows(), layout_.size());
  Jb.setFromTriplets(trips.begin(), trips.end());
  return Jb;
}

Eigen::SparseMatrix<double> TranscribedProblem::equality_jacobian(
    const Eigen::VectorXd& Y, const std::vector<char>* skip) const {
  const Eigen::SparseMatrix<double> Jd = defect_jacobian(Y, skip);
  const Eigen::SparseMatrix<double> Jb = boundary_jacobian();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(Jd.nonZeros() + Jb.nonZeros());
  for (int c = 0; c < Jd.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Jd, c); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  const int off = num_defect_rows();
  for (int c = 0; c < Jb.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Jb, c); it; ++it)
      trips.emplace_back(off + it.row(), it.col(), it.value());
  Eigen::SparseMatrix<double> J(off + num_boundary_rows(), layout_.size());
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

Eigen::SparseMatrix<double> TranscribedProblem::inequality_jacobian(
    const Eigen::VectorXd& Y, const std::vector<char>* skip) const {
  const int N = layout_.N;
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd base(ineq_rows_total_);
  for (int k = 0; k < N; ++k) {
    const StateVec x = Y.segment<kStateDim>(layout_.state_offset(k));
    const InputVec u = Y.segment<kInputDim>(layout_.input_offset(k));
    node_inequalities(k, x, u, base.data() + ineq_row_offset_[k]);
  }

  std::vector<double> block(16);
  for (int k = 0; k < N; ++k) {
    const int rows = ineq_rows_at(k);
    if (rows == 0) continue;
    StateVec x = Y.segment<kStateDim>(layout_.state_offset(k));
    InputVec u = Y.segment<kInputDim>(layout_.input_offset(k));
    for (int i = 0; i < kVarsPerNode; ++i) {
      const int col = (i < kStateDim)
                          ? layout_.state_offset(k) + i
                          : layout_.input_offset(k) + (i - kStateDim);
      if (skip && (*skip)[col]) {
        for (int rloc = 0; rloc < rows; ++rloc)
          trips.emplace_back(ineq_row_offset_[k] + rloc, col, 0.0);
        continue;
      }
      double* slot = (i < kStateDim) ? &x[i] : &u[i - kStateDim];
      const double saved = *slot;
      const double delta = fd_step(saved);
      *slot = saved + delta;
      node_inequalities(k, x, u, block.data());
      *slot = saved;
      for (int rloc = 0; rloc < rows; ++rloc)
        trips.emplace_back(
            ineq_row_offset_[k] + rloc, col,
            (block[rloc] - base[ineq_row_offset_[k] + rloc]) / delta);
    }
  }
  Eigen::SparseMatrix<double> J(ineq_rows_total_, layout_.size());
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

void TranscribedProblem::build_bounds() {
  const int N = layout_.N;
  lb_.setConstant(layout_.size(), -kInf);
  ub_.setConstant(layout_.size(), kInf);
  for (int k = 0; k < N; ++k) {
    const int so = layout_.state_offset(k);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      lb_[so + 3 * leg + 0] = -data_.robot.joint_angle_limit;
      ub_[so + 3 * leg + 0] = data_.robot.joint_angle_limit;
      lb_[so + 3 * leg + 1] = -data_.robot.joint_angle_limit;
      ub_[so + 3 * leg + 1] = data_.robot.joint_angle_limit;
      lb_[so + 3 * leg + 2] = data_.robot.r_min;
      ub_[so + 3 * leg + 2] = data_.robot.r_max;
    }
    const int io = layout_.input_offset(k);
    for (int i = 0; i < 12; ++i) {
      lb_[io + i] = -data_.u_L_box;
      ub_[io + i] = data_.u_L_box;
    }
    for (int leg = 0; leg < kNumLegs; ++leg) {
      if (!data_.stance[k][leg]) {
        // Swing feet carry no ground force: equality folded into the bounds.
        for (int a = 0; a < 3; ++a) {
          lb_[io + 12 + 3 * leg + a] = 0.0;
          ub_[io + 12 + 3 * leg + a] = 0.0;
        }
      }
    }
    for (int a = 0; a < 3; ++a) {
      lb_[io + 24 + a] = data_.thrust_enabled ? -data_.u_T_max : 0.0;
      ub_[io + 24 + a] = data_.thrust_enabled ? data_.u_T_max : 0.0;
    }
  }
  // Initial node pinned hard; the boundary rows then hold identically.
  lb_.segment<kStateDim>(layout_.state_offset(0)) = data_.boundary.x_init;
  ub_.segment<kStateDim>(layout_.state_offset(0)) = data_.boundary.x_init;
  lb_[layout_.t_f_index()] = data_.grid.t_f;
  ub_[layout_.t_f_index()] = data_.grid.t_f;
}

Eigen::VectorXd TranscribedProblem::scaling() const {
  const int N = layout_.N;
  Eigen::VectorXd s = Eigen::VectorXd::Ones(layout_.size());
  const double force_scale = data_.robot.mass * data_.robot.gravity.norm();
  for (int k = 0; k < N; ++k) {
    const int io = layout_.input_offset(k);
    s.segment<15>(io + 12).setConstant(force_scale);  // u_g and u_T
  }
  return s;
}

}  // namespace wair
