#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wair/contact.hpp"
#include "wair/dynamics.hpp"
#include "wair/types.hpp"

namespace wair {

inline constexpr int kVarsPerNode = kStateDim + kInputDim;  // 69

// Uniform node grid on [0, t_f].  Defects are imposed at segment midpoints
// only; the Hermite construction already matches values and derivatives at
// the nodes.
struct CollocationGrid {
  int N = 31;
  double t_f = 2.0;

  double node_time(int k) const { return t_f * k / (N - 1); }
  double h(int j) const { return t_f / (N - 1); }
  int intervals() const { return N - 1; }
};

// Decision vector layout: Y = [x_1..x_N | u_1..u_N | t_f], one flat vector of
// size N*69 + 1.  t_f is carried as a variable for layout parity but fixed by
// equal bounds.
struct DecisionLayout {
  int N = 0;
  int size() const { return N * kVarsPerNode + 1; }
  int state_offset(int k) const { return k * kStateDim; }
  int input_offset(int k) const { return N * kStateDim + k * kInputDim; }
  int t_f_index() const { return N * kVarsPerNode; }
};

// Diagonal tracking weights over the flattened state/input.
struct CostWeights {
  double q_pose = 10.0;  // q_L, r_b, p_b entries
  double q_rate = 1.0;   // dq_L, w_b, dp_b entries
  double r_uL = 1e-3;
  double r_ug = 1e-4;
  double r_uT = 1e-3;

  StateVec q_diag() const;
  InputVec r_diag() const;
};

// Cubic segment x_int(t) = sum_k c_k ((t - t_j)/h)^k matching both endpoint
// values and derivatives.
struct HermiteSegment {
  StateVec c0, c1, c2, c3;
  double h = 0.0;
};

HermiteSegment hermite_segment(const StateVec& x0, const StateVec& x1,
                               const StateVec& f0, const StateVec& f1,
                               double h);
StateVec segment_eval(const HermiteSegment& seg, double s);
// Time derivative (chain rule through h), evaluated at normalized s.
StateVec segment_deriv(const HermiteSegment& seg, double s);

// Linear interpolation of node inputs at time t (clamped grid lookup).
InputVec input_interpolant(const std::vector<InputVec>& U,
                           const CollocationGrid& grid, double t);

// Boundary conditions: the first node is pinned to x_init, the body must
// advance `progress_target` meters along the up-slope tangent between the
// first and last node, and optionally the terminal body rates are zeroed.
struct BoundarySpec {
  StateVec x_init = StateVec::Zero();
  double progress_target = 0.0;
  Eigen::Vector3d tangent = Eigen::Vector3d::UnitX();  // world frame
  bool zero_terminal_angular_rate = false;
  bool zero_terminal_linear_rate = false;
};

// Everything the transcription needs besides the decision vector.
struct TranscriptionData {
  CollocationGrid grid;
  RobotParams robot;
  CostWeights weights;
  SlopePlane plane;
  BoundarySpec boundary;
  std::vector<StateVec> reference;                 // X_r, one per node
  std::vector<std::array<bool, kNumLegs>> stance;  // per node
  double cone_mu = 1.0;
  bool thrust_enabled = true;
  double u_T_max = 78.48;
  // Variable boxes folded into bounds rather than general constraints.
  double u_L_box = 50.0;
};

// Collocation transcription of the tracking problem.  Equalities stack the
// midpoint defects first, then the boundary rows; inequalities hold the
// friction-cone and thrust rows per node (everything else lives in variable
// bounds).
class TranscribedProblem {
 public:
  explicit TranscribedProblem(TranscriptionData data);

  const TranscriptionData& data() const { return data_; }
  const DecisionLayout& layout() const { return layout_; }
  int num_vars() const { return layout_.size(); }
  int num_defect_rows() const { return kStateDim * data_.grid.intervals(); }
  int num_boundary_rows() const;
  int num_inequality_rows() const { return ineq_rows_total_; }

  // Pack node states/inputs plus t_f into a decision vector.
  Eigen::VectorXd pack(const std::vector<StateVec>& X,
                       const std::vector<InputVec>& U, double t_f) const;
  void unpack(const Eigen::VectorXd& Y, std::vector<StateVec>& X,
              std::vector<InputVec>& U, double* t_f) const;

  // Midpoint dynamics defects, (N-1)*42 rows.
  Eigen::VectorXd defect_constraints(const Eigen::VectorXd& Y) const;
  // Initial-state pin, progress row, optional terminal rate pins.
  Eigen::VectorXd boundary_constraints(const Eigen::VectorXd& Y) const;
  // Stacked [defects; boundary].
  Eigen::VectorXd equality_constraints(const Eigen::VectorXd& Y) const;
  // Node-wise cone margin / normal force / thrust rows, each required >= 0.
  Eigen::VectorXd path_inequalities(const Eigen::VectorXd& Y) const;

  double tracking_cost(const Eigen::VectorXd& Y,
                       Eigen::VectorXd* grad = nullptr) const;
  // Least-squares form: tracking_cost == ||ls_residual||^2.
  Eigen::VectorXd ls_residual(const Eigen::VectorXd& Y) const;
  const Eigen::SparseMatrix<double>& ls_jacobian() const { return ls_jac_; }

  // Forward-difference Jacobians exploiting two-node defect locality; step
  // per variable is 1e-6 * (1 + |y|).  `skip` marks columns to leave
  // structurally present but unevaluated (fixed variables).
  Eigen::SparseMatrix<double> defect_jacobian(
      const Eigen::VectorXd& Y, const std::vector<char>* skip = nullptr) const;
  Eigen::SparseMatrix<double> boundary_jacobian() const;  // exact, constant
  Eigen::SparseMatrix<double> equality_jacobian(
      const Eigen::VectorXd& Y, const std::vector<char>* skip = nullptr) const;
  Eigen::SparseMatrix<double> inequality_jacobian(
      const Eigen::VectorXd& Y, const std::vector<char>* skip = nullptr) const;

  // Variable bounds: joint boxes, swing-foot GRF pinned to zero, u_L box,
  // thrust component boxes (or pinned to zero when disabled), fixed t_f.
  const Eigen::VectorXd& lower_bounds() const { return lb_; }
  const Eigen::VectorXd& upper_bounds() const { return ub_; }

  // Characteristic magnitudes for solver-side scaling (forces ~ m*g).
  Eigen::VectorXd scaling() const;

  // First inequality row of node k and the rows it owns.
  int ineq_row_offset(int k) const { return ineq_row_offset_[k]; }
  int ineq_rows_at(int k) const;

 private:
  void node_inequalities(int k, const StateVec& x, const InputVec& u,
                         double* out) const;
  void build_bounds();

  TranscriptionData data_;
  DecisionLayout layout_;
  Eigen::Matrix3d slope_R_;
  std::vector<int> ineq_row_offset_;
  int ineq_rows_total_ = 0;
  Eigen::VectorXd lb_, ub_;
  Eigen::SparseMatrix<double> ls_jac_;
};

}  // namespace wair
