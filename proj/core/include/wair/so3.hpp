#pragma once

#include <Eigen/Dense>

namespace wair {

// Hat map: skew(w) * v == w.cross(v).
Eigen::Matrix3d skew(const Eigen::Vector3d& w);

// Inverse of the hat map (takes the antisymmetric part first).
Eigen::Vector3d unskew(const Eigen::Matrix3d& S);

Eigen::Matrix3d rot_x(double a);
Eigen::Matrix3d rot_y(double a);
Eigen::Matrix3d rot_z(double a);

// Rodrigues formula, accurate near ||w|| = 0.
Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w);

// Nearest rotation in Frobenius norm (polar factor via SVD, det +1).
Eigen::Matrix3d project_so3(const Eigen::Matrix3d& M);

// || R^T R - I ||_F
double orthonormality_error(const Eigen::Matrix3d& R);

enum class RotationUpdate {
  // R <- R * exp(dt * [w]x), exactly orthogonal up to roundoff.
  kExponential,
  // R <- project( R + dt * R * [w]x ): first-order update followed by
  // reprojection onto the rotation group.
  kEulerReproject,
  // R <- R + dt * R * [w]x with no cleanup; drifts off the group.
  kEulerRaw,
};

// Advance a body-frame angular velocity w over dt using the chosen scheme.
Eigen::Matrix3d integrate_rotation(const Eigen::Matrix3d& R,
                                   const Eigen::Vector3d& w, double dt,
                                   RotationUpdate scheme = RotationUpdate::kExponential);

}  // namespace wair
