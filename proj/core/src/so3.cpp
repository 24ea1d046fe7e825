#include "wair/so3.hpp"

#include <cmath>

namespace wair {

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d S;
  S << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
      -w.y(), w.x(), 0.0;
  return S;
}

Eigen::Vector3d unskew(const Eigen::Matrix3d& S) {
  Eigen::Matrix3d A = 0.5 * (S - S.transpose());
  return Eigen::Vector3d(A(2, 1), A(0, 2), A(1, 0));
}

Eigen::Matrix3d rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return R;
}

Eigen::Matrix3d rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << c, 0, s,
       0, 1, 0,
      -s, 0, c;
  return R;
}

Eigen::Matrix3d rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return R;
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w) {
  const double t2 = w.squaredNorm();
  const Eigen::Matrix3d S = skew(w);
  double a, b;  // exp = I + a*S + b*S^2
  if (t2 < 1e-16) {
    // Taylor series; keeps the small-angle branch smooth.
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    const double t = std::sqrt(t2);
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  return Eigen::Matrix3d::Identity() + a * S + b * S * S;
}

Eigen::Matrix3d project_so3(const Eigen::Matrix3d& M) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
    D(2, 2) = -1.0;
    R = svd.matrixU() * D * svd.matrixV().transpose();
  }
  return R;
}

double orthonormality_error(const Eigen::Matrix3d& R) {
  return (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
}

Eigen::Matrix3d integrate_rotation(const Eigen::Matrix3d& R,
                                   const Eigen::Vector3d& w, double dt,
                                   RotationUpdate scheme) {
  switch (scheme) {
    case RotationUpdate::kExponential:
      return R * exp_so3(dt * w);
    case RotationUpdate::kEulerReproject:
      return project_so3(R + dt * R * skew(w));
    case RotationUpdate::kEulerRaw:
    default:
      return R + dt * R * skew(w);
  }
}

}  // namespace wair
