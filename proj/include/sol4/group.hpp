#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "sol4/errors.hpp"

namespace sol4 {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Frame coefficients with respect to {E_1, E_2, E_3, E_4}, no basepoint.
using FrameVector = Vec4;

/// |t| above this makes e^{2t} or e^{-2t} too large to work with safely.
inline constexpr double kMaxAbsT = 300.0;

/**
 * @brief Element of the solvable group, in exponential coordinates (x, y, z, t).
 *
 * As a matrix the element reads
 *
 *   [ e^t  0    0       x ]
 *   [ 0    e^t  0       y ]
 *   [ 0    0    e^{-2t} z ]
 *   [ 0    0    0       1 ]
 */
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;

  static Point from(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
  Vec4 vec() const { return {x, y, z, t}; }

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(t);
  }
};

inline void check_range(const Point& p, const char* where) {
  if (!p.finite() || std::abs(p.t) > kMaxAbsT) {
    throw DomainError(std::string(where) + ": point outside the representable range (|t| <= 300)");
  }
}

/// Tangent vector stored as coefficients in the left-invariant orthonormal frame.
struct TangentVector {
  Point base;
  FrameVector v = FrameVector::Zero();

  double norm_squared() const { return v.squaredNorm(); }
};

inline TangentVector frame_vector_at(const Point& base, int i) {
  TangentVector out{base, FrameVector::Zero()};
  out.v[i] = 1.0;
  return out;
}

/// Group product p * q.
inline Point compose(const Point& p, const Point& q) {
  check_range(p, "compose");
  check_range(q, "compose");
  const double et = std::exp(p.t);
  const double e2 = std::exp(-2.0 * p.t);
  Point out{p.x + et * q.x, p.y + et * q.y, p.z + e2 * q.z, p.t + q.t};
  check_range(out, "compose");
  return out;
}

inline Point inverse(const Point& p) {
  check_range(p, "inverse");
  const double emt = std::exp(-p.t);
  const double e2t = std::exp(2.0 * p.t);
  Point out{-emt * p.x, -emt * p.y, -e2t * p.z, -p.t};
  check_range(out, "inverse");
  return out;
}

inline constexpr Point identity_point() { return {}; }

/// Diagonal scaling taking coordinate velocities to frame coefficients at height t.
inline Vec4 frame_scaling(double t) {
  return {std::exp(-t), std::exp(-t), std::exp(2.0 * t), 1.0};
}

inline TangentVector to_frame_coefficients(const Point& p, const Vec4& coord_velocity) {
  check_range(p, "to_frame_coefficients");
  return {p, frame_scaling(p.t).cwiseProduct(coord_velocity)};
}

inline Vec4 to_coordinate_velocity(const TangentVector& v) {
  check_range(v.base, "to_coordinate_velocity");
  const double t = v.base.t;
  return {std::exp(t) * v.v[0], std::exp(t) * v.v[1], std::exp(-2.0 * t) * v.v[2], v.v[3]};
}

/**
 * @brief Isometry of the form  p -> trans * L(p).
 *
 * L acts by R(theta) diag(1, eps_xy) on (x, y) and by eps_z on z, fixing t.
 * L is a group automorphism, which gives the semidirect composition law
 * (T1 L1)(T2 L2) = T1 L1(T2) (L1 L2).
 */
struct Isometry {
  Point trans{};
  double theta = 0.0;
  int eps_xy = 1;
  int eps_z = 1;

  static double normalize_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
  }

  static Isometry make(const Point& trans, double theta, int eps_xy = 1, int eps_z = 1) {
    if ((eps_xy != 1 && eps_xy != -1) || (eps_z != 1 && eps_z != -1)) {
      throw ContractViolation("Isometry: reflection flags must be +1 or -1");
    }
    return {trans, normalize_angle(theta), eps_xy, eps_z};
  }
  static Isometry translation(const Point& p) { return make(p, 0.0); }
  static Isometry rotation(double theta) { return make({}, theta); }
  static Isometry identity() { return {}; }

  /// R(theta) diag(1, eps_xy) as a 2x2 matrix.
  Mat2 planar() const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Mat2 m;
    m << c, -s * eps_xy, s, c * eps_xy;
    return m;
  }

  /// The 4x4 action on frame coefficients (also the linear part on coordinates).
  Mat4 linear_matrix() const {
    Mat4 m = Mat4::Zero();
    m.topLeftCorner<2, 2>() = planar();
    m(2, 2) = eps_z;
    m(3, 3) = 1.0;
    return m;
  }
};

/// Linear part only, applied to a point.
inline Point apply_linear(const Isometry& iso, const Point& p) {
  return Point::from(iso.linear_matrix() * p.vec());
}

inline Point apply_isometry(const Isometry& iso, const Point& p) {
  check_range(p, "apply_isometry");
  return compose(iso.trans, apply_linear(iso, p));
}

/// Composition a after b.
inline Isometry operator*(const Isometry& a, const Isometry& b) {
  Isometry out;
  out.trans = compose(a.trans, apply_linear(a, b.trans));
  // R(a) D(ea) R(b) D(eb) = R(a + ea b) D(ea eb)
  out.theta = Isometry::normalize_angle(a.theta + a.eps_xy * b.theta);
  out.eps_xy = a.eps_xy * b.eps_xy;
  out.eps_z = a.eps_z * b.eps_z;
  return out;
}

inline Isometry inverse_isometry(const Isometry& iso) {
  // (L)^{-1} = R(-eps theta) D(eps)
  Isometry lin_inv = Isometry::make({}, -iso.eps_xy * iso.theta, iso.eps_xy, iso.eps_z);
  // (T L)^{-1} = L^{-1} T^{-1} = L^{-1}(T^{-1}) L^{-1}
  lin_inv.trans = apply_linear(lin_inv, inverse(iso.trans));
  return lin_inv;
}

/// Pushforward. The frame is left-invariant, so translations leave coefficients alone.
inline TangentVector isometry_differential(const Isometry& iso, const TangentVector& v) {
  return {apply_isometry(iso, v.base), iso.linear_matrix() * v.v};
}

}  // namespace sol4
