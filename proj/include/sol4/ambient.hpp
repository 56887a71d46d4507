#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>

#include "sol4/errors.hpp"
#include "sol4/group.hpp"
#include "sol4/rk4.hpp"

namespace sol4 {

// Frame indices are 0-based in code: E_1..E_4 -> 0..3.

using FrameTable = std::array<std::array<FrameVector, 4>, 4>;
using CurvatureTable = std::array<FrameTable, 4>;

enum class TableKind { bracket, connection };

namespace detail {

inline FrameVector e(int i, double s = 1.0) {
  FrameVector v = FrameVector::Zero();
  v[i] = s;
  return v;
}

inline FrameTable make_bracket_table() {
  FrameTable b;
  for (auto& row : b) row.fill(FrameVector::Zero());
  b[0][3] = e(0, -1.0);
  b[1][3] = e(1, -1.0);
  b[2][3] = e(2, 2.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) b[i][j] = -b[j][i];
  return b;
}

inline FrameTable make_connection_table() {
  FrameTable c;
  for (auto& row : c) row.fill(FrameVector::Zero());
  c[0][0] = e(3);
  c[0][3] = e(0, -1.0);
  c[1][1] = e(3);
  c[1][3] = e(1, -1.0);
  c[2][2] = e(3, -2.0);
  c[2][3] = e(2, 2.0);
  return c;
}

inline void check_index(int i) {
  if (i < 0 || i > 3) throw ContractViolation("frame index out of range: " + std::to_string(i));
}

}  // namespace detail

inline const FrameTable& bracket_table() {
  static const FrameTable t = detail::make_bracket_table();
  return t;
}

inline const FrameTable& connection_table() {
  static const FrameTable t = detail::make_connection_table();
  return t;
}

/// [E_i, E_j] or nabla_{E_i} E_j, 0-based indices.
inline FrameVector frame_table(TableKind kind, int i, int j) {
  detail::check_index(i);
  detail::check_index(j);
  return kind == TableKind::bracket ? bracket_table()[i][j] : connection_table()[i][j];
}

/// Bracket of frame-constant fields: bilinear extension of the table.
inline FrameVector bracket(const FrameVector& x, const FrameVector& y) {
  FrameVector out = FrameVector::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out += x[i] * y[j] * bracket_table()[i][j];
  return out;
}

/// nabla_X Y for frame-constant Y.
inline FrameVector connection(const FrameVector& x, const FrameVector& y) {
  FrameVector out = FrameVector::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out += x[i] * y[j] * connection_table()[i][j];
  return out;
}

inline double metric(const TangentVector& v, const TangentVector& w) {
  if (v.base.vec() != w.base.vec()) {
    throw ContractViolation("metric: tangent vectors at different basepoints");
  }
  return v.v.dot(w.v);
}

/// Squared length of a coordinate velocity using the coordinate form of the metric.
inline double coordinate_metric_norm2(const Point& p, const Vec4& coord_velocity) {
  const Vec4& c = coord_velocity;
  return std::exp(-2.0 * p.t) * (c[0] * c[0] + c[1] * c[1]) + std::exp(4.0 * p.t) * c[2] * c[2] +
         c[3] * c[3];
}

// ---------------------------------------------------------------------------
// J1, J2 and P

enum class Structure { J1, J2, P };

inline const Mat4& structure_matrix(Structure which) {
  static const Mat4 j1 = [] {
    Mat4 m = Mat4::Zero();
    m(1, 0) = 1.0;
    m(0, 1) = -1.0;
    m(3, 2) = 1.0;
    m(2, 3) = -1.0;
    return m;
  }();
  static const Mat4 j2 = [] {
    Mat4 m = Mat4::Zero();
    m(1, 0) = 1.0;
    m(0, 1) = -1.0;
    m(3, 2) = -1.0;
    m(2, 3) = 1.0;
    return m;
  }();
  static const Mat4 p = [] {
    Mat4 m = Mat4::Zero();
    m(3, 3) = 1.0;
    return m;
  }();
  switch (which) {
    case Structure::J1: return j1;
    case Structure::J2: return j2;
    case Structure::P: return p;
  }
  return p;
}

inline FrameVector structure_apply(Structure which, const FrameVector& v) {
  return structure_matrix(which) * v;
}

inline TangentVector structure_apply(Structure which, const TangentVector& v) {
  return {v.base, structure_apply(which, v.v)};
}

// ---------------------------------------------------------------------------
// Curvature

/// The closed-form curvature R(X,Y)Z written with J1, J2 and P.
inline FrameVector curvature_formula(const FrameVector& x, const FrameVector& y,
                                     const FrameVector& z) {
  const Mat4& j1 = structure_matrix(Structure::J1);
  const Mat4& j2 = structure_matrix(Structure::J2);
  const Mat4& p = structure_matrix(Structure::P);

  FrameVector out = 2.0 * (y.dot(z) * x - x.dot(z) * y);

  auto complex_term = [&](const Mat4& j) {
    const FrameVector jx = j * x;
    const FrameVector jy = j * y;
    return FrameVector((jy.dot(z)) * jx - (jx.dot(z)) * jy + 2.0 * x.dot(jy) * (j * z));
  };
  out -= 0.5 * complex_term(j1);
  out -= 0.5 * complex_term(j2);

  const FrameVector px = p * x;
  const FrameVector py = p * y;
  out -= 3.0 * (py.dot(z) * x + y.dot(z) * px - px.dot(z) * y - x.dot(z) * py);
  return out;
}

/// nabla_i nabla_j E_k - nabla_j nabla_i E_k - nabla_[E_i,E_j] E_k from the tables.
inline FrameVector curvature_from_brackets(int i, int j, int k) {
  const FrameVector ei = detail::e(i);
  const FrameVector ej = detail::e(j);
  const FrameVector ek = detail::e(k);
  return connection(ei, connection(ej, ek)) - connection(ej, connection(ei, ek)) -
         connection(bracket(ei, ej), ek);
}

inline const CurvatureTable& curvature_table() {
  static const CurvatureTable table = [] {
    CurvatureTable t;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          t[i][j][k] = curvature_formula(detail::e(i), detail::e(j), detail::e(k));
    return t;
  }();
  return table;
}

inline FrameVector curvature(const FrameVector& x, const FrameVector& y, const FrameVector& z) {
  const CurvatureTable& t = curvature_table();
  FrameVector out = FrameVector::Zero();
  for (int i = 0; i < 4; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < 4; ++j) {
      if (y[j] == 0.0) continue;
      for (int k = 0; k < 4; ++k) out += x[i] * y[j] * z[k] * t[i][j][k];
    }
  }
  return out;
}

inline TangentVector curvature(const TangentVector& x, const TangentVector& y,
                               const TangentVector& z) {
  if (x.base.vec() != y.base.vec() || x.base.vec() != z.base.vec()) {
    throw ContractViolation("curvature: tangent vectors at different basepoints");
  }
  return {x.base, curvature(x.v, y.v, z.v)};
}

inline constexpr double kDegeneratePlane = 1e-12;

inline double sectional(const FrameVector& x, const FrameVector& y) {
  const double denom = x.squaredNorm() * y.squaredNorm() - std::pow(x.dot(y), 2);
  if (denom < kDegeneratePlane) throw DomainError("sectional: degenerate plane");
  return curvature(x, y, y).dot(x) / denom;
}

inline double sectional(const TangentVector& x, const TangentVector& y) {
  if (x.base.vec() != y.base.vec()) {
    throw ContractViolation("sectional: tangent vectors at different basepoints");
  }
  return sectional(x.v, y.v);
}

// ---------------------------------------------------------------------------
// Covariant derivative of a field given in frame coefficients

struct AmbientField {
  std::function<FrameVector(const Point&)> value;
  /// Optional: directional derivative of the coefficient functions along a coordinate velocity.
  std::function<FrameVector(const Point&, const Vec4&)> derivative;

  bool has_analytic_derivative() const { return static_cast<bool>(derivative); }
};

inline constexpr double kDefaultFdStep = 1e-5;

inline TangentVector covariant_derivative(const AmbientField& w, const Point& p,
                                          const TangentVector& v, double h = kDefaultFdStep) {
  if (v.base.vec() != p.vec()) {
    throw ContractViolation("covariant_derivative: vector not based at p");
  }
  const FrameVector wp = w.value(p);
  if (!wp.allFinite()) throw DomainError("covariant_derivative: non-finite field value");

  FrameVector dw;
  const Vec4 c = to_coordinate_velocity(v);
  if (w.has_analytic_derivative()) {
    dw = w.derivative(p, c);
  } else {
    const FrameVector plus = w.value(Point::from(p.vec() + h * c));
    const FrameVector minus = w.value(Point::from(p.vec() - h * c));
    if (!plus.allFinite() || !minus.allFinite()) {
      throw DomainError("covariant_derivative: non-finite field value near p");
    }
    dw = (plus - minus) / (2.0 * h);
  }
  return {p, dw + connection(v.v, wp)};
}

// ---------------------------------------------------------------------------
// Geodesics

using GeodesicState = Eigen::Matrix<double, 8, 1>;

/// Coordinates (x, y, z, t) followed by frame coefficients of the velocity.
inline GeodesicState geodesic_rhs(const GeodesicState& s) {
  GeodesicState out;
  const double t = s[3];
  const double et = std::exp(t);
  const double e2 = std::exp(-2.0 * t);
  out[0] = et * s[4];
  out[1] = et * s[5];
  out[2] = e2 * s[6];
  out[3] = s[7];
  const FrameVector v = s.tail<4>();
  out.tail<4>() = -connection(v, v);
  return out;
}

struct GeodesicEnd {
  Point point;
  TangentVector velocity;
};

inline GeodesicEnd geodesic(const Point& p0, const TangentVector& v0, double length, int steps) {
  check_range(p0, "geodesic");
  if (std::abs(v0.v.norm() - 1.0) > 1e-12) {
    throw ContractViolation("geodesic: initial velocity must have unit length");
  }
  if (steps < 1) throw ContractViolation("geodesic: steps must be >= 1");
  GeodesicState s;
  s.head<4>() = p0.vec();
  s.tail<4>() = v0.v;
  s = rk4_integrate(s, length, steps, geodesic_rhs);
  const Point end = Point::from(s.head<4>());
  check_range(end, "geodesic");
  return {end, {end, s.tail<4>()}};
}

// ---------------------------------------------------------------------------
// Table self-consistency

enum class SelfCheck {
  torsion,
  metric_compat,
  curvature_oracle,
  curvature_symmetries,
  bianchi,
  compat_J,
  nijenhuis,
};

inline constexpr std::array<SelfCheck, 7> kAllSelfChecks = {
    SelfCheck::torsion,  SelfCheck::metric_compat, SelfCheck::curvature_oracle,
    SelfCheck::curvature_symmetries, SelfCheck::bianchi, SelfCheck::compat_J,
    SelfCheck::nijenhuis};

inline std::string_view to_string(SelfCheck k) {
  switch (k) {
    case SelfCheck::torsion: return "torsion";
    case SelfCheck::metric_compat: return "metric_compat";
    case SelfCheck::curvature_oracle: return "curvature_oracle";
    case SelfCheck::curvature_symmetries: return "curvature_symmetries";
    case SelfCheck::bianchi: return "bianchi";
    case SelfCheck::compat_J: return "compat_J";
    case SelfCheck::nijenhuis: return "nijenhuis";
  }
  return "?";
}

namespace detail {

inline double nijenhuis_residual(const Mat4& j) {
  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const FrameVector x = e(a);
      const FrameVector y = e(b);
      const FrameVector n = bracket(j * x, j * y) - j * bracket(j * x, y) - j * bracket(x, j * y) -
                            bracket(x, y);
      worst = std::max(worst, n.cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace detail

/// Largest absolute residual of the requested identity over all frame index combinations.
inline double ambient_selfcheck(SelfCheck kind) {
  using detail::e;
  double worst = 0.0;
  auto track = [&](const FrameVector& v) { worst = std::max(worst, v.cwiseAbs().maxCoeff()); };
  auto track_scalar = [&](double s) { worst = std::max(worst, std::abs(s)); };
  const CurvatureTable& r = curvature_table();

  switch (kind) {
    case SelfCheck::torsion:
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          track(connection_table()[i][j] - connection_table()[j][i] - bracket_table()[i][j]);
      break;
    case SelfCheck::metric_compat:
      // X g(E_j, E_k) = 0, so g(nabla_i E_j, E_k) + g(E_j, nabla_i E_k) = 0.
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            track_scalar(connection_table()[i][j][k] + connection_table()[i][k][j]);
      break;
    case SelfCheck::curvature_oracle:
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k) track(r[i][j][k] - curvature_from_brackets(i, j, k));
      break;
    case SelfCheck::curvature_symmetries:
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k) {
            track(r[i][j][k] + r[j][i][k]);
            for (int l = 0; l < 4; ++l) {
              track_scalar(r[i][j][k][l] + r[i][j][l][k]);
              track_scalar(r[i][j][k][l] - r[k][l][i][j]);
            }
          }
      break;
    case SelfCheck::bianchi:
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k) track(r[i][j][k] + r[j][k][i] + r[k][i][j]);
      break;
    case SelfCheck::compat_J:
      for (Structure s : {Structure::J1, Structure::J2}) {
        const Mat4& j = structure_matrix(s);
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            track_scalar((j * e(a)).dot(j * e(b)) - e(a).dot(e(b)));
            track_scalar((j * j * e(a) + e(a))[b]);
          }
      }
      break;
    case SelfCheck::nijenhuis:
      worst = std::max(detail::nijenhuis_residual(structure_matrix(Structure::J1)),
                       detail::nijenhuis_residual(structure_matrix(Structure::J2)));
      break;
  }
  return worst;
}

}  // namespace sol4
