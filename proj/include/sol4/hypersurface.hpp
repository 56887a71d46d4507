#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "sol4/ambient.hpp"
#include "sol4/errors.hpp"
#include "sol4/group.hpp"

namespace sol4 {

using Mat43 = Eigen::Matrix<double, 4, 3>;

/// Finite-difference steps. `nested` is used when the quantity being
/// differentiated was itself obtained by finite differences.
struct FdSteps {
  double first = 1e-5;
  double second = 1e-3;
  double nested = 1e-4;
};

inline constexpr double kRankThreshold = 1e-8;

struct ParamBox {
  Vec3 lo = Vec3::Constant(-1.0);
  Vec3 hi = Vec3::Constant(1.0);

  bool contains(const Vec3& q, double margin = 0.0) const {
    return ((q.array() - lo.array()) >= margin).all() && ((hi.array() - q.array()) >= margin).all();
  }
  Vec3 center() const { return 0.5 * (lo + hi); }
};

/**
 * @brief An immersion of a parameter box into the group.
 *
 * `jacobian` returns coordinate partials (columns d/du_1..d/du_3 of (x, y, z, t)).
 * `normal` returns frame coefficients of a unit normal, `implicit` a function
 * vanishing on the image. All three are optional.
 */
struct HypersurfacePatch {
  std::function<Point(const Vec3&)> immersion;
  std::function<Mat43(const Vec3&)> jacobian;
  std::function<FrameVector(const Vec3&)> normal;
  std::function<double(const Point&)> implicit;
  ParamBox domain;

  bool has_jacobian() const { return static_cast<bool>(jacobian); }
  bool has_normal() const { return static_cast<bool>(normal); }
  bool has_implicit() const { return static_cast<bool>(implicit); }
};

/// The image patch iso(patch); jacobian, normal and implicit function are carried along exactly.
inline HypersurfacePatch transformed(const HypersurfacePatch& patch, const Isometry& iso) {
  HypersurfacePatch out;
  out.domain = patch.domain;
  out.immersion = [f = patch.immersion, iso](const Vec3& u) { return apply_isometry(iso, f(u)); };
  if (patch.has_jacobian()) {
    const Mat4 lin = iso.linear_matrix();
    const double s = iso.trans.t;
    const Vec4 left = Vec4(std::exp(s), std::exp(s), std::exp(-2.0 * s), 1.0);
    out.jacobian = [j = patch.jacobian, lin, left](const Vec3& u) -> Mat43 {
      return left.asDiagonal() * (lin * j(u));
    };
  }
  if (patch.has_normal()) {
    out.normal = [n = patch.normal, lin = iso.linear_matrix()](const Vec3& u) -> FrameVector {
      return lin * n(u);
    };
  }
  if (patch.has_implicit()) {
    out.implicit = [f = patch.implicit, inv = inverse_isometry(iso)](const Point& p) {
      return f(apply_isometry(inv, p));
    };
  }
  return out;
}

/// Reparametrization u = map(w) on a new parameter box. The patch's jacobian is chained
/// with `map_jacobian` when both are present.
inline HypersurfacePatch reparametrized(const HypersurfacePatch& patch,
                                        std::function<Vec3(const Vec3&)> map,
                                        std::function<Mat3(const Vec3&)> map_jacobian,
                                        const ParamBox& domain) {
  HypersurfacePatch out;
  out.domain = domain;
  out.implicit = patch.implicit;
  out.immersion = [f = patch.immersion, map](const Vec3& w) { return f(map(w)); };
  if (patch.has_jacobian() && map_jacobian) {
    out.jacobian = [j = patch.jacobian, map, map_jacobian](const Vec3& w) -> Mat43 {
      return j(map(w)) * map_jacobian(w);
    };
  }
  if (patch.has_normal()) {
    out.normal = [n = patch.normal, map](const Vec3& w) { return n(map(w)); };
  }
  return out;
}

// ---------------------------------------------------------------------------
// First-order data

inline Mat43 coordinate_jacobian(const HypersurfacePatch& patch, const Vec3& q, double h) {
  if (patch.has_jacobian()) return patch.jacobian(q);
  Mat43 j;
  for (int a = 0; a < 3; ++a) {
    Vec3 dq = Vec3::Zero();
    dq[a] = h;
    j.col(a) = (patch.immersion(q + dq).vec() - patch.immersion(q - dq).vec()) / (2.0 * h);
  }
  return j;
}

/// Columns are the frame coefficients of d(Phi)/du_a at Phi(q).
inline Mat43 tangent_matrix(const HypersurfacePatch& patch, const Vec3& q,
                            const FdSteps& steps = {}) {
  if (!patch.domain.contains(q)) throw ContractViolation("tangent_basis: parameter outside domain");
  const Point p = patch.immersion(q);
  check_range(p, "tangent_basis");
  const Mat43 t = frame_scaling(p.t).asDiagonal() * coordinate_jacobian(patch, q, steps.first);
  if (!t.allFinite()) throw DomainError("tangent_basis: non-finite tangent vectors");
  const Eigen::JacobiSVD<Mat43> svd(t);
  const double smallest = svd.singularValues().minCoeff();
  if (smallest <= kRankThreshold) {
    throw DegeneratePatch("tangent_basis: immersion differential is rank deficient");
  }
  return t;
}

inline std::array<TangentVector, 3> tangent_basis(const HypersurfacePatch& patch, const Vec3& q,
                                                  const FdSteps& steps = {}) {
  const Mat43 t = tangent_matrix(patch, q, steps);
  const Point p = patch.immersion(q);
  return {TangentVector{p, t.col(0)}, TangentVector{p, t.col(1)}, TangentVector{p, t.col(2)}};
}

/// Unit vector orthogonal to the three columns with det[t1|t2|t3|N] > 0.
inline FrameVector normal_from_tangents(const Mat43& t) {
  FrameVector n;
  for (int i = 0; i < 4; ++i) {
    Mat3 minor;
    for (int r = 0, row = 0; r < 4; ++r) {
      if (r == i) continue;
      minor.row(row++) = t.row(r);
    }
    // cofactor of entry (i, 3) in [t | e_i]
    n[i] = ((i + 3) % 2 == 0 ? 1.0 : -1.0) * minor.determinant();
  }
  const double len = n.norm();
  if (len <= 0.0 || !std::isfinite(len)) throw DegeneratePatch("unit_normal: no normal direction");
  return n / len;
}

enum class Orientation {
  determinant,  ///< det[t1|t2|t3|N] > 0
  closed_form,  ///< agree with the patch's closed-form normal when it has one
};

struct NormalResult {
  TangentVector normal;  ///< determinant-oriented
  int closed_form_sign = 0;  ///< sign of <N, closed form>; 0 without a closed form
};

inline NormalResult unit_normal(const HypersurfacePatch& patch, const Vec3& q,
                                const FdSteps& steps = {}) {
  const Mat43 t = tangent_matrix(patch, q, steps);
  NormalResult out{{patch.immersion(q), normal_from_tangents(t)}, 0};
  if (patch.has_normal()) out.closed_form_sign = out.normal.v.dot(patch.normal(q)) >= 0.0 ? 1 : -1;
  return out;
}

/// +1 or -1: the factor turning the determinant-oriented normal into the requested one.
inline int orientation_sign(const HypersurfacePatch& patch, const Vec3& q, Orientation o,
                            const FdSteps& steps = {}) {
  if (o == Orientation::determinant || !patch.has_normal()) return 1;
  return unit_normal(patch, q, steps).closed_form_sign;
}

struct AngleFunctions {
  double a = 0.0, b = 0.0, c = 0.0, d = 1.0;

  FrameVector vec() const { return {a, b, c, d}; }
  static AngleFunctions from(const FrameVector& n) { return {n[0], n[1], n[2], n[3]}; }
  double unit_defect() const { return std::abs(vec().squaredNorm() - 1.0); }
};

inline AngleFunctions angle_functions(const HypersurfacePatch& patch, const Vec3& q,
                                      Orientation o = Orientation::determinant,
                                      const FdSteps& steps = {}) {
  const NormalResult n = unit_normal(patch, q, steps);
  const int s = (o == Orientation::closed_form && n.closed_form_sign != 0) ? n.closed_form_sign : 1;
  return AngleFunctions::from(s * n.normal.v);
}

/// The orthonormal tangent frame T_1, T_2, T_3 built algebraically from N = (a, b, c, d).
inline std::array<TangentVector, 3> adapted_frame(const AngleFunctions& n, const Point& base) {
  if (n.unit_defect() > 1e-10) throw ContractViolation("adapted_frame: angle functions not unit");
  const auto [a, b, c, d] = n;
  return {TangentVector{base, {b, -a, d, -c}}, TangentVector{base, {c, -d, -a, b}},
          TangentVector{base, {d, c, -b, -a}}};
}

// ---------------------------------------------------------------------------
// Second-order data

struct ShapeData {
  Mat3 S = Mat3::Zero();   ///< second fundamental form g(-nabla_{t_a} N, t_b), as computed
  Mat3 G = Mat3::Identity();  ///< Gram matrix g(t_a, t_b)
  Mat3 A = Mat3::Zero();   ///< shape operator in the tangent basis, G^{-1} sym(S)
  Vec3 kappas = Vec3::Zero();  ///< principal curvatures, ascending
  Mat3 eigenvectors = Mat3::Identity();  ///< columns: parameter coefficients of principal directions
  double H = 0.0;          ///< trace of the shape operator
  double asymmetry = 0.0;  ///< max |S - S^T|
  Mat43 tangents = Mat43::Zero();
  FrameVector normal = FrameVector::Zero();  ///< the normal the data refers to
  int orientation = 1;     ///< factor applied to the determinant-oriented normal

  Mat3 S_sym() const { return 0.5 * (S + S.transpose()); }
};

struct ShapeOptions {
  FdSteps steps{};
  Orientation orientation = Orientation::closed_form;
};

namespace detail {

/// Normal with a fixed orientation factor, as a function of the parameters.
inline FrameVector oriented_normal(const HypersurfacePatch& patch, const Vec3& q, int sign,
                                   const FdSteps& steps) {
  return sign * normal_from_tangents(tangent_matrix(patch, q, steps));
}

inline Mat3 gram(const Mat43& t) { return t.transpose() * t; }

}  // namespace detail

inline ShapeData shape_spectrum(const HypersurfacePatch& patch, const Vec3& q,
                                const ShapeOptions& opt = {}) {
  ShapeData out;
  out.tangents = tangent_matrix(patch, q, opt.steps);
  out.orientation = orientation_sign(patch, q, opt.orientation, opt.steps);
  out.normal = out.orientation * normal_from_tangents(out.tangents);
  out.G = detail::gram(out.tangents);

  const double h = patch.has_jacobian() ? opt.steps.first : opt.steps.nested;
  for (int a = 0; a < 3; ++a) {
    Vec3 dq = Vec3::Zero();
    dq[a] = h;
    const FrameVector dn = (detail::oriented_normal(patch, q + dq, out.orientation, opt.steps) -
                            detail::oriented_normal(patch, q - dq, out.orientation, opt.steps)) /
                           (2.0 * h);
    const FrameVector nabla = dn + connection(out.tangents.col(a), out.normal);
    for (int b = 0; b < 3; ++b) out.S(a, b) = -nabla.dot(out.tangents.col(b));
  }
  if (!out.S.allFinite()) throw DomainError("shape_spectrum: non-finite second fundamental form");
  out.asymmetry = (out.S - out.S.transpose()).cwiseAbs().maxCoeff();

  const Mat3 s = out.S_sym();
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat3> solver(s, out.G, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw DegeneratePatch("shape_spectrum: Gram matrix is not positive definite");
  }
  out.kappas = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  out.A = out.G.ldlt().solve(s);
  out.H = out.A.trace();
  return out;
}

// ---------------------------------------------------------------------------
// Ricci curvature of the induced metric

struct RicciData {
  Mat3 form = Mat3::Zero();         ///< Ric(t_a, t_b)
  Vec3 eigenvalues = Vec3::Zero();  ///< ascending, relative to G
  Mat43 eigenvectors = Mat43::Zero();  ///< frame coefficients of unit eigenvectors
};

namespace detail {

inline RicciData ricci_spectrum(const Mat3& form, const Mat3& g, const Mat43& tangents) {
  RicciData out;
  out.form = 0.5 * (form + form.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat3> solver(out.form, g);
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = tangents * solver.eigenvectors();
  for (int k = 0; k < 3; ++k) out.eigenvectors.col(k).normalize();
  return out;
}

}  // namespace detail

/// Ricci form assembled from the angle functions and the shape operator.
inline Mat3 ricci_form(const ShapeData& sd) {
  const FrameVector& n = sd.normal;
  const Mat43& t = sd.tangents;
  const double d = n[3];
  const FrameVector j1n = structure_apply(Structure::J1, n);
  const FrameVector j2n = structure_apply(Structure::J2, n);
  const Vec3 p1 = t.transpose() * j1n;
  const Vec3 p2 = t.transpose() * j2n;
  const Mat3 pt = t.transpose() * structure_matrix(Structure::P) * t;
  const Mat3 s = sd.S_sym();
  const Mat3 a2 = s * sd.G.ldlt().solve(s);
  return (-2.0 + 3.0 * d * d) * sd.G + 1.5 * p1 * p1.transpose() + 1.5 * p2 * p2.transpose() -
         3.0 * pt + sd.H * s - a2;
}

inline RicciData induced_ricci(const HypersurfacePatch& patch, const Vec3& q,
                               const ShapeOptions& opt = {}) {
  const ShapeData sd = shape_spectrum(patch, q, opt);
  return detail::ricci_spectrum(ricci_form(sd), sd.G, sd.tangents);
}

// ---------------------------------------------------------------------------
// Riemann tensors on the tangent basis, R[a][b][c][d] = g(R(t_a, t_b) t_c, t_d)

using Riemann3 = std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3>;

/// Riemann tensor of the induced metric predicted by the Gauss equation.
inline Riemann3 gauss_riemann(const ShapeData& sd) {
  Riemann3 r{};
  const Mat3 s = sd.S_sym();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const FrameVector amb =
            curvature(FrameVector(sd.tangents.col(a)), FrameVector(sd.tangents.col(b)),
                      FrameVector(sd.tangents.col(c)));
        for (int d = 0; d < 3; ++d) {
          r[a][b][c][d] = amb.dot(sd.tangents.col(d)) + s(b, c) * s(a, d) - s(a, c) * s(b, d);
        }
      }
  return r;
}

/// Ricci form obtained by contracting a Riemann tensor with the inverse metric.
inline Mat3 ricci_from_riemann(const Riemann3& r, const Mat3& g) {
  const Mat3 gi = g.inverse();
  Mat3 ric = Mat3::Zero();
  for (int b = 0; b < 3; ++b)
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 3; ++a)
        for (int d = 0; d < 3; ++d) ric(b, c) += gi(a, d) * r[a][b][c][d];
  return ric;
}

inline RicciData gauss_ricci(const HypersurfacePatch& patch, const Vec3& q,
                             const ShapeOptions& opt = {}) {
  const ShapeData sd = shape_spectrum(patch, q, opt);
  return detail::ricci_spectrum(ricci_from_riemann(gauss_riemann(sd), sd.G), sd.G, sd.tangents);
}

/// Sectional curvature of span{X, Y} (parameter coefficients) from a Riemann tensor.
inline double sectional_from_riemann(const Riemann3& r, const Mat3& g, const Vec3& x,
                                     const Vec3& y) {
  double num = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) num += x[a] * y[b] * y[c] * x[d] * r[a][b][c][d];
  const double denom = x.dot(g * x) * y.dot(g * y) - std::pow(x.dot(g * y), 2);
  if (denom < kDegeneratePlane) throw DomainError("sectional: degenerate tangent plane");
  return num / denom;
}

namespace detail {

using Christoffel3 = std::array<Mat3, 3>;  // gam[c](a, b) = Gamma^c_{ab}

inline Mat3 metric_at(const HypersurfacePatch& patch, const Vec3& q, const FdSteps& steps) {
  return gram(tangent_matrix(patch, q, steps));
}

inline Christoffel3 induced_christoffel(const HypersurfacePatch& patch, const Vec3& q,
                                        const FdSteps& steps) {
  const double h = steps.second;
  std::array<Mat3, 3> dg;
  for (int m = 0; m < 3; ++m) {
    Vec3 dq = Vec3::Zero();
    dq[m] = h;
    dg[m] = (metric_at(patch, q + dq, steps) - metric_at(patch, q - dq, steps)) / (2.0 * h);
  }
  const Mat3 gi = metric_at(patch, q, steps).inverse();
  Christoffel3 gam;
  for (int c = 0; c < 3; ++c) {
    gam[c].setZero();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int d = 0; d < 3; ++d)
          gam[c](a, b) += 0.5 * gi(c, d) * (dg[a](b, d) + dg[b](a, d) - dg[d](a, b));
  }
  return gam;
}

}  // namespace detail

/// Riemann tensor of the induced metric by central differences of its Christoffel symbols.
inline Riemann3 intrinsic_riemann(const HypersurfacePatch& patch, const Vec3& q,
                                  const FdSteps& steps = {}) {
  if (!patch.domain.contains(q, 2.0 * steps.second)) {
    throw ContractViolation("intrinsic_riemann: parameter too close to the domain boundary");
  }
  const double h = steps.second;
  const auto gam = detail::induced_christoffel(patch, q, steps);
  std::array<detail::Christoffel3, 3> dgam;
  for (int m = 0; m < 3; ++m) {
    Vec3 dq = Vec3::Zero();
    dq[m] = h;
    const auto plus = detail::induced_christoffel(patch, q + dq, steps);
    const auto minus = detail::induced_christoffel(patch, q - dq, steps);
    for (int c = 0; c < 3; ++c) dgam[m][c] = (plus[c] - minus[c]) / (2.0 * h);
  }
  const Mat3 g = detail::metric_at(patch, q, steps);

  // R(d_a, d_b) d_c = R^e_{cab} d_e
  Riemann3 r{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        Vec3 up;
        for (int e = 0; e < 3; ++e) {
          double s = dgam[a][e](b, c) - dgam[b][e](a, c);
          for (int f = 0; f < 3; ++f) s += gam[e](a, f) * gam[f](b, c) - gam[e](b, f) * gam[f](a, c);
          up[e] = s;
        }
        const Vec3 low = g * up;
        for (int d = 0; d < 3; ++d) r[a][b][c][d] = low[d];
      }
  return r;
}

struct FundamentalResiduals {
  double gauss = 0.0;
  double codazzi = 0.0;
};

inline FundamentalResiduals fundamental_residuals(const HypersurfacePatch& patch, const Vec3& q,
                                                  const ShapeOptions& opt = {}) {
  const FdSteps& steps = opt.steps;
  const ShapeData sd = shape_spectrum(patch, q, opt);
  FundamentalResiduals out;

  const Riemann3 intrinsic = intrinsic_riemann(patch, q, steps);
  const Riemann3 predicted = gauss_riemann(sd);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d)
          out.gauss = std::max(out.gauss, std::abs(intrinsic[a][b][c][d] - predicted[a][b][c][d]));

  // (nabla_a h)_{bc} - (nabla_b h)_{ac} = g(R(t_a, t_b) t_c, N)
  ShapeOptions fixed = opt;
  fixed.orientation = Orientation::determinant;
  const double h = steps.second;
  std::array<Mat3, 3> dh;
  for (int m = 0; m < 3; ++m) {
    Vec3 dq = Vec3::Zero();
    dq[m] = h;
    dh[m] = sd.orientation * (shape_spectrum(patch, q + dq, fixed).S_sym() -
                              shape_spectrum(patch, q - dq, fixed).S_sym()) /
            (2.0 * h);
  }
  const auto gam = detail::induced_christoffel(patch, q, steps);
  const Mat3 s = sd.S_sym();
  auto cov = [&](int a, int b, int c) {
    double v = dh[a](b, c);
    for (int e = 0; e < 3; ++e) v -= gam[e](a, b) * s(e, c) + gam[e](a, c) * s(b, e);
    return v;
  };
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const double lhs = cov(a, b, c) - cov(b, a, c);
        const double rhs = curvature(FrameVector(sd.tangents.col(a)), FrameVector(sd.tangents.col(b)),
                                     FrameVector(sd.tangents.col(c)))
                               .dot(sd.normal);
        out.codazzi = std::max(out.codazzi, std::abs(lhs - rhs));
      }
  return out;
}

// ---------------------------------------------------------------------------

/// Unit normal of a level set {F = 0} at p, as frame coefficients of grad F / |grad F|.
inline FrameVector implicit_normal(const std::function<double(const Point&)>& f, const Point& p,
                                   double h = 1e-6) {
  Vec4 grad;
  for (int i = 0; i < 4; ++i) {
    Vec4 dp = Vec4::Zero();
    dp[i] = h;
    grad[i] = (f(Point::from(p.vec() + dp)) - f(Point::from(p.vec() - dp))) / (2.0 * h);
  }
  // E_i(F) = frame coefficient i of grad F
  const Vec4 scale(std::exp(p.t), std::exp(p.t), std::exp(-2.0 * p.t), 1.0);
  const FrameVector n = scale.cwiseProduct(grad);
  const double len = n.norm();
  if (!(len > 0.0)) throw DegeneratePatch("implicit_normal: vanishing gradient");
  return n / len;
}

}  // namespace sol4
