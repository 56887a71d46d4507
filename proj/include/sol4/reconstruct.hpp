#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sol4/catalog.hpp"
#include "sol4/errors.hpp"
#include "sol4/group.hpp"
#include "sol4/hypersurface.hpp"
#include "sol4/rk4.hpp"

namespace sol4 {

// Reconstruction of hypersurfaces with constant principal curvatures and
// constant angle functions c, d from their normal data, and matching of
// arbitrary patches onto the catalog.

enum class CaseTag { I_i, I_ii, I_iii, II, III };

inline std::string to_string(CaseTag c) {
  switch (c) {
    case CaseTag::I_i: return "I_i";
    case CaseTag::I_ii: return "I_ii";
    case CaseTag::I_iii: return "I_iii";
    case CaseTag::II: return "II";
    case CaseTag::III: return "III";
  }
  return "?";
}

inline std::optional<CaseTag> parse_case(const std::string& s) {
  for (CaseTag c : {CaseTag::I_i, CaseTag::I_ii, CaseTag::I_iii, CaseTag::II, CaseTag::III}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

inline constexpr double kConstraintTol = 1e-10;

struct MatchResult {
  FamilyId family;
  Isometry isometry;  ///< maps the input patch onto the family's normal form
  double residual = 0.0;  ///< max |implicit| of the family over the mapped samples
  CaseTag detected = CaseTag::III;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw ContractViolation(what);
}

inline void require_case1_d(double d, const char* where) {
  if (!(d > 0.0 && d < 1.0)) throw ContractViolation(std::string(where) + ": need 0 < d < 1");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Case I_i: N = a E_1 + b E_2 + d E_4 with (a, b) rotating along u.

struct Case1iRow {
  double u, a, b;
};

/// RK4 for a_u = -b sqrt(1-d^2)/d, b_u = a sqrt(1-d^2)/d on [0, length].
inline std::vector<Case1iRow> integrate_case1i(double d, double a0, double b0, double length,
                                               int steps) {
  if (d == 0.0) throw ContractViolation("integrate_case1i: d = 0 is impossible in case I_i");
  detail::require_case1_d(d, "integrate_case1i");
  detail::require(std::abs(a0 * a0 + b0 * b0 - (1.0 - d * d)) <= kConstraintTol,
                  "integrate_case1i: need a0^2 + b0^2 = 1 - d^2");
  const double w = std::sqrt(1.0 - d * d) / d;
  const double h = length / steps;
  std::vector<Case1iRow> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  rk4_integrate(
      Eigen::Vector2d(a0, b0), length, steps,
      [w](const Eigen::Vector2d& y) { return Eigen::Vector2d(-w * y[1], w * y[0]); },
      [&](int i, const Eigen::Vector2d& y) { out.push_back({i * h, y[0], y[1]}); });
  return out;
}

/// Angular frequency of the rotating pair (a, b).
inline double case1i_frequency(double d) { return std::sqrt(1.0 - d * d) / d; }

/// Closed-form (a, b) at u for initial values (c1, -c2).
inline Eigen::Vector2d case1i_angles(double d, double c1, double c2, double u) {
  const double w = case1i_frequency(d);
  return {c1 * std::cos(w * u) + c2 * std::sin(w * u), c1 * std::sin(w * u) - c2 * std::cos(w * u)};
}

/// Immersion (u, t, z) -> (x(u, t), y(u, t), z, t) with the translation constants removed.
inline HypersurfacePatch case1i_closed_form(double d, double c1, double c2) {
  detail::require_case1_d(d, "case1i_closed_form");
  detail::require(std::abs(c1 * c1 + c2 * c2 - (1.0 - d * d)) <= kConstraintTol,
                  "case1i_closed_form: need c1^2 + c2^2 = 1 - d^2");
  const double w = case1i_frequency(d);
  const double k = -d / (1.0 - d * d);
  const double sinh_r = d / std::sqrt(1.0 - d * d);
  HypersurfacePatch p;
  p.immersion = [=](const Vec3& q) {
    const double e = std::exp(q[1]);
    const double cu = std::cos(w * q[0]), su = std::sin(w * q[0]);
    return Point{k * e * (c1 * cu + c2 * su), k * e * (c1 * su - c2 * cu), q[2], q[1]};
  };
  p.jacobian = [=](const Vec3& q) {
    const double e = std::exp(q[1]);
    const double cu = std::cos(w * q[0]), su = std::sin(w * q[0]);
    const double x = k * e * (c1 * cu + c2 * su), y = k * e * (c1 * su - c2 * cu);
    Mat43 j;
    j << k * e * w * (-c1 * su + c2 * cu), x, 0,
         k * e * w * (c1 * cu + c2 * su), y, 0,
         0, 0, 1,
         0, 1, 0;
    return j;
  };
  p.normal = [=](const Vec3& q) {
    const Eigen::Vector2d ab = case1i_angles(d, c1, c2, q[0]);
    return FrameVector(ab[0], ab[1], 0.0, d);
  };
  p.implicit = [sinh_r](const Point& q) {
    return (q.x * q.x + q.y * q.y) * std::exp(-2.0 * q.t) - sinh_r * sinh_r;
  };
  return p;
}

/// The rotation L_1 = cosh r [[-c1, c2], [-c2, -c1]] with d = tanh r.
inline Isometry case1i_rotation(double d, double c1, double c2) {
  detail::require_case1_d(d, "case1i_rotation");
  const double ch = 1.0 / std::sqrt(1.0 - d * d);
  return Isometry::make({}, std::atan2(-c2 * ch, -c1 * ch));
}

// ---------------------------------------------------------------------------
// Case I_ii: constant (a, b) with b != 0.

struct Case1iiResult {
  Isometry to_canonical;  ///< the rotation L_2
  HypersurfacePatch canonical;  ///< (x, t, z) -> (x, d e^t / sqrt(1-d^2), z, t)
  HypersurfacePatch original;   ///< L_2^{-1} of the canonical patch, normal (a, b, 0, d)
};

inline Isometry case1ii_rotation(double a, double b, double d) {
  const double s = std::sqrt(1.0 - d * d);
  return Isometry::make({}, std::atan2(-a / s, -b / s));
}

inline HypersurfacePatch case1ii_canonical(double d) {
  const double k = d / std::sqrt(1.0 - d * d);
  const double s = std::sqrt(1.0 - d * d);
  HypersurfacePatch p;
  p.immersion = [k](const Vec3& q) { return Point{q[0], k * std::exp(q[1]), q[2], q[1]}; };
  p.jacobian = [k](const Vec3& q) {
    Mat43 j;
    j << 1, 0, 0,
         0, k * std::exp(q[1]), 0,
         0, 0, 1,
         0, 1, 0;
    return j;
  };
  p.normal = [s, d](const Vec3&) { return FrameVector(0, -s, 0, d); };
  p.implicit = [k](const Point& q) { return q.y * std::exp(-q.t) - k; };
  return p;
}

inline Case1iiResult case1ii_patch(double a, double b, double d) {
  if (std::abs(b) <= kConstraintTol) {
    throw ContractViolation("case1ii_patch: b = 0 belongs to case I_iii");
  }
  detail::require(d >= 0.0 && d < 1.0, "case1ii_patch: need 0 <= d < 1");
  detail::require(std::abs(a * a + b * b + d * d - 1.0) <= kConstraintTol,
                  "case1ii_patch: need a^2 + b^2 + d^2 = 1");
  Case1iiResult out;
  out.to_canonical = case1ii_rotation(a, b, d);
  out.canonical = case1ii_canonical(d);
  out.original = transformed(out.canonical, inverse_isometry(out.to_canonical));
  return out;
}

// ---------------------------------------------------------------------------
// Case I_iii: N = a E_1 + d E_4.

struct Case1iiiReduction {
  Isometry isometry;  ///< L_3, preceded by diag(-1, 1) when a > 0
  double a = 0.0, b = 0.0, d = 0.0;  ///< case I_ii input after the reduction
};

inline Case1iiiReduction case1iii_reduce(double a, double d) {
  detail::require(d >= 0.0 && d < 1.0, "case1iii_reduce: need 0 <= d < 1");
  detail::require(std::abs(a * a + d * d - 1.0) <= kConstraintTol,
                  "case1iii_reduce: need a^2 + d^2 = 1");
  const Isometry l3 = Isometry::make({}, std::numbers::pi / 2, -1);  // swap x and y
  const Isometry flip = Isometry::make({}, std::numbers::pi, -1);    // x -> -x
  Case1iiiReduction out;
  out.isometry = a > 0.0 ? l3 * flip : l3;
  const FrameVector n = out.isometry.linear_matrix() * FrameVector(a, 0, 0, d);
  out.a = n[0];
  out.b = n[1];
  out.d = n[3];
  return out;
}

/// Patch with normal (a, 0, 0, d), obtained by undoing the reduction.
inline HypersurfacePatch case1iii_patch(double a, double d) {
  const Case1iiiReduction red = case1iii_reduce(a, d);
  const Case1iiResult r = case1ii_patch(red.a, red.b, red.d);
  return transformed(r.original, inverse_isometry(red.isometry));
}

// ---------------------------------------------------------------------------
// Case II and III

/// (x, y, t) -> (x, y, (d / 2c) e^{-2t}, t).
inline HypersurfacePatch case2_patch(double c, double d) {
  detail::require(c > 0.0 && c <= 1.0, "case2_patch: need 0 < c <= 1");
  detail::require(d >= 0.0 && d < 1.0, "case2_patch: need 0 <= d < 1");
  detail::require(std::abs(c * c + d * d - 1.0) <= kConstraintTol, "case2_patch: need c^2 + d^2 = 1");
  const double k = d / (2.0 * c);
  HypersurfacePatch p;
  p.immersion = [k](const Vec3& q) { return Point{q[0], q[1], k * std::exp(-2.0 * q[2]), q[2]}; };
  p.jacobian = [k](const Vec3& q) {
    Mat43 j;
    j << 1, 0, 0,
         0, 1, 0,
         0, 0, -2.0 * k * std::exp(-2.0 * q[2]),
         0, 0, 1;
    return j;
  };
  p.normal = [c, d](const Vec3&) { return FrameVector(0, 0, c, d); };
  p.implicit = [k](const Point& q) { return 2.0 * q.z * std::exp(2.0 * q.t) - 2.0 * k; };
  return p;
}

inline HypersurfacePatch case3_patch(double level = 0.0) {
  return family_patch(FamilyId::make(Family::M4, level));
}

// ---------------------------------------------------------------------------

/**
 * Symmetry residual of the shape operator in case II with a != 0: the values of
 * T_2(b), T_3(b) forced by the first two symmetry conditions, substituted into
 * the third. Algebraically this equals 3ac(a^2 + b^2 + c^2 + d^2) whatever T_1(b) is.
 */
inline double lemma48_residual(double a, double b, double c, double d, double t1b) {
  if (a == 0.0) throw ContractViolation("lemma48_residual: need a != 0");
  detail::require(c > 0.0, "lemma48_residual: need c > 0");
  detail::require(std::abs(a * a + b * b + c * c + d * d - 1.0) <= kConstraintTol,
                  "lemma48_residual: need a unit normal");
  const double ab2 = a * a + b * b;
  const double t2b = (-3.0 * a * a * c * c + b * c * t1b + a * d * (3.0 * b * c + t1b)) / ab2;
  const double t3b = (-3.0 * a * c * (b * c + a * d) + (b * d - a * c) * t1b) / ab2;
  return 3.0 * a * a * a * c + 3.0 * a * b * b * c + (b * d - a * c) * t2b - (b * c + a * d) * t3b;
}

// ---------------------------------------------------------------------------
// Matching

struct CanonicalizeOptions {
  int samples_per_axis = 4;
  double constancy_tol = 1e-6;  ///< spread of c, d (and of a, b for case I_ii)
  double c_zero = 1e-8;         ///< |c| below this is c = 0
  double match_tol = 1e-8;
  FdSteps steps{};
};

namespace detail {

inline std::vector<Vec3> sample_grid(const ParamBox& box, int n) {
  std::vector<Vec3> out;
  const Vec3 c = box.center();
  out.push_back(c);  // reference sample first
  if (n < 2) return out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 f(i / double(n - 1), j / double(n - 1), k / double(n - 1));
        out.push_back(box.lo + f.cwiseProduct(box.hi - box.lo));
      }
  return out;
}

inline double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace detail

/**
 * Finds an isometry carrying the patch onto M_{1,r}, M_{2,r}, M_{3,r} or M_{4,0}.
 * The normal is oriented so that d >= 0 (c >= 0 when d = 0); the input must have
 * constant c and d over the sample grid.
 */
inline MatchResult canonicalize(const HypersurfacePatch& patch, const CanonicalizeOptions& opt = {}) {
  const std::vector<Vec3> grid = detail::sample_grid(patch.domain, opt.samples_per_axis);
  std::vector<Point> pts;
  std::vector<FrameVector> normals;
  for (const Vec3& q : grid) {
    pts.push_back(patch.immersion(q));
    normals.push_back(unit_normal(patch, q, opt.steps).normal.v);
  }

  // One orientation for the whole (connected) patch, chosen at the reference sample.
  const FrameVector& n0 = normals.front();
  double sign = 1.0;
  if (std::abs(n0[3]) > opt.constancy_tol) {
    sign = n0[3] > 0 ? 1.0 : -1.0;
  } else if (std::abs(n0[2]) > opt.c_zero) {
    sign = n0[2] > 0 ? 1.0 : -1.0;
  }
  std::vector<double> as, bs, cs, ds;
  for (FrameVector& n : normals) {
    n *= sign;
    as.push_back(n[0]);
    bs.push_back(n[1]);
    cs.push_back(n[2]);
    ds.push_back(n[3]);
  }
  if (detail::spread(cs) > opt.constancy_tol || detail::spread(ds) > opt.constancy_tol) {
    throw NotInScope("canonicalize: angle functions c, d are not constant");
  }

  Isometry iso = Isometry::identity();
  double c = normals.front()[2];
  const double d = std::clamp(normals.front()[3], 0.0, 1.0);
  if (c < 0.0) {
    iso = Isometry::make({}, 0.0, 1, -1);
    c = -c;
  }
  auto mapped = [&](const Isometry& g, std::size_t i) { return apply_isometry(g, pts[i]); };

  MatchResult out;
  if (c < opt.c_zero) {
    const bool ab_varies = detail::spread(as) > opt.constancy_tol || detail::spread(bs) > opt.constancy_tol;
    if (d >= 1.0 - opt.c_zero) {
      out.detected = CaseTag::III;
      out.family = FamilyId::make(Family::M4, 0.0);
      iso = Isometry::translation({0, 0, 0, -mapped(iso, 0).t}) * iso;
    } else if (ab_varies) {
      if (!(d > 0.0)) throw NotInScope("canonicalize: rotating (a, b) requires d > 0");
      out.detected = CaseTag::I_i;
      out.family = FamilyId::make(Family::M1, std::atanh(d));
      const Point p = mapped(iso, 0);
      const FrameVector n = iso.linear_matrix() * normals.front();
      const double k = std::exp(p.t) * d / (1.0 - d * d);
      iso = Isometry::translation({-(p.x + k * n[0]), -(p.y + k * n[1]), 0, 0}) * iso;
    } else {
      const double a0 = normals.front()[0], b0 = normals.front()[1];
      if (std::abs(b0) > opt.constancy_tol) {
        out.detected = CaseTag::I_ii;
        iso = case1ii_rotation(a0, b0, d) * iso;
      } else {
        out.detected = CaseTag::I_iii;
        const Case1iiiReduction red = case1iii_reduce(a0 >= 0 ? std::sqrt(1 - d * d) : -std::sqrt(1 - d * d), d);
        iso = case1ii_rotation(red.a, red.b, red.d) * red.isometry * iso;
      }
      out.family = FamilyId::make(Family::M2, std::atanh(d));
      const Point p = mapped(iso, 0);
      const double k = d / std::sqrt(1.0 - d * d);
      iso = Isometry::translation({0, -(p.y - k * std::exp(p.t)), 0, 0}) * iso;
    }
  } else if (c < opt.constancy_tol) {
    throw AmbiguousCase("canonicalize: c is too close to 0 to decide between case I and case II");
  } else {
    if (std::max(detail::spread(as), detail::spread(bs)) > opt.constancy_tol ||
        std::abs(normals.front()[0]) > opt.constancy_tol ||
        std::abs(normals.front()[1]) > opt.constancy_tol) {
      throw NotInScope("canonicalize: c > 0 with a, b not identically zero");
    }
    out.detected = CaseTag::II;
    out.family = FamilyId::make(Family::M3, 0.5 * std::atanh(d));
    const Point p = mapped(iso, 0);
    iso = Isometry::translation({0, 0, -(p.z - d / (2.0 * c) * std::exp(-2.0 * p.t)), 0}) * iso;
  }

  out.isometry = iso;
  const HypersurfacePatch target = family_patch(out.family);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.residual = std::max(out.residual, std::abs(target.implicit(mapped(iso, i))));
  }
  if (!(out.residual <= opt.match_tol)) {
    throw NoMatch("canonicalize: residual " + format_number(out.residual) + " against " +
                  out.family.label() + " exceeds tolerance");
  }
  return out;
}

}  // namespace sol4
