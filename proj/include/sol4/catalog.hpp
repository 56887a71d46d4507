#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sol4/ambient.hpp"
#include "sol4/errors.hpp"
#include "sol4/group.hpp"
#include "sol4/hypersurface.hpp"
#include "sol4/report.hpp"

namespace sol4 {

// The four homogeneous families. Parameters (x1, x2, x3) follow the
// classification's normal forms; each family is an orbit of a subgroup H_k.

enum class Family { M1, M2, M3, M4 };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::M1: return "m1";
    case Family::M2: return "m2";
    case Family::M3: return "m3";
    case Family::M4: return "m4";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "m1") return Family::M1;
  if (s == "m2") return Family::M2;
  if (s == "m3") return Family::M3;
  if (s == "m4") return Family::M4;
  return std::nullopt;
}

struct FamilyId {
  Family tag = Family::M4;
  double r = 0.0;

  /// Validates the parameter range: M1 needs r > 0, M2 and M3 need r >= 0.
  static FamilyId make(Family tag, double r) {
    if (!std::isfinite(r)) throw ContractViolation("FamilyId: non-finite parameter");
    if (tag == Family::M1 && !(r > 0.0)) throw ContractViolation("FamilyId: M1 requires r > 0");
    if ((tag == Family::M2 || tag == Family::M3) && r < 0.0) {
      throw ContractViolation("FamilyId: M2 and M3 require r >= 0");
    }
    return {tag, r};
  }

  std::string label() const { return to_string(tag) + "(r=" + format_number(r) + ")"; }
};

inline double sech(double r) { return 1.0 / std::cosh(r); }

/// Generous default box; sampling routines pick their own sub-boxes.
inline ParamBox catalog_domain() { return {Vec3::Constant(-4.0), Vec3::Constant(4.0)}; }

inline HypersurfacePatch family_patch(const FamilyId& f) {
  const FamilyId id = FamilyId::make(f.tag, f.r);
  const double r = id.r;
  HypersurfacePatch p;
  p.domain = catalog_domain();
  switch (id.tag) {
    case Family::M1: {
      const double th = std::tanh(r);
      const double shift = -std::log(std::cosh(r));
      p.immersion = [th, shift](const Vec3& u) {
        const double e = std::exp(u[2]);
        return Point{e * std::cos(u[0]) * th, e * std::sin(u[0]) * th, u[1], u[2] + shift};
      };
      p.jacobian = [th](const Vec3& u) {
        const double e = std::exp(u[2]);
        const double c = std::cos(u[0]), s = std::sin(u[0]);
        Mat43 j;
        j << -e * s * th, 0, e * c * th,
              e * c * th, 0, e * s * th,
              0, 1, 0,
              0, 0, 1;
        return j;
      };
      p.normal = [r](const Vec3& u) {
        return FrameVector(-std::cos(u[0]) * sech(r), -std::sin(u[0]) * sech(r), 0, std::tanh(r));
      };
      p.implicit = [r](const Point& q) {
        return (q.x * q.x + q.y * q.y) * std::exp(-2.0 * q.t) - std::pow(std::sinh(r), 2);
      };
      break;
    }
    case Family::M2: {
      const double th = std::tanh(r);
      const double shift = -std::log(std::cosh(r));
      p.immersion = [th, shift](const Vec3& u) {
        return Point{u[0], std::exp(u[2]) * th, u[1], u[2] + shift};
      };
      p.jacobian = [th](const Vec3& u) {
        Mat43 j;
        j << 1, 0, 0,
             0, 0, std::exp(u[2]) * th,
             0, 1, 0,
             0, 0, 1;
        return j;
      };
      p.normal = [r](const Vec3&) { return FrameVector(0, -sech(r), 0, std::tanh(r)); };
      p.implicit = [r](const Point& q) { return q.y * std::exp(-q.t) - std::sinh(r); };
      break;
    }
    case Family::M3: {
      const double th = std::tanh(2.0 * r);
      const double shift = 0.5 * std::log(std::cosh(2.0 * r));
      p.immersion = [th, shift](const Vec3& u) {
        return Point{u[0], u[1], 0.5 * std::exp(-2.0 * u[2]) * th, u[2] + shift};
      };
      p.jacobian = [th](const Vec3& u) {
        Mat43 j;
        j << 1, 0, 0,
             0, 1, 0,
             0, 0, -std::exp(-2.0 * u[2]) * th,
             0, 0, 1;
        return j;
      };
      p.normal = [r](const Vec3&) { return FrameVector(0, 0, sech(2.0 * r), std::tanh(2.0 * r)); };
      p.implicit = [r](const Point& q) {
        return 2.0 * q.z * std::exp(2.0 * q.t) - std::sinh(2.0 * r);
      };
      break;
    }
    case Family::M4: {
      p.immersion = [r](const Vec3& u) { return Point{u[0], u[1], u[2], r}; };
      p.jacobian = [](const Vec3&) {
        Mat43 j = Mat43::Zero();
        j.topRows<3>() = Mat3::Identity();
        return j;
      };
      p.normal = [](const Vec3&) { return FrameVector(0, 0, 0, 1); };
      p.implicit = [r](const Point& q) { return q.t - r; };
      break;
    }
  }
  return p;
}

inline double implicit_residual(const FamilyId& f, const Point& p) {
  return family_patch(f).implicit(p);
}

/// Parameters of the point p, assumed to lie on the family (the inverse of the immersion).
inline Vec3 family_locate(const FamilyId& f, const Point& p) {
  const double r = f.r;
  switch (f.tag) {
    case Family::M1: return {std::atan2(p.y, p.x), p.z, p.t + std::log(std::cosh(r))};
    case Family::M2: return {p.x, p.z, p.t + std::log(std::cosh(r))};
    case Family::M3: return {p.x, p.y, p.t - 0.5 * std::log(std::cosh(2.0 * r))};
    case Family::M4: return {p.x, p.y, p.z};
  }
  return Vec3::Zero();
}

/// The orbit base point of each family.
inline Point base_point(const FamilyId& f) {
  const double r = f.r;
  switch (f.tag) {
    case Family::M1: return {std::tanh(r), 0, 0, -std::log(std::cosh(r))};
    case Family::M2: return {0, std::tanh(r), 0, -std::log(std::cosh(r))};
    case Family::M3: return {0, 0, 0.5 * std::tanh(2.0 * r), 0.5 * std::log(std::cosh(2.0 * r))};
    case Family::M4: return {0, 0, 0, r};
  }
  return {};
}

// ---------------------------------------------------------------------------

/// A sectional curvature on the plane spanned by two parameter directions.
struct PlaneCurvature {
  std::string plane;  ///< orthonormal-frame label, e.g. "W1^W3"
  int a = 0;
  int b = 1;
  double value = 0.0;
};

struct ExpectedInvariants {
  Vec3 kappas = Vec3::Zero();  ///< ascending, for the family's closed-form normal
  std::optional<Vec3> ricci;   ///< ascending
  std::vector<PlaneCurvature> sectionals;
  std::optional<double> constant_sectional;
  bool minimal = false;
  double c = 0.0;  ///< angle function c
  double d = 0.0;  ///< angle function d
  std::string implicit_description;
};

namespace detail {
inline Vec3 sorted(Vec3 v) {
  std::sort(v.data(), v.data() + 3);
  return v;
}
}  // namespace detail

inline ExpectedInvariants expected_invariants(const FamilyId& f) {
  const FamilyId id = FamilyId::make(f.tag, f.r);
  const double r = id.r;
  ExpectedInvariants e;
  switch (id.tag) {
    case Family::M1: {
      const double th = std::tanh(r), s2 = sech(r) * sech(r);
      e.kappas = detail::sorted({1.0 / th, th, -2.0 * th});
      e.ricci = detail::sorted({0.0, -4.0 * s2, -4.0 * s2});
      // W1 ~ d/dx1, W2 ~ d/dx3, W3 ~ d/dx2
      e.sectionals = {{"W1^W2", 0, 2, 0.0}, {"W1^W3", 0, 1, 0.0}, {"W2^W3", 2, 1, -4.0 * s2}};
      e.c = 0.0;
      e.d = th;
      e.implicit_description = "(x^2 + y^2) e^{-2t} = sinh^2 r";
      break;
    }
    case Family::M2: {
      const double th = std::tanh(r), s2 = sech(r) * sech(r);
      e.kappas = detail::sorted({th, th, -2.0 * th});
      e.ricci = detail::sorted({s2, -5.0 * s2, -2.0 * s2});
      e.sectionals = {{"W1^W2", 0, 2, -s2}, {"W1^W3", 0, 1, 2.0 * s2}, {"W2^W3", 2, 1, -4.0 * s2}};
      e.minimal = true;
      e.c = 0.0;
      e.d = th;
      e.implicit_description = "y e^{-t} = sinh r";
      break;
    }
    case Family::M3: {
      const double th = std::tanh(2.0 * r), s2 = sech(2.0 * r) * sech(2.0 * r);
      e.kappas = detail::sorted({th, th, -2.0 * th});
      e.ricci = Vec3::Constant(-2.0 * s2);
      e.sectionals = {{"W1^W2", 0, 1, -s2}, {"W1^W3", 0, 2, -s2}, {"W2^W3", 1, 2, -s2}};
      e.constant_sectional = -s2;
      e.minimal = true;
      e.c = sech(2.0 * r);
      e.d = th;
      e.implicit_description = "2 z e^{2t} = sinh 2r";
      break;
    }
    case Family::M4: {
      // Computed shape operator for N = E_4: eigenvalue 1 on E_1, E_2 and -2 on E_3.
      e.kappas = detail::sorted({1.0, 1.0, -2.0});
      e.ricci = Vec3::Zero();
      e.sectionals = {{"E1^E2", 0, 1, 0.0}, {"E1^E3", 0, 2, 0.0}, {"E2^E3", 1, 2, 0.0}};
      e.constant_sectional = 0.0;
      e.minimal = true;
      e.c = 0.0;
      e.d = 1.0;
      e.implicit_description = "t = r";
      break;
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Orbits

/// Subgroup element of H_k. Parameters: H_1 (z, t, theta); H_2 (x, z, t);
/// H_3 (x, y, t); H_4 (x, y, z).
inline Isometry orbit_isometry(Family f, const Vec3& g) {
  switch (f) {
    case Family::M1: return Isometry::make({0, 0, g[0], g[1]}, g[2]);
    case Family::M2: return Isometry::translation({g[0], 0, g[1], g[2]});
    case Family::M3: return Isometry::translation({g[0], g[1], 0, g[2]});
    case Family::M4: return Isometry::translation({g[0], g[1], g[2], 0});
  }
  return Isometry::identity();
}

inline Point orbit_sample(const FamilyId& f, const Vec3& group_params) {
  const FamilyId id = FamilyId::make(f.tag, f.r);
  return apply_isometry(orbit_isometry(id.tag, group_params), base_point(id));
}

struct SampleRanges {
  double translation = 1.0;  ///< |x|, |y|, |z| bound
  double height = 1.0;       ///< |t| bound
};

inline Vec3 random_group_params(Family f, std::mt19937_64& rng, const SampleRanges& ranges = {}) {
  std::uniform_real_distribution<double> tr(-ranges.translation, ranges.translation);
  std::uniform_real_distribution<double> ht(-ranges.height, ranges.height);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  switch (f) {
    case Family::M1: return {tr(rng), ht(rng), ang(rng)};
    case Family::M2: return {tr(rng), tr(rng), ht(rng)};
    case Family::M3: return {tr(rng), tr(rng), ht(rng)};
    case Family::M4: return {tr(rng), tr(rng), tr(rng)};
  }
  return Vec3::Zero();
}

struct HomogeneityTolerances {
  double implicit = 1e-8;
  double tangent = 1e-8;
  double spectrum = 1e-6;
  double angle = 1e-8;
};

/**
 * Samples n random elements of the family's subgroup. At every orbit point:
 * the implicit equation holds, the isometry differential carries the tangent
 * space at the base point onto the tangent space at the image (normal to
 * +-normal), the principal curvatures equal those at the base point, and the
 * angle functions c, d are unchanged.
 */
inline VerificationReport homogeneity_report(const FamilyId& f, int n, std::uint64_t seed = 1,
                                             const HomogeneityTolerances& tol = {},
                                             const ShapeOptions& opt = {}) {
  if (n < 1) throw ContractViolation("homogeneity_report: n must be >= 1");
  const FamilyId id = FamilyId::make(f.tag, f.r);
  const HypersurfacePatch patch = family_patch(id);
  const ExpectedInvariants expect = expected_invariants(id);
  const Point base = base_point(id);
  const Vec3 q0 = family_locate(id, base);
  const ShapeData base_shape = shape_spectrum(patch, q0, opt);

  std::mt19937_64 rng(seed);
  double implicit = 0.0, located = 0.0, tangent = 0.0, normal = 0.0, spectrum = 0.0, angles = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 g = random_group_params(id.tag, rng);
    const Isometry iso = orbit_isometry(id.tag, g);
    const Point p = apply_isometry(iso, base);
    implicit = std::max(implicit, std::abs(patch.implicit(p)));

    const Vec3 q = family_locate(id, p);
    located = std::max(located, (patch.immersion(q).vec() - p.vec()).cwiseAbs().maxCoeff());

    const ShapeData image = shape_spectrum(patch, q, opt);
    for (int a = 0; a < 3; ++a) {
      const TangentVector pushed = isometry_differential(iso, {base, base_shape.tangents.col(a)});
      tangent = std::max(tangent, std::abs(pushed.v.dot(image.normal)) / pushed.v.norm());
    }
    const TangentVector pushed_normal = isometry_differential(iso, {base, base_shape.normal});
    normal = std::max(normal, 1.0 - std::abs(pushed_normal.v.dot(image.normal)));
    spectrum = std::max(spectrum, (image.kappas - base_shape.kappas).cwiseAbs().maxCoeff());
    angles = std::max({angles, std::abs(image.normal[2] - expect.c), std::abs(image.normal[3] - expect.d)});
  }

  VerificationReport rep;
  rep.suite = "homogeneity " + id.label();
  const std::string pre = to_string(id.tag) + ".homogeneity.";
  rep.bound(pre + "implicit_residual", implicit, tol.implicit, "orbit of the subgroup lies on the hypersurface");
  rep.bound(pre + "locate_residual", located, tol.implicit, "orbit point has parameters on the patch");
  rep.bound(pre + "tangent_residual", tangent, tol.tangent, "isometry differential preserves the tangent space");
  rep.bound(pre + "normal_residual", normal, tol.tangent, "isometry differential maps normal to normal");
  rep.bound(pre + "spectrum_residual", spectrum, tol.spectrum, "principal curvatures constant along the orbit");
  rep.bound(pre + "angle_cd_residual", angles, tol.angle, "angle functions c, d constant along the orbit");
  return rep;
}

// ---------------------------------------------------------------------------
// Tubes and parallel families

inline constexpr int kDefaultGeodesicSteps = 10000;

/// Residual of M_{1,r} at the end of the normal geodesic of length r from (0, 0, z0, t0).
inline double tube_residual(double r, double z0, double t0, double alpha,
                            int steps = kDefaultGeodesicSteps) {
  if (!(r > 0.0)) throw ContractViolation("tube_residual: r must be positive");
  const Point p0{0, 0, z0, t0};
  const TangentVector v0{p0, {std::cos(alpha), std::sin(alpha), 0, 0}};
  const GeodesicEnd end = geodesic(p0, v0, r, steps);
  return implicit_residual(FamilyId::make(Family::M1, r), end.point);
}

/**
 * Residual of M_{f,r} at the end of the unit-speed normal geodesic of length r
 * started on M_{f,0} at parameters `start`. The direction is the side of M_{f,0}
 * on which the family's r > 0 members lie: +E_2 for M2 (the closed-form normal
 * of M_{2,0} is -E_2) and +E_3 for M3.
 */
inline double parallel_residual(Family f, double r, const Vec3& start = Vec3::Zero(),
                                int steps = kDefaultGeodesicSteps) {
  if (f != Family::M2 && f != Family::M3) {
    throw ContractViolation("parallel_residual: only M2 and M3 form parallel families");
  }
  if (r < 0.0) throw ContractViolation("parallel_residual: r must be >= 0");
  const FamilyId zero = FamilyId::make(f, 0.0);
  const Point p0 = family_patch(zero).immersion(start);
  if (r == 0.0) return implicit_residual(zero, p0);
  const TangentVector v0 = frame_vector_at(p0, f == Family::M2 ? 1 : 2);
  const GeodesicEnd end = geodesic(p0, v0, r, steps);
  return implicit_residual(FamilyId::make(f, r), end.point);
}

}  // namespace sol4
