#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sol4/reconstruct.hpp"

namespace {

using namespace sol4;

constexpr double kPi = std::numbers::pi;

double sech(double x) { return 1.0 / std::cosh(x); }

TEST(Case1i, IntegrationMatchesClosedForm) {
  const double d = std::tanh(1.0);
  const double length = 2 * kPi * std::sinh(1.0);
  const int steps = static_cast<int>(std::ceil(length / 1e-3));
  const auto rows = integrate_case1i(d, sech(1.0), 0.0, length, steps);
  ASSERT_EQ(rows.size(), static_cast<std::size_t>(steps) + 1);
  double err = 0.0, drift = 0.0;
  for (const Case1iRow& r : rows) {
    err = std::max({err, std::abs(r.a - sech(1.0) * std::cos(r.u / std::sinh(1.0))),
                    std::abs(r.b - sech(1.0) * std::sin(r.u / std::sinh(1.0)))});
    drift = std::max(drift, std::abs(r.a * r.a + r.b * r.b - (1 - d * d)));
  }
  EXPECT_LT(err, 1e-8);
  EXPECT_LT(drift, 1e-10);
  EXPECT_NEAR(rows.back().u, length, 1e-12);
}

// Frequency estimated from zero crossings of b with linear interpolation.
TEST(Case1i, ZeroCrossingFrequency) {
  for (double d : {0.3, std::tanh(1.0), 0.9}) {
    const double a0 = std::sqrt(1 - d * d);
    const double w = std::sqrt(1 - d * d) / d;
    const double length = 6 * kPi / w + 0.5;
    const auto rows = integrate_case1i(d, a0, 0.0, length, static_cast<int>(length / 1e-3));
    std::vector<double> zeros;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const Case1iRow &p = rows[i - 1], &q = rows[i];
      if (p.b != 0.0 && (p.b < 0) != (q.b < 0)) zeros.push_back(p.u - p.b * (q.u - p.u) / (q.b - p.b));
    }
    ASSERT_GE(zeros.size(), 5u);
    const double freq = kPi * (zeros.size() - 1) / (zeros.back() - zeros.front());
    EXPECT_NEAR(freq, case1i_frequency(d), 1e-6) << d;
  }
}

TEST(Case1i, Preconditions) {
  EXPECT_THROW(integrate_case1i(0.0, 1.0, 0.0, 1.0, 10), ContractViolation);
  EXPECT_THROW(integrate_case1i(0.5, 1.0, 0.0, 1.0, 10), ContractViolation);
  EXPECT_THROW(integrate_case1i(0.5, std::sqrt(0.75), 0.0, 1.0, 0), ContractViolation);
  EXPECT_THROW(case1i_closed_form(0.5, 0.1, 0.1), ContractViolation);
}

TEST(Case1i, ClosedFormIsATube) {
  const double r = 1.0, d = std::tanh(r);
  const HypersurfacePatch p = case1i_closed_form(d, sech(r), 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Point x = p.immersion({u(rng) * 5, u(rng), u(rng)});
    EXPECT_LT(std::abs(implicit_residual({Family::M1, r}, x)), 1e-12);
  }
}

TEST(Case1i, RotationTakesPatchToNormalForm) {
  const double r = 0.8, d = std::tanh(r);
  const double c1 = sech(r) * std::cos(0.4), c2 = sech(r) * std::sin(0.4);
  const Isometry l1 = case1i_rotation(d, c1, c2);
  EXPECT_NEAR(l1.planar().determinant(), 1.0, 1e-14);
  EXPECT_NEAR(l1.planar()(0, 0), -c1 * std::cosh(r), 1e-14);
  EXPECT_NEAR(l1.planar()(0, 1), c2 * std::cosh(r), 1e-14);

  const HypersurfacePatch p = case1i_closed_form(d, c1, c2);
  const HypersurfacePatch m1 = family_patch({Family::M1, r});
  for (double t : {-0.5, 0.0, 0.7}) {
    const Point a = apply_isometry(l1, p.immersion({0.0, t, 0.3}));
    const Point b = m1.immersion({0.0, 0.3, t - std::log(sech(r))});
    EXPECT_LT((a.vec() - b.vec()).cwiseAbs().maxCoeff(), 1e-12);
  }
  const FrameVector n = l1.linear_matrix() * p.normal({0, 0, 0});
  EXPECT_LT((n - m1.normal({0, 0, 0})).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Case1i, ShapeOperatorSpectrum) {
  for (double d : {std::tanh(1.0), 0.4}) {
    const HypersurfacePatch p = case1i_closed_form(d, 0.0, -std::sqrt(1 - d * d));
    const ShapeData sd = shape_spectrum(p, {0.3, 0.2, -0.1});
    Vec3 expected(1 / d, d, -2 * d);
    std::sort(expected.data(), expected.data() + 3);
    EXPECT_LT((sd.kappas - expected).cwiseAbs().maxCoeff(), 1e-5);
    const NormalResult n = unit_normal(p, {0.3, 0.2, -0.1});
    EXPECT_NEAR(std::abs(n.normal.v.dot(p.normal({0.3, 0.2, -0.1}))), 1.0, 1e-12);
  }
}

TEST(Case1ii, RotationValues) {
  const Case1iiResult r = case1ii_patch(0.48, 0.64, 0.6);
  Mat2 expected;
  expected << -0.8, 0.6, -0.6, -0.8;
  EXPECT_LT((r.to_canonical.planar() - expected).cwiseAbs().maxCoeff(), 1e-14);
  const FrameVector n = r.to_canonical.linear_matrix() * FrameVector(0.48, 0.64, 0, 0.6);
  EXPECT_LT((n - FrameVector(0, -0.8, 0, 0.6)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Case1ii, PatchesLieOnSecondFamily) {
  const double r = std::log(2.0);
  EXPECT_NEAR(std::atanh(0.6), r, 1e-15);
  const Case1iiResult c = case1ii_patch(0.48, 0.64, 0.6);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Vec3 q{u(rng), u(rng), u(rng)};
    EXPECT_LT(std::abs(implicit_residual({Family::M2, r}, c.canonical.immersion(q))), 1e-12);
    const Point back = apply_isometry(c.to_canonical, c.original.immersion(q));
    EXPECT_LT((back.vec() - c.canonical.immersion(q).vec()).cwiseAbs().maxCoeff(), 1e-12);
  }
  const AngleFunctions n = angle_functions(c.original, {0.1, 0.2, 0.3}, Orientation::closed_form);
  EXPECT_LT((n.vec() - FrameVector(0.48, 0.64, 0, 0.6)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Case1ii, DegenerateInputs) {
  EXPECT_THROW(case1ii_patch(0.8, 0.0, 0.6), ContractViolation);
  EXPECT_THROW(case1ii_patch(0.5, 0.5, 0.5), ContractViolation);
  // a = 0: the rotation only fixes the sign of b
  const Case1iiResult aligned = case1ii_patch(0.0, -0.8, 0.6);
  EXPECT_LT((aligned.to_canonical.planar() - Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  // d = 0: the plane y = 0, totally geodesic
  const Case1iiResult plane = case1ii_patch(0.6, 0.8, 0.0);
  EXPECT_EQ(plane.canonical.immersion({0.3, 0.4, 0.5}).y, 0.0);
  const ShapeData sd = shape_spectrum(plane.original, {0.3, 0.4, 0.5});
  EXPECT_LT(sd.kappas.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Case1iii, ReductionGivesCase1iiInput) {
  for (double a : {0.8, -0.8}) {
    const Case1iiiReduction red = case1iii_reduce(a, 0.6);
    EXPECT_NEAR(red.a, 0.0, 1e-15);
    EXPECT_NEAR(red.b, -0.8, 1e-15);
    EXPECT_NEAR(red.d, 0.6, 1e-15);
    EXPECT_NO_THROW(case1ii_patch(red.a, red.b, red.d));
    const HypersurfacePatch p = case1iii_patch(a, 0.6);
    const AngleFunctions n = angle_functions(p, {0.1, 0.2, 0.3}, Orientation::closed_form);
    EXPECT_LT((n.vec() - FrameVector(a, 0, 0, 0.6)).cwiseAbs().maxCoeff(), 1e-12);
    const MatchResult m = canonicalize(p);
    EXPECT_EQ(m.family.tag, Family::M2);
    EXPECT_EQ(m.detected, CaseTag::I_iii);
    EXPECT_NEAR(m.family.r, std::log(2.0), 1e-10);
  }
}

TEST(Case2, Patches) {
  const HypersurfacePatch flat = case2_patch(1.0, 0.0);
  EXPECT_EQ(flat.immersion({0.3, -0.2, 0.9}).z, 0.0);
  const HypersurfacePatch p = case2_patch(sech(1.0), std::tanh(1.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    EXPECT_LT(std::abs(implicit_residual({Family::M3, 0.5}, p.immersion({u(rng), u(rng), u(rng)}))),
              1e-12);
  }
  const ShapeData sd = shape_spectrum(p, {0.1, 0.2, 0.3});
  const double th = std::tanh(1.0);
  EXPECT_LT((sd.kappas - Vec3(-2 * th, th, th)).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_THROW(case2_patch(0.0, 1.0), ContractViolation);
  EXPECT_THROW(case2_patch(0.5, 0.5), ContractViolation);
}

// Independent route: solve the two linear symmetry conditions for T_2(b), T_3(b)
// numerically and substitute into the third.
double symmetry_oracle(double a, double b, double c, double d, double t1) {
  Mat2 m;
  Eigen::Vector2d rhs;
  // d(3bc + T1) - a(3c^2 + T2) + b(c T1 - b T2)/a = 0
  m(0, 0) = -a - b * b / a;
  m(0, 1) = 0.0;
  rhs[0] = -(d * (3 * b * c + t1) - 3 * a * c * c + b * c * t1 / a);
  // -c(3bc + T1) - a(3cd + T3) + b(d T1 - b T3)/a = 0
  m(1, 0) = 0.0;
  m(1, 1) = -a - b * b / a;
  rhs[1] = -(-c * (3 * b * c + t1) - 3 * a * c * d + b * d * t1 / a);
  const Eigen::Vector2d t = m.partialPivLu().solve(rhs);
  return 3 * a * a * a * c + 3 * a * b * b * c + (b * d - a * c) * t[0] - (b * c + a * d) * t[1];
}

TEST(CaseTwoSymmetry, SymmetricPointIsT1Independent) {
  const double r1 = lemma48_residual(0.5, 0.5, 0.5, 0.5, 0.3);
  const double r2 = lemma48_residual(0.5, 0.5, 0.5, 0.5, -1.7);
  EXPECT_LT(std::abs(r1 - r2), 1e-12);
  EXPECT_NEAR(r1, 0.75, 1e-12);
}

TEST(CaseTwoSymmetry, RandomAdmissibleSamples) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> t1(-5.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    Vec4 n(g(rng), g(rng), std::abs(g(rng)) + 0.05, g(rng));
    n.normalize();
    std::vector<double> vals;
    for (int j = 0; j < 10; ++j) {
      const double x = t1(rng);
      vals.push_back(lemma48_residual(n[0], n[1], n[2], n[3], x));
      EXPECT_NEAR(vals.back(), symmetry_oracle(n[0], n[1], n[2], n[3], x), 1e-9);
    }
    double mean = 0.0, var = 0.0;
    for (double v : vals) mean += v / vals.size();
    for (double v : vals) var += (v - mean) * (v - mean) / (vals.size() - 1);
    EXPECT_LT(var, 1e-20);
    EXPECT_NEAR(mean, 3 * n[0] * n[2], 1e-12);
  }
}

TEST(CaseTwoSymmetry, LinearInAcWithZeroIntercept) {
  // vary c at fixed a, b, d direction, renormalized to the unit sphere
  std::vector<double> xs, ys;
  for (int k = 1; k <= 20; ++k) {
    Vec4 n(0.6, -0.3, 0.05 * k, 0.4);
    n.normalize();
    xs.push_back(n[0] * n[2]);
    ys.push_back(lemma48_residual(n[0], n[1], n[2], n[3], 0.7));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  EXPECT_NEAR(slope, 3.0, 1e-10);
  EXPECT_NEAR(my - slope * mx, 0.0, 1e-10);
}

TEST(CaseTwoSymmetry, VanishesAsCGoesToZero) {
  double prev = INFINITY;
  for (double c : {1e-1, 1e-3, 1e-6, 1e-9}) {
    const double s = std::sqrt(1 - c * c);
    const double v = std::abs(lemma48_residual(0.6 * s, 0.0, c, 0.8 * s, 1.0));
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-8);
  EXPECT_THROW(lemma48_residual(0.0, 0.6, 0.0, 0.8, 1.0), ContractViolation);
}

// ---------------------------------------------------------------------------

TEST(Canonicalize, Case2RoundTrip) {
  const MatchResult m = canonicalize(case2_patch(sech(1.0), std::tanh(1.0)));
  EXPECT_EQ(m.family.tag, Family::M3);
  EXPECT_NEAR(m.family.r, 0.5, 1e-12);
  EXPECT_LT(m.residual, 1e-10);
  EXPECT_EQ(m.detected, CaseTag::II);
}

TEST(Canonicalize, Case1iiRoundTrip) {
  const MatchResult m = canonicalize(case1ii_patch(0.48, 0.64, 0.6).original);
  EXPECT_EQ(m.family.tag, Family::M2);
  EXPECT_NEAR(m.family.r, std::log(2.0), 1e-10);
  EXPECT_LT(m.residual, 1e-10);
  EXPECT_EQ(m.detected, CaseTag::I_ii);
}

TEST(Canonicalize, Case1iRoundTrip) {
  const double d = std::tanh(1.0);
  const MatchResult m = canonicalize(case1i_closed_form(d, sech(1.0), 0.0));
  EXPECT_EQ(m.family.tag, Family::M1);
  EXPECT_NEAR(m.family.r, 1.0, 1e-9);
  EXPECT_LT(m.residual, 1e-8);
  EXPECT_EQ(m.detected, CaseTag::I_i);
}

TEST(Canonicalize, FlatSliceGoesToLevelZero) {
  const MatchResult m = canonicalize(family_patch({Family::M4, 2.0}));
  EXPECT_EQ(m.family.tag, Family::M4);
  EXPECT_EQ(m.family.r, 0.0);
  EXPECT_NEAR(m.isometry.trans.t, -2.0, 1e-14);
  EXPECT_LT(m.residual, 1e-14);
  EXPECT_EQ(canonicalize(case3_patch()).detected, CaseTag::III);
}

TEST(Canonicalize, RandomlyMovedCatalogPatches) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution flip(0.5);
  const std::vector<FamilyId> families = {{Family::M1, 0.5}, {Family::M1, 1.5}, {Family::M2, 0.0},
                                          {Family::M2, 0.8}, {Family::M3, 0.0}, {Family::M3, 0.4},
                                          {Family::M4, 0.3}};
  for (const FamilyId& f : families) {
    for (int k = 0; k < 5; ++k) {
      const Isometry iso = Isometry::make({u(rng), u(rng), u(rng), u(rng)}, 3 * u(rng),
                                          flip(rng) ? -1 : 1, flip(rng) ? -1 : 1);
      HypersurfacePatch p = transformed(family_patch(f), iso);
      p.domain = {Vec3::Constant(-1.0), Vec3::Constant(1.0)};
      if (k % 2) p.jacobian = nullptr;
      const MatchResult m = canonicalize(p);
      EXPECT_EQ(m.family.tag, f.tag) << f.label();
      EXPECT_NEAR(m.family.r, f.tag == Family::M4 ? 0.0 : f.r, 1e-8) << f.label();
      EXPECT_LT(m.residual, 1e-8) << f.label();
    }
  }
}

TEST(Canonicalize, Refusals) {
  HypersurfacePatch graph;
  graph.immersion = [](const Vec3& q) { return Point{q[0], q[1], q[2], 0.2 * std::sin(q[0])}; };
  EXPECT_THROW(canonicalize(graph), NotInScope);

  const double c = 5e-7;
  EXPECT_THROW(canonicalize(case2_patch(c, std::sqrt(1 - c * c))), AmbiguousCase);

  CanonicalizeOptions strict;
  strict.match_tol = 0.0;
  EXPECT_THROW(canonicalize(case1i_closed_form(0.5, std::sqrt(0.75), 0.0), strict), NoMatch);
}

}  // namespace
