#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sol4/group.hpp"

namespace {

using namespace sol4;

constexpr double kPi = std::numbers::pi;

void expect_point_near(const Point& a, const Point& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
  EXPECT_NEAR(a.t, b.t, tol);
}

Point random_point(std::mt19937_64& rng, double tmax = 5.0) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> ut(-tmax, tmax);
  return {u(rng), u(rng), u(rng), ut(rng)};
}

Isometry random_isometry(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  std::bernoulli_distribution flip(0.5);
  return Isometry::make(random_point(rng, 1.0), ang(rng), flip(rng) ? -1 : 1, flip(rng) ? -1 : 1);
}

TEST(Compose, IdentityIsNeutral) {
  const Point p{1.5, -0.25, 3.0, 0.7};
  expect_point_near(compose(identity_point(), p), p, 0.0);
  expect_point_near(compose(p, identity_point()), p, 0.0);
}

TEST(Compose, DirectEvaluation) {
  const Point r = compose({0, 0, 0, 1}, {1, 2, 3, 0});
  expect_point_near(r, {2.718282, 5.436564, 0.406006, 1.0}, 5e-7);
  expect_point_near(r, {std::exp(1.0), 2 * std::exp(1.0), 3 * std::exp(-2.0), 1.0}, 1e-15);
}

TEST(Compose, InverseAxiom) {
  const Point p{1, -2, 0.5, 0.3};
  expect_point_near(compose(p, inverse(p)), identity_point(), 1e-15);
  expect_point_near(compose(inverse(p), p), identity_point(), 1e-15);
}

TEST(Inverse, HandSolvedValue) {
  const Point q = inverse({1, 0, 0, std::log(2.0)});
  expect_point_near(q, {-0.5, 0, 0, -std::log(2.0)}, 1e-15);
  expect_point_near(inverse(identity_point()), identity_point(), 0.0);
}

TEST(GroupAxioms, RandomTriples) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 200; ++n) {
    const Point a = random_point(rng), b = random_point(rng), c = random_point(rng);
    const Point l = compose(compose(a, b), c);
    const Point r = compose(a, compose(b, c));
    const double scale = 1.0 + l.vec().cwiseAbs().maxCoeff();
    EXPECT_LT((l.vec() - r.vec()).cwiseAbs().maxCoeff() / scale, 1e-12);
    const Point ii = inverse(inverse(a));
    EXPECT_LT((ii.vec() - a.vec()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(compose(a, inverse(a)).vec().cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(RangeGuard, RejectsHugeT) {
  EXPECT_THROW(compose({0, 0, 0, 301}, {0, 0, 0, 0}), DomainError);
  EXPECT_THROW(inverse({0, 0, 0, -400}), DomainError);
  EXPECT_THROW(to_frame_coefficients({0, 0, 0, 350}, Vec4::Ones()), DomainError);
  EXPECT_THROW(compose({0, 0, 0, 200}, {0, 0, 0, 200}), DomainError);
  EXPECT_THROW(compose({NAN, 0, 0, 0}, {0, 0, 0, 0}), DomainError);
}

TEST(FrameCoefficients, KnownValues) {
  const TangentVector v = to_frame_coefficients({0, 0, 0, 1}, {1, 0, 0, 0});
  EXPECT_NEAR(v.v[0], std::exp(-1.0), 1e-16);
  EXPECT_NEAR(v.v[0], 0.367879, 5e-7);
  EXPECT_EQ(v.v.tail<3>().norm(), 0.0);

  const TangentVector w = to_frame_coefficients({3, -1, 2, -0.8}, {0, 0, 0, 1});
  EXPECT_EQ(w.v, Vec4(0, 0, 0, 1));
}

TEST(FrameCoefficients, RoundTrip) {
  const Point p{1, 1, 1, -0.5};
  const TangentVector v{p, {0.3, -0.1, 2.0, 0.7}};
  const TangentVector back = to_frame_coefficients(p, to_coordinate_velocity(v));
  EXPECT_LT((back.v - v.v).cwiseAbs().maxCoeff(), 1e-14);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (int k = 0; k < 100; ++k) {
    const Point q = random_point(rng);
    const TangentVector u{q, {n(rng), n(rng), n(rng), n(rng)}};
    const TangentVector r = to_frame_coefficients(q, to_coordinate_velocity(u));
    EXPECT_LT((r.v - u.v).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ApplyIsometry, Identity) {
  const Point p{0.3, 0.4, -1, 2};
  expect_point_near(apply_isometry(Isometry::identity(), p), p, 0.0);
}

TEST(ApplyIsometry, QuarterTurn) {
  expect_point_near(apply_isometry(Isometry::rotation(kPi / 2), {1, 0, 0, 0}), {0, 1, 0, 0},
                    1e-15);
}

TEST(ApplyIsometry, TubeOrbitInvariance) {
  const Isometry iso = Isometry::make({0, 0, 1, 0.7}, kPi / 3);
  const Point q = apply_isometry(iso, {std::tanh(1.0), 0, 0, std::log(1.0 / std::cosh(1.0))});
  EXPECT_NEAR((q.x * q.x + q.y * q.y) * std::exp(-2 * q.t), std::pow(std::sinh(1.0), 2), 1e-12);
}

TEST(ApplyIsometry, SemidirectLaw) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 200; ++n) {
    const Isometry a = random_isometry(rng), b = random_isometry(rng);
    const Point p = random_point(rng, 2.0);
    const Point lhs = apply_isometry(a, apply_isometry(b, p));
    const Point rhs = apply_isometry(a * b, p);
    EXPECT_LT((lhs.vec() - rhs.vec()).cwiseAbs().maxCoeff(), 1e-12);
    const Point back = apply_isometry(inverse_isometry(a), apply_isometry(a, p));
    EXPECT_LT((back.vec() - p.vec()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ApplyIsometry, ThetaNormalized) {
  EXPECT_NEAR(Isometry::make({}, -kPi / 2).theta, 1.5 * kPi, 1e-15);
  EXPECT_NEAR(Isometry::make({}, 5 * kPi).theta, kPi, 1e-14);
  EXPECT_THROW(Isometry::make({}, 0, 2, 1), ContractViolation);
}

TEST(IsometryDifferential, TranslationKeepsCoefficients) {
  const Isometry iso = Isometry::translation({1, 2, 3, 0.4});
  const TangentVector v{{0.1, 0.2, 0.3, 0.4}, {0.5, -1, 2, 3}};
  const TangentVector w = isometry_differential(iso, v);
  EXPECT_EQ(w.v, v.v);
  expect_point_near(w.base, apply_isometry(iso, v.base), 0.0);
}

TEST(IsometryDifferential, HalfTurn) {
  const TangentVector w = isometry_differential(Isometry::rotation(kPi), {{}, {1, 0, 0.5, 0}});
  EXPECT_LT((w.v - Vec4(-1, 0, 0.5, 0)).norm(), 1e-15);
}

// Central differences of apply_isometry along the coordinate velocity of v.
TEST(IsometryDifferential, MatchesFiniteDifferencePushforward) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const Isometry iso = random_isometry(rng);
    const Point p = random_point(rng, 1.5);
    const TangentVector v{p, {n(rng), n(rng), n(rng), n(rng)}};
    const Vec4 c = to_coordinate_velocity(v);
    const Point plus = apply_isometry(iso, Point::from(p.vec() + h * c));
    const Point minus = apply_isometry(iso, Point::from(p.vec() - h * c));
    const Vec4 image_velocity = (plus.vec() - minus.vec()) / (2 * h);
    const TangentVector fd = to_frame_coefficients(apply_isometry(iso, p), image_velocity);
    const TangentVector closed = isometry_differential(iso, v);
    EXPECT_LT((fd.v - closed.v).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(closed.norm_squared(), v.norm_squared(), 1e-12 * v.norm_squared());
  }
}

}  // namespace
