#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sol4/ambient.hpp"
#include "sol4/catalog.hpp"
#include "sol4/errors.hpp"
#include "sol4/hypersurface.hpp"
#include "sol4/reconstruct.hpp"
#include "sol4/report.hpp"

namespace sol4 {

/// Tolerances, step sizes and grids for a verification run.
struct RunConfig {
  double spectrum_tol = 1e-5;
  double ricci_tol = 1e-5;
  double sectional_tol = 1e-4;
  double minimal_tol = 1e-8;
  double implicit_tol = 1e-8;
  double gauss_tol = 1e-3;
  double codazzi_tol = 1e-3;
  double ode_tol = 1e-8;
  double selfcheck_tol = 1e-12;
  double geodesic_tol = 1e-6;
  double orbit_tol = 1e-6;
  double flat_tol = 1e-6;
  double variance_tol = 1e-20;
  double h1 = 1e-5;
  double h2 = 1e-3;
  int rk4_steps = 10000;
  std::vector<double> r_grid;  ///< empty: each family's default grid
  int samples = 100;
  std::string format = "json";
  std::uint64_t seed = 1;

  FdSteps steps() const { return {h1, h2, std::sqrt(h1 * h2)}; }

  void validate() const {
    for (double v : {spectrum_tol, ricci_tol, sectional_tol, minimal_tol, implicit_tol, gauss_tol,
                     codazzi_tol, ode_tol, selfcheck_tol, geodesic_tol, orbit_tol, flat_tol,
                     variance_tol, h1, h2}) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ContractViolation("config: tolerances and steps must be > 0");
    }
    if (rk4_steps < 1) throw ContractViolation("config: rk4_steps must be >= 1");
    if (samples < 1) throw ContractViolation("config: samples must be >= 1");
    if (format != "json" && format != "csv") throw ContractViolation("config: format must be json or csv");
    for (double r : r_grid) {
      if (!std::isfinite(r)) throw ContractViolation("config: r_grid entries must be finite");
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline double parse_double(const std::string& s, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ContractViolation("config: bad number for " + key + ": " + s);
  return v;
}

inline long long parse_int(const std::string& s, const std::string& key) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ContractViolation("config: bad integer for " + key + ": " + s);
  }
  return v;
}

}  // namespace detail

inline std::vector<double> parse_list(const std::string& s, const std::string& key = "list") {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (!item.empty()) out.push_back(detail::parse_double(item, key));
  }
  return out;
}

inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto num = [&](double& field) { field = detail::parse_double(value, key); };
  if (key == "spectrum_tol") num(cfg.spectrum_tol);
  else if (key == "ricci_tol") num(cfg.ricci_tol);
  else if (key == "sectional_tol") num(cfg.sectional_tol);
  else if (key == "minimal_tol") num(cfg.minimal_tol);
  else if (key == "implicit_tol") num(cfg.implicit_tol);
  else if (key == "gauss_tol") num(cfg.gauss_tol);
  else if (key == "codazzi_tol") num(cfg.codazzi_tol);
  else if (key == "ode_tol") num(cfg.ode_tol);
  else if (key == "selfcheck_tol") num(cfg.selfcheck_tol);
  else if (key == "geodesic_tol") num(cfg.geodesic_tol);
  else if (key == "orbit_tol") num(cfg.orbit_tol);
  else if (key == "flat_tol") num(cfg.flat_tol);
  else if (key == "variance_tol") num(cfg.variance_tol);
  else if (key == "h1") num(cfg.h1);
  else if (key == "h2") num(cfg.h2);
  else if (key == "rk4_steps") cfg.rk4_steps = static_cast<int>(detail::parse_int(value, key));
  else if (key == "samples") cfg.samples = static_cast<int>(detail::parse_int(value, key));
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_int(value, key));
  else if (key == "format") cfg.format = value;
  else if (key == "r_grid") cfg.r_grid = parse_list(value, key);
  else throw ContractViolation("config: unknown key " + key);
}

/// key = value lines; '#' starts a comment.
inline RunConfig parse_config(const std::string& text, RunConfig cfg = {}) {
  std::stringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = detail::trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ContractViolation("config: line " + std::to_string(n) + " is not key = value");
    }
    set_config_value(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path, RunConfig cfg = {}) {
  std::ifstream f(path);
  if (!f) throw ContractViolation("config: cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(cfg));
}

// ---------------------------------------------------------------------------

inline std::vector<double> default_grid(Family f) {
  switch (f) {
    case Family::M1: return {0.25, 0.5, 1.0, 2.0};
    case Family::M2: return {0.0, 0.5, 1.0, 2.0};
    case Family::M3: return {0.0, 0.25, 0.5, 1.0};
    case Family::M4: return {0.0};
  }
  return {};
}

inline std::vector<double> grid_for(Family f, const RunConfig& cfg) {
  return cfg.r_grid.empty() ? default_grid(f) : cfg.r_grid;
}

namespace detail {

inline std::string prefix(const FamilyId& f) { return to_string(f.tag) + ".r" + format_number(f.r) + "."; }

inline const std::vector<Vec3>& family_sample_params() {
  static const std::vector<Vec3> q = {{0.0, 0.0, 0.0}, {0.7, -0.4, 0.3}, {-0.5, 0.9, -0.6}};
  return q;
}

/// Worst entry of a spectrum over sample points, as a target check per index.
inline void spectrum_checks(VerificationReport& rep, const std::string& id, const std::vector<Vec3>& values,
                            const Vec3& expected, double tol, const std::string& anchor) {
  for (int k = 0; k < 3; ++k) {
    double worst = values.front()[k];
    for (const Vec3& v : values) {
      if (std::abs(v[k] - expected[k]) > std::abs(worst - expected[k])) worst = v[k];
    }
    rep.target(id + "." + std::to_string(k), worst, expected[k], tol, anchor);
  }
}

}  // namespace detail

/**
 * Spectrum, Ricci, sectional, implicit, minimality, angle-function and
 * Gauss/Codazzi checks for one member of a family. M4 is reported at its
 * normal form r = 0.
 */
inline VerificationReport family_report(const FamilyId& input, const RunConfig& cfg) {
  FamilyId f = FamilyId::make(input.tag, input.r);
  VerificationReport rep;
  if (f.tag == Family::M4 && f.r != 0.0) {
    const MatchResult m = canonicalize(family_patch(f));
    rep.target("m4.canonical_translation_t", m.isometry.trans.t, -f.r, 1e-12, "M4 level sets are translates of t = 0");
    f.r = 0.0;
  }
  rep.suite = "family " + f.label();
  const std::string pre = detail::prefix(f);
  const HypersurfacePatch patch = family_patch(f);
  const ExpectedInvariants e = expected_invariants(f);
  ShapeOptions opt;
  opt.steps = cfg.steps();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double implicit = 0.0;
  for (int k = 0; k < 20; ++k) {
    implicit = std::max(implicit, std::abs(patch.implicit(patch.immersion({u(rng), u(rng), u(rng)}))));
  }
  rep.bound(pre + "implicit_residual", implicit, cfg.implicit_tol, "immersion satisfies the implicit equation");

  std::vector<Vec3> kappas, riccis;
  double h_worst = NAN, asym = 0.0, angle_c = NAN, angle_d = NAN;
  for (const Vec3& q : detail::family_sample_params()) {
    const ShapeData sd = shape_spectrum(patch, q, opt);
    if (std::isnan(h_worst)) {
      h_worst = sd.H;
      angle_c = sd.normal[2];
      angle_d = sd.normal[3];
    }
    kappas.push_back(sd.kappas);
    riccis.push_back(detail::ricci_spectrum(ricci_form(sd), sd.G, sd.tangents).eigenvalues);
    if (std::abs(sd.H - e.kappas.sum()) > std::abs(h_worst - e.kappas.sum())) h_worst = sd.H;
    asym = std::max(asym, sd.asymmetry);
    if (std::abs(sd.normal[2] - e.c) > std::abs(angle_c - e.c)) angle_c = sd.normal[2];
    if (std::abs(sd.normal[3] - e.d) > std::abs(angle_d - e.d)) angle_d = sd.normal[3];
  }
  detail::spectrum_checks(rep, pre + "kappa", kappas, e.kappas, cfg.spectrum_tol, "principal curvatures of " + f.label());
  if (e.ricci) detail::spectrum_checks(rep, pre + "ricci", riccis, *e.ricci, cfg.ricci_tol, "Ricci eigenvalues of " + f.label());
  if (e.minimal) {
    rep.bound(pre + "mean_curvature_abs", std::abs(h_worst), cfg.minimal_tol, "minimal hypersurface");
  } else {
    rep.target(pre + "mean_curvature", h_worst, e.kappas.sum(), cfg.spectrum_tol, "mean curvature coth r - tanh r");
  }
  rep.bound(pre + "shape_asymmetry", asym, 1e-6, "second fundamental form is symmetric");
  rep.target(pre + "angle_c", angle_c, e.c, 1e-10, "angle function c is constant");
  rep.target(pre + "angle_d", angle_d, e.d, 1e-10, "angle function d is constant");

  // sectional curvatures from the intrinsic (finite-difference) curvature of the induced metric
  const Vec3 qs(0.3, -0.2, 0.1);
  const Riemann3 intrinsic = intrinsic_riemann(patch, qs, opt.steps);
  const Mat3 g = detail::metric_at(patch, qs, opt.steps);
  for (const PlaneCurvature& k : e.sectionals) {
    rep.target(pre + "sectional." + k.plane, sectional_from_riemann(intrinsic, g, Vec3::Unit(k.a), Vec3::Unit(k.b)),
               k.value, cfg.sectional_tol, "sectional curvature of the induced metric");
  }

  double gauss = 0.0, codazzi = 0.0;
  for (const Vec3& q : {Vec3(0.2, 0.1, -0.3), Vec3(-0.6, 0.4, 0.5)}) {
    const FundamentalResiduals r = fundamental_residuals(patch, q, opt);
    gauss = std::max(gauss, r.gauss);
    codazzi = std::max(codazzi, r.codazzi);
  }
  rep.bound(pre + "gauss_residual", gauss, cfg.gauss_tol, "Gauss equation");
  rep.bound(pre + "codazzi_residual", codazzi, cfg.codazzi_tol, "Codazzi equation");
  rep.sort();
  return rep;
}

// ---------------------------------------------------------------------------
// Acceptance criteria

inline VerificationReport criterion_ambient(const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = "ambient identities";
  for (SelfCheck k : kAllSelfChecks) {
    rep.bound("ambient.selfcheck." + std::string(to_string(k)), ambient_selfcheck(k), cfg.selfcheck_tol,
              "left-invariant frame identities");
  }
  double diff = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        const FrameVector f = curvature_formula(FrameVector::Unit(i), FrameVector::Unit(j), FrameVector::Unit(k));
        diff = std::max(diff, (f - curvature_from_brackets(i, j, k)).cwiseAbs().maxCoeff());
      }
  rep.bound("ambient.curvature_formula_vs_brackets", diff, cfg.selfcheck_tol,
            "closed-form curvature equals the connection/bracket curvature on 64 frame triples");
  rep.sort();
  return rep;
}

inline VerificationReport family_criterion(Family tag, const std::string& title, const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = title;
  for (double r : grid_for(tag, cfg)) rep.merge(family_report({tag, r}, cfg));
  return rep;
}

inline VerificationReport criterion_m1(const RunConfig& cfg) {
  VerificationReport rep = family_criterion(Family::M1, "tubes M1", cfg);
  rep.sort();
  return rep;
}

inline VerificationReport criterion_m2(const RunConfig& cfg) {
  VerificationReport rep = family_criterion(Family::M2, "M2 family", cfg);
  ShapeOptions opt;
  opt.steps = cfg.steps();
  double worst = 0.0;
  for (const Vec3& q : detail::family_sample_params()) {
    worst = std::max(worst, shape_spectrum(family_patch({Family::M2, 0.0}), q, opt).kappas.cwiseAbs().maxCoeff());
  }
  rep.bound("m2.r0.totally_geodesic_max_kappa", worst, cfg.minimal_tol, "M2 at r = 0 is totally geodesic");
  rep.sort();
  return rep;
}

inline VerificationReport criterion_m3(const RunConfig& cfg) {
  VerificationReport rep = family_criterion(Family::M3, "M3 family", cfg);
  const FdSteps steps = cfg.steps();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> g;
  for (double r : grid_for(Family::M3, cfg)) {
    const FamilyId f = FamilyId::make(Family::M3, r);
    const HypersurfacePatch patch = family_patch(f);
    const Vec3 q(0.2, -0.1, 0.3);
    const Riemann3 R = intrinsic_riemann(patch, q, steps);
    const Mat3 G = detail::metric_at(patch, q, steps);
    double lo = INFINITY, hi = -INFINITY;
    const int planes = std::max(20, cfg.samples / 5);
    for (int k = 0; k < planes; ++k) {
      const Vec3 x(g(rng), g(rng), g(rng)), y(g(rng), g(rng), g(rng));
      const double K = sectional_from_riemann(R, G, x, y);
      lo = std::min(lo, K);
      hi = std::max(hi, K);
    }
    const double expected = -std::pow(1.0 / std::cosh(2.0 * r), 2);
    const std::string pre = detail::prefix(f);
    rep.bound(pre + "random_plane_spread", hi - lo, cfg.sectional_tol, "constant sectional curvature");
    rep.target(pre + "random_plane_min", lo, expected, cfg.sectional_tol, "constant sectional curvature -sech^2(2r)");
    rep.target(pre + "random_plane_max", hi, expected, cfg.sectional_tol, "constant sectional curvature -sech^2(2r)");
  }
  rep.sort();
  return rep;
}

inline VerificationReport criterion_m4(const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = "flat slice M4";
  const FamilyId f{Family::M4, 0.0};
  const HypersurfacePatch patch = family_patch(f);
  const FdSteps steps = cfg.steps();
  double flat = 0.0;
  for (const Vec3& q : {Vec3(0.0, 0.0, 0.0), Vec3(0.5, -0.3, 0.8)}) {
    const Riemann3 R = intrinsic_riemann(patch, q, steps);
    for (const auto& a : R)
      for (const auto& b : a)
        for (const auto& c : b)
          for (double v : c) flat = std::max(flat, std::abs(v));
  }
  rep.bound("m4.r0.intrinsic_curvature_max", flat, cfg.flat_tol, "M4 is flat");
  ShapeOptions opt;
  opt.steps = steps;
  const ShapeData sd = shape_spectrum(patch, {0.3, 0.1, -0.2}, opt);
  rep.bound("m4.r0.mean_curvature_abs", std::abs(sd.H), cfg.minimal_tol, "M4 is minimal");
  // With N = +E4 the spectrum is {1, 1, -2}; the opposite normal gives {-1, -1, 2}.
  rep.target("m4.r0.normal_d", sd.normal[3], 1.0, 1e-12, "spectrum recorded for the normal +E4");
  rep.target("m4.r0.kappa.0", sd.kappas[0], -2.0, cfg.spectrum_tol, "shape operator for N = E4: -2 on E3");
  rep.target("m4.r0.kappa.1", sd.kappas[1], 1.0, cfg.spectrum_tol, "shape operator for N = E4: 1 on E1");
  rep.target("m4.r0.kappa.2", sd.kappas[2], 1.0, cfg.spectrum_tol, "shape operator for N = E4: 1 on E2");
  rep.sort();
  return rep;
}

/// t = sum of small random trigonometric terms over (x, y, z).
inline HypersurfacePatch random_graph_patch(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-0.15, 0.15), freq(-1.5, 1.5), phase(0.0, 2.0 * std::numbers::pi);
  struct Term {
    double a;
    Vec3 k;
    double phi;
  };
  std::vector<Term> terms;
  for (int i = 0; i < 3; ++i) terms.push_back({amp(rng), {freq(rng), freq(rng), freq(rng)}, phase(rng)});
  auto height = [terms](double x, double y, double z) {
    double t = 0.0;
    for (const Term& s : terms) t += s.a * std::sin(s.k[0] * x + s.k[1] * y + s.k[2] * z + s.phi);
    return t;
  };
  HypersurfacePatch p;
  p.immersion = [height](const Vec3& q) { return Point{q[0], q[1], q[2], height(q[0], q[1], q[2])}; };
  p.implicit = [height](const Point& q) { return q.t - height(q.x, q.y, q.z); };
  p.domain = {Vec3::Constant(-1.0), Vec3::Constant(1.0)};
  return p;
}

inline VerificationReport criterion_gauss_codazzi(const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = "Gauss and Codazzi equations";
  ShapeOptions opt;
  opt.steps = cfg.steps();
  const std::vector<Vec3> pts = {Vec3(0.2, 0.1, -0.3), Vec3(-0.6, 0.4, 0.5)};
  for (Family tag : {Family::M1, Family::M2, Family::M3, Family::M4}) {
    double gauss = 0.0, codazzi = 0.0;
    for (double r : grid_for(tag, cfg)) {
      for (const Vec3& q : pts) {
        const FundamentalResiduals res = fundamental_residuals(family_patch({tag, r}), q, opt);
        gauss = std::max(gauss, res.gauss);
        codazzi = std::max(codazzi, res.codazzi);
      }
    }
    rep.bound("catalog." + to_string(tag) + ".gauss_residual", gauss, cfg.gauss_tol, "Gauss equation");
    rep.bound("catalog." + to_string(tag) + ".codazzi_residual", codazzi, cfg.codazzi_tol, "Codazzi equation");
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 5; ++k) {
    const HypersurfacePatch p = random_graph_patch(rng);
    double gauss = 0.0, codazzi = 0.0;
    for (int j = 0; j < 2; ++j) {
      const FundamentalResiduals res = fundamental_residuals(p, {u(rng), u(rng), u(rng)}, opt);
      gauss = std::max(gauss, res.gauss);
      codazzi = std::max(codazzi, res.codazzi);
    }
    const std::string id = "graph." + std::to_string(k);
    rep.bound(id + ".gauss_residual", gauss, cfg.gauss_tol, "Gauss equation on a random graph");
    rep.bound(id + ".codazzi_residual", codazzi, cfg.codazzi_tol, "Codazzi equation on a random graph");
  }
  rep.sort();
  return rep;
}

inline std::vector<FamilyId> homogeneity_members() {
  return {{Family::M1, 1.0}, {Family::M2, 0.5}, {Family::M3, 0.5}, {Family::M4, 0.0}};
}

inline VerificationReport orbit_report(const FamilyId& f, const RunConfig& cfg) {
  HomogeneityTolerances tol;
  tol.implicit = cfg.implicit_tol;
  tol.spectrum = cfg.orbit_tol;
  ShapeOptions opt;
  opt.steps = cfg.steps();
  VerificationReport rep = homogeneity_report(f, cfg.samples, cfg.seed, tol, opt);
  rep.sort();
  return rep;
}

inline VerificationReport criterion_homogeneity(const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = "homogeneity";
  for (const FamilyId& f : homogeneity_members()) rep.merge(orbit_report(f, cfg));
  rep.sort();
  return rep;
}

inline VerificationReport tube_report(double r, const RunConfig& cfg, int n = 10) {
  VerificationReport rep;
  rep.suite = "tube";
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, 2.0 * std::numbers::pi);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z0 = u(rng), t0 = u(rng), alpha = ang(rng);
    worst = std::max(worst, std::abs(tube_residual(r, z0, t0, alpha, cfg.rk4_steps)));
  }
  rep.bound("tube.r" + format_number(r) + ".residual", worst, cfg.geodesic_tol,
            "normal geodesics of length r from the focal plane end on M1");
  return rep;
}

inline VerificationReport criterion_tube(const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = "tubes over the focal plane";
  for (double r : {0.5, 1.0}) rep.merge(tube_report(r, cfg));
  rep.sort();
  return rep;
}

inline VerificationReport parallel_report(Family f, double r, const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = "parallel";
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    worst = std::max(worst, std::abs(parallel_residual(f, r, {u(rng), u(rng), u(rng)}, cfg.rk4_steps)));
  }
  rep.bound("parallel." + to_string(f) + ".r" + format_number(r) + ".residual", worst, cfg.geodesic_tol,
            "normal geodesics from the r = 0 member end on the parallel member");
  return rep;
}

inline VerificationReport criterion_parallel(const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = "parallel families";
  for (Family f : {Family::M2, Family::M3})
    for (double r : {0.25, 0.5, 1.0}) rep.merge(parallel_report(f, r, cfg));

  // Ricci spectra separate members of M2 that are at least 0.25 apart.
  const std::vector<double> rs = {0.0, 0.25, 0.5, 1.0, 2.0};
  std::vector<Vec3> spectra;
  ShapeOptions opt;
  opt.steps = cfg.steps();
  for (double r : rs) spectra.push_back(induced_ricci(family_patch({Family::M2, r}), Vec3::Zero(), opt).eigenvalues);
  double separation = INFINITY;
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      if (std::abs(rs[i] - rs[j]) >= 0.25) {
        separation = std::min(separation, (spectra[i] - spectra[j]).cwiseAbs().maxCoeff());
      }
    }
  rep.at_least("parallel.m2.ricci_min_separation", separation, 1e-6, "members of M2 are pairwise non-congruent");
  rep.sort();
  return rep;
}

// ---------------------------------------------------------------------------
// Reconstruction round trips

struct CaseInput {
  CaseTag tag = CaseTag::III;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

/// Builds the patch for a case and its input data.
inline HypersurfacePatch case_patch(const CaseInput& in) {
  switch (in.tag) {
    case CaseTag::I_i: return case1i_closed_form(in.d, in.a, -in.b);  // (a, b) at u = 0
    case CaseTag::I_ii: return case1ii_patch(in.a, in.b, in.d).original;
    case CaseTag::I_iii: return case1iii_patch(in.a, in.d);
    case CaseTag::II: return case2_patch(in.c, in.d);
    case CaseTag::III: return case3_patch(in.d);
  }
  throw ContractViolation("case_patch: unknown case");
}

/// Expected family for a case input.
inline FamilyId case_family(const CaseInput& in) {
  switch (in.tag) {
    case CaseTag::I_i: return {Family::M1, std::atanh(in.d)};
    case CaseTag::I_ii:
    case CaseTag::I_iii: return {Family::M2, std::atanh(in.d)};
    case CaseTag::II: return {Family::M3, 0.5 * std::atanh(in.d)};
    case CaseTag::III: return {Family::M4, 0.0};
  }
  return {};
}

inline VerificationReport reconstruct_report(const CaseInput& in, const RunConfig& cfg,
                                             double r_tol = 1e-8) {
  VerificationReport rep;
  rep.suite = "reconstruct " + to_string(in.tag);
  const std::string pre = "reconstruct." + to_string(in.tag) + ".";
  const FamilyId expected = case_family(in);
  CanonicalizeOptions opt;
  opt.match_tol = cfg.implicit_tol;
  opt.steps = cfg.steps();
  try {
    const MatchResult m = canonicalize(case_patch(in), opt);
    rep.flag(pre + "family_is_" + to_string(expected.tag), m.family.tag == expected.tag, "case matches its family");
    rep.flag(pre + "detected_case", m.detected == in.tag, "canonicalize detects the case");
    rep.target(pre + "r", m.family.r, expected.r, r_tol, "family parameter from d");
    rep.bound(pre + "implicit_residual", m.residual, cfg.implicit_tol, "round trip lands on the family");
  } catch (const std::runtime_error& err) {
    rep.flag(pre + "matched", false, err.what());
  }
  rep.sort();
  return rep;
}

inline std::vector<CaseInput> acceptance_cases() {
  const double t1 = std::tanh(1.0), s1 = 1.0 / std::cosh(1.0);
  return {{CaseTag::I_i, s1, 0.0, 0.0, t1},
          {CaseTag::I_ii, 0.48, 0.64, 0.0, 0.6},
          {CaseTag::I_iii, -0.8, 0.0, 0.0, 0.6},
          {CaseTag::II, 0.0, 0.0, s1, t1},
          {CaseTag::III, 0.0, 0.0, 0.0, 0.0}};
}

inline VerificationReport criterion_reconstruct(const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = "reconstruction round trips";
  for (const CaseInput& in : acceptance_cases()) rep.merge(reconstruct_report(in, cfg));
  rep.sort();
  return rep;
}

inline VerificationReport criterion_ode(const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = "structure equations";
  const double d = std::tanh(1.0), c1 = 1.0 / std::cosh(1.0), s = std::sinh(1.0);
  const double length = 2.0 * std::numbers::pi * s;
  const auto rows = integrate_case1i(d, c1, 0.0, length, static_cast<int>(std::ceil(length / 1e-3)));
  double err = 0.0, drift = 0.0;
  for (const Case1iRow& row : rows) {
    err = std::max({err, std::abs(row.a - c1 * std::cos(row.u / s)), std::abs(row.b - c1 * std::sin(row.u / s))});
    drift = std::max(drift, std::abs(row.a * row.a + row.b * row.b - (1.0 - d * d)));
  }
  rep.bound("ode.case1i.closed_form_error", err, cfg.ode_tol, "rotating (a, b) against its closed form");
  rep.bound("ode.case1i.norm_drift", drift, 1e-10, "a^2 + b^2 = 1 - d^2 is conserved");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> t1(-5.0, 5.0);
  double variance = 0.0, ratio_lo = INFINITY, ratio_hi = -INFINITY;
  std::vector<double> xs, ys;
  for (int k = 0; k < cfg.samples; ++k) {
    Vec4 n;
    do {
      n = Vec4(g(rng), g(rng), std::abs(g(rng)), g(rng));
      n.normalize();
    } while (std::abs(n[0]) < 0.05 || n[2] < 0.05);
    std::vector<double> vals;
    for (int j = 0; j < 10; ++j) vals.push_back(lemma48_residual(n[0], n[1], n[2], n[3], t1(rng)));
    double mean = 0.0, var = 0.0;
    for (double v : vals) mean += v / vals.size();
    for (double v : vals) var += (v - mean) * (v - mean) / (vals.size() - 1);
    variance = std::max(variance, var);
    const double ac = n[0] * n[2];
    ratio_lo = std::min(ratio_lo, mean / ac);
    ratio_hi = std::max(ratio_hi, mean / ac);
    xs.push_back(ac);
    ys.push_back(mean);
  }
  rep.bound("ode.symmetry.t1_variance_max", variance, cfg.variance_tol, "symmetry residual does not depend on T1(b)");
  rep.bound("ode.symmetry.ratio_spread", ratio_hi - ratio_lo, 1e-10, "symmetry residual is proportional to ac");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / xs.size();
    my += ys[i] / ys.size();
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  rep.bound("ode.symmetry.fit_intercept_abs", std::abs(my - slope * mx), 1e-10, "residual vanishes with ac");
  rep.at_least("ode.symmetry.fit_slope_abs", std::abs(slope), 1e-6, "residual is a nonzero multiple of ac");
  rep.sort();
  return rep;
}

struct Criterion {
  int number;
  std::string title;
  std::function<VerificationReport(const RunConfig&)> run;
};

inline std::vector<Criterion> acceptance_criteria() {
  return {
      {1, "ambient identities", criterion_ambient},
      {2, "M1 spectra, Ricci and sectional curvatures", criterion_m1},
      {3, "M2 minimality, spectra, Ricci and sectional curvatures", criterion_m2},
      {4, "M3 minimality, spectra and constant sectional curvature", criterion_m3},
      {5, "M4 flat, minimal, spectrum {1, 1, -2} for N = E4", criterion_m4},
      {6, "Gauss and Codazzi residuals", criterion_gauss_codazzi},
      {7, "homogeneity along subgroup orbits", criterion_homogeneity},
      {8, "tubes over the focal plane", criterion_tube},
      {9, "parallel families and non-congruence", criterion_parallel},
      {10, "reconstruction round trips", criterion_reconstruct},
      {11, "structure equations and the case II symmetry residual", criterion_ode},
  };
}

inline VerificationReport run_all(const RunConfig& cfg) {
  VerificationReport rep;
  rep.suite = "all";
  for (const Criterion& c : acceptance_criteria()) rep.merge(c.run(cfg));
  rep.sort();
  return rep;
}

}  // namespace sol4
