#pragma once

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sol4/suites.hpp"

namespace sol4::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

inline void emit(const VerificationReport& rep, const RunConfig& cfg, std::ostream& out) {
  if (cfg.format == "csv") {
    out << to_csv(rep);
  } else {
    out << to_json(rep).dump(2) << '\n';
  }
}

namespace detail {

inline Vec4 parse_vec4(const std::string& s, const char* what) {
  const std::vector<double> v = parse_list(s, what);
  if (v.size() != 4) throw ContractViolation(std::string(what) + ": expected four comma-separated numbers");
  return {v[0], v[1], v[2], v[3]};
}

inline Family require_family(const std::string& name) {
  const auto f = parse_family(name);
  if (!f) throw ContractViolation("unknown family " + name + " (expected m1, m2, m3 or m4)");
  return *f;
}

/// Inputs typed with a few digits are pushed onto the unit sphere; the defect is reported.
inline double normalize(std::vector<double*> xs) {
  double n2 = 0.0;
  for (double* x : xs) n2 += *x * *x;
  const double defect = std::abs(std::sqrt(n2) - 1.0);
  if (defect > 1e-5) throw ContractViolation("reconstruct: angle functions must have unit norm");
  for (double* x : xs) *x /= std::sqrt(n2);
  return defect;
}

inline VerificationReport curvature_report(const Point& p, const Vec4& x, const Vec4& y,
                                           const std::optional<Vec4>& z, const RunConfig& cfg) {
  check_range(p, "curvature");
  VerificationReport rep;
  rep.suite = "curvature";
  const TangentVector tx{p, x}, ty{p, y};
  const double k = sectional(tx, ty);
  const double denom = x.squaredNorm() * y.squaredNorm() - std::pow(x.dot(y), 2);
  const double k_formula = curvature_formula(x, y, y).dot(x) / denom;
  rep.target("curvature.sectional", k, k_formula, cfg.selfcheck_tol * (1.0 + std::abs(k_formula)),
             "K(X, Y) from the tabulated curvature against the closed form");
  const Vec4 w = z ? *z : y;
  const FrameVector r = curvature(FrameVector(x), FrameVector(y), FrameVector(w));
  const FrameVector f = curvature_formula(x, y, w);
  for (int i = 0; i < 4; ++i) {
    rep.target("curvature.R_xy" + std::string(z ? "z" : "y") + "." + std::to_string(i + 1), r[i], f[i],
               cfg.selfcheck_tol * (1.0 + f.cwiseAbs().maxCoeff()), "tabulated curvature against the closed form");
  }
  rep.sort();
  return rep;
}

}  // namespace detail

/// Entry point. Returns 0 when every check passes, 1 when a check fails, 2 on usage errors.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Verification harness for hypersurfaces of the solvable group Sol_0^4", "sol4"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::string config_path;
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--samples", samples, "Sample count for randomized checks")->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "Config file (key = value lines); overrides SOL4_CONFIG");

  auto* ambient = app.add_subcommand("verify-ambient", "Frame, connection and curvature identities");

  std::string family_name;
  std::optional<double> r_value;
  auto* family = app.add_subcommand("verify-family", "Spectra and curvature of one family over the r-grid");
  family->add_option("--family", family_name, "m1, m2, m3 or m4")->required();
  family->add_option("--r", r_value, "Single parameter instead of the grid");

  std::string case_name;
  double ca = 0.0, cb = 0.0, cc = 0.0, cd = 0.0;
  auto* recon = app.add_subcommand("reconstruct", "Build a case and match it onto the catalog");
  recon->add_option("--case", case_name, "I_i, I_ii, I_iii, II or III")->required();
  recon->add_option("--a", ca, "Angle function a (I_i: value at u = 0)");
  recon->add_option("--b", cb, "Angle function b (I_i: value at u = 0)");
  recon->add_option("--c", cc, "Angle function c");
  recon->add_option("--d", cd, "Angle function d (III: level t)");

  std::optional<double> tube_r, z0, t0, alpha;
  auto* tube = app.add_subcommand("tube", "Normal geodesics from the focal plane");
  tube->add_option("--r", tube_r, "Radius (default 0.5 and 1)");
  tube->add_option("--z0", z0, "Start z");
  tube->add_option("--t0", t0, "Start t");
  tube->add_option("--alpha", alpha, "Direction angle in the E1, E2 plane");

  std::string par_family;
  std::optional<double> par_r;
  auto* parallel = app.add_subcommand("parallel", "Normal geodesics between parallel members");
  parallel->add_option("--family", par_family, "m2 or m3 (default both)");
  parallel->add_option("--r", par_r, "Distance r >= 0 (default 0.25, 0.5, 1)");

  std::string orbit_family;
  std::optional<double> orbit_r;
  auto* orbit = app.add_subcommand("orbit", "Homogeneity along subgroup orbits");
  orbit->add_option("--family", orbit_family, "m1, m2, m3 or m4 (default all)");
  orbit->add_option("--r", orbit_r, "Family parameter");

  std::string point_s = "0,0,0,0", x_s = "1,0,0,0", y_s = "0,1,0,0", z_s;
  auto* curv = app.add_subcommand("curvature", "Sectional curvature and R(X, Y)Z at a point");
  curv->add_option("--point", point_s, "x,y,z,t");
  curv->add_option("--x", x_s, "Frame coefficients of X");
  curv->add_option("--y", y_s, "Frame coefficients of Y");
  curv->add_option("--z", z_s, "Frame coefficients of Z (default Y)");

  auto* all = app.add_subcommand("all", "Every acceptance criterion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  RunConfig cfg;
  VerificationReport rep;
  try {
    if (const char* env = std::getenv("SOL4_CONFIG"); env && *env && config_path.empty()) {
      cfg = load_config(env);
    }
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!format.empty()) cfg.format = format;
    if (seed) cfg.seed = *seed;
    if (samples) cfg.samples = *samples;
    cfg.validate();

    if (ambient->parsed()) {
      rep = criterion_ambient(cfg);
    } else if (family->parsed()) {
      const Family tag = detail::require_family(family_name);
      const std::vector<double> grid = r_value ? std::vector<double>{*r_value} : grid_for(tag, cfg);
      rep.suite = "verify-family " + to_string(tag);
      for (double r : grid) rep.merge(family_report({tag, r}, cfg));
    } else if (recon->parsed()) {
      const auto tag = parse_case(case_name);
      if (!tag) throw ContractViolation("unknown case " + case_name);
      CaseInput in{*tag, ca, cb, cc, cd};
      double defect = 0.0;
      switch (*tag) {
        case CaseTag::I_i:
        case CaseTag::I_ii: defect = detail::normalize({&in.a, &in.b, &in.d}); break;
        case CaseTag::I_iii: defect = detail::normalize({&in.a, &in.d}); break;
        case CaseTag::II: defect = detail::normalize({&in.c, &in.d}); break;
        case CaseTag::III: break;
      }
      // r inherits the rounding of the typed inputs
      rep = reconstruct_report(in, cfg, defect > 1e-12 ? 1e-5 : 1e-8);
      rep.bound("reconstruct." + to_string(*tag) + ".input_unit_defect", defect, 1e-5,
                "typed angle functions have unit norm");
    } else if (tube->parsed()) {
      rep.suite = "tube";
      const std::vector<double> radii = tube_r ? std::vector<double>{*tube_r} : std::vector<double>{0.5, 1.0};
      for (double r : radii) {
        if (z0 || t0 || alpha) {
          const double res = tube_residual(r, z0.value_or(0.0), t0.value_or(0.0), alpha.value_or(0.0), cfg.rk4_steps);
          rep.bound("tube.r" + format_number(r) + ".residual", std::abs(res), cfg.geodesic_tol,
                    "normal geodesic of length r from the focal plane ends on M1");
        } else {
          rep.merge(tube_report(r, cfg));
        }
      }
    } else if (parallel->parsed()) {
      rep.suite = "parallel";
      std::vector<Family> fams = {Family::M2, Family::M3};
      if (!par_family.empty()) fams = {detail::require_family(par_family)};
      const std::vector<double> rs = par_r ? std::vector<double>{*par_r} : std::vector<double>{0.25, 0.5, 1.0};
      for (Family f : fams)
        for (double r : rs) rep.merge(parallel_report(f, r, cfg));
    } else if (orbit->parsed()) {
      rep.suite = "orbit";
      std::vector<FamilyId> members = homogeneity_members();
      if (!orbit_family.empty()) {
        const Family tag = detail::require_family(orbit_family);
        double r = 0.0;
        for (const FamilyId& m : members) {
          if (m.tag == tag) r = m.r;
        }
        members = {{tag, orbit_r.value_or(r)}};
      }
      for (const FamilyId& f : members) rep.merge(orbit_report(f, cfg));
    } else if (curv->parsed()) {
      const std::optional<Vec4> z = z_s.empty() ? std::nullopt : std::optional<Vec4>(detail::parse_vec4(z_s, "--z"));
      rep = detail::curvature_report(Point::from(detail::parse_vec4(point_s, "--point")),
                                     detail::parse_vec4(x_s, "--x"), detail::parse_vec4(y_s, "--y"), z, cfg);
    } else if (all->parsed()) {
      rep = run_all(cfg);
    }
  } catch (const std::logic_error& e) {  // ContractViolation, DomainError: bad input
    err << "sol4: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "sol4: " << e.what() << '\n';
    return kExitFail;
  }

  rep.sort();
  emit(rep, cfg, out);
  return rep.pass() ? kExitPass : kExitFail;
}

}  // namespace sol4::cli
