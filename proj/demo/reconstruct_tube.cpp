// Builds the case I_i patch for d = tanh(0.7), moves it by an isometry, and
// recovers an isometry carrying it back onto the tube M1.

#include <cmath>
#include <cstdio>

#include "sol4/reconstruct.hpp"

int main() {
  using namespace sol4;
  const double r = 0.7, d = std::tanh(r);
  const double a0 = std::sqrt(1.0 - d * d);

  const HypersurfacePatch patch = case1i_closed_form(d, a0, 0.0);
  const ShapeData sd = shape_spectrum(patch, {0.2, -0.1, 0.3});
  std::printf("principal curvatures: %.9f %.9f %.9f\n", sd.kappas[0], sd.kappas[1], sd.kappas[2]);
  std::printf("expected (-2d, d, 1/d): %.9f %.9f %.9f\n", -2 * d, d, 1 / d);

  const Isometry moved = Isometry::make({1.0, -2.0, 0.5, 0.3}, 0.8);
  const MatchResult m = canonicalize(transformed(patch, moved));
  std::printf("matched %s, residual %.3g\n", m.family.label().c_str(), m.residual);
  std::printf("isometry: translation (%.6f, %.6f, %.6f, %.6f), theta %.6f\n", m.isometry.trans.x,
              m.isometry.trans.y, m.isometry.trans.z, m.isometry.trans.t, m.isometry.theta);
  return 0;
}
