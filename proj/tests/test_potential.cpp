#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "spikes/constants.hpp"
#include "spikes/errors.hpp"
#include "spikes/potential.hpp"
#include "spikes/profile.hpp"

using namespace spikes;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

const Profile& p23() {
  static Profile pr = solve_profile(2, make_nonlinearity(3.0), 1e-8);
  return pr;
}

SaddlePotential std_saddle() { return make_saddle(vec2(1.0, -1.0)); }

}  // namespace

TEST_CASE("make_saddle validation") {
  CHECK_THROWS_AS((void)make_saddle(vec2(1.0, 2.0)), Error);   // no negative direction
  CHECK_THROWS_AS((void)make_saddle(vec2(-1.0, -2.0)), Error); // no positive direction
  CHECK_THROWS_AS((void)make_saddle(vec2(1.0, 0.0)), Error);   // degenerate
  CHECK_THROWS_AS((void)make_saddle(vec2(-1.0, 1.0)), Error);  // not sorted
  CHECK_THROWS_AS((void)make_saddle(Eigen::VectorXd::Constant(1, 1.0)), Error);
  // V = 1 - x2^2 vanishes inside the default box
  CHECK_THROWS_AS((void)make_saddle(vec2(1.0, -2.0)), Error);
  const SaddlePotential pot = std_saddle();
  CHECK(pot.dim() == 2);
  CHECK(pot.signature() == 1);
  CHECK(pot.box() == doctest::Approx(1.39));
  Eigen::VectorXd lam3(3);
  lam3 << 2.0, 1.0, -1.0;
  CHECK(make_saddle(lam3).signature() == 2);
}

TEST_CASE("potential values and derivatives") {
  const SaddlePotential pot = make_saddle(vec2(1.0, -1.0), 0.2);
  const Eigen::VectorXd x = vec2(0.3, -0.5);
  CHECK(pot.V(x) == doctest::Approx(1.0 + 0.5 * (0.09 - 0.25) + 0.2 * 0.027).epsilon(1e-14));
  const Eigen::VectorXd g = pot.gradV(x);
  CHECK(g[0] == doctest::Approx(0.3 + 0.6 * 0.09).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-14));
  // derivative consistency
  const double d = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += d;
    xm[i] -= d;
    CHECK(g[i] == doctest::Approx((pot.V(xp) - pot.V(xm)) / (2 * d)).epsilon(1e-7));
  }
  const Eigen::MatrixXd H = pot.hessV(x);
  CHECK(H(0, 0) == doctest::Approx(1.0 + 1.2 * 0.3));
  CHECK(H(1, 1) == doctest::Approx(-1.0));
  CHECK(H(0, 1) == 0.0);
  CHECK_THROWS_AS((void)pot.V(Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("quadratic forms split by eigenvalue sign") {
  const SaddlePotential pot = std_saddle();
  const Eigen::VectorXd P = vec2(0.4, 0.3), Q = vec2(-0.2, 0.5);
  CHECK(quad(pot, Form::M, P) == doctest::Approx(0.16 - 0.09).epsilon(1e-14));
  CHECK(quad(pot, Form::Mplus, P) == doctest::Approx(0.16).epsilon(1e-14));
  CHECK(quad(pot, Form::Mminus, P) == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(quad(pot, Form::Mbar, P) == doctest::Approx(0.25).epsilon(1e-14));
  // split identities and bilinear symmetry
  CHECK(quad(pot, Form::M, P) ==
        doctest::Approx(quad(pot, Form::Mplus, P) - quad(pot, Form::Mminus, P)));
  CHECK(quad(pot, Form::Mbar, P) ==
        doctest::Approx(quad(pot, Form::Mplus, P) + quad(pot, Form::Mminus, P)));
  CHECK(quad(pot, Form::M, P, Q) == doctest::Approx(quad(pot, Form::M, Q, P)));
  CHECK(quad(pot, Form::M, P, Q) == doctest::Approx(-0.08 - 0.15).epsilon(1e-14));
}

TEST_CASE("window membership") {
  const SaddlePotential pot = std_saddle();
  SpikeConfig cfg;
  cfg.epsilon = 0.05;
  cfg.beta = 0.5;  // level eps^{2 beta} = 0.05
  cfg.taus = {1, -1};
  cfg.points = {vec2(-0.125, 0.0), vec2(0.125, 0.0)};
  CHECK(in_gamma(cfg, p23(), pot));  // Mbar = 0.0156, w(5) = 0.032, both below

  SpikeConfig far = cfg;  // position term breaks first
  far.points = {vec2(-0.3, 0.0), vec2(0.3, 0.0)};
  CHECK_FALSE(in_gamma(far, p23(), pot));

  SpikeConfig tight = cfg;  // interaction term breaks first, w(2) = 0.77
  tight.points = {vec2(-0.05, 0.0), vec2(0.05, 0.0)};
  CHECK_FALSE(in_gamma(tight, p23(), pot));

  // a pair 0.06 apart at eps = 0.05 sits w(1.2) = O(1) above any level
  SpikeConfig doc = cfg;
  doc.beta = 0.9;
  doc.points = {vec2(-0.03, 0.0), vec2(0.03, 0.0)};
  CHECK_FALSE(in_gamma(doc, p23(), pot));
}

TEST_CASE("configuration functional and the smallness region") {
  const SaddlePotential pot = std_saddle();
  const ReducedConstants rc = compute_constants(p23());
  SpikeConfig cfg;
  cfg.epsilon = 0.05;
  cfg.beta = 0.5;
  cfg.taus = {1, -1, 1};
  cfg.points = {vec2(-0.2, 0.05), vec2(0.0, -0.1), vec2(0.25, 0.0)};
  // assemble the same sum by hand
  double want = 0.0;
  for (int i = 0; i < 3; ++i) want += rc.c2 * quad(pot, Form::Mbar, cfg.points[i]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (j != i)
        want += rc.c3 * eval_w(p23(), (cfg.points[i] - cfg.points[j]).norm() / cfg.epsilon);
  CHECK(d_functional(cfg, p23(), pot, rc) == doctest::Approx(want).epsilon(1e-14));

  // one spike near the saddle: d = c2 Mbar[P] tiny, well inside
  SpikeConfig one;
  one.epsilon = 0.05;
  one.beta = 0.5;
  one.taus = {1};
  one.points = {vec2(1e-3, 0.0)};
  CHECK(in_D(one, p23(), pot, rc));
  CHECK(d_functional(one, p23(), pot, rc) ==
        doctest::Approx(rc.c2 * 1e-6).epsilon(1e-12));
  one.points = {vec2(0.5, 0.0)};  // d = c2/4 >> c4 eps
  CHECK_FALSE(in_D(one, p23(), pot, rc));
}
