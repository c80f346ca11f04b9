#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "spikes/constants.hpp"
#include "spikes/errors.hpp"
#include "spikes/potential.hpp"
#include "spikes/profile.hpp"
#include "spikes/reduced.hpp"

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
const ReducedConstants& rc23() {
  static ReducedConstants rc = compute_constants(p23());
  return rc;
}
const XiTable& xt23() {
  static XiTable tbl = build_xi_table(p23());
  return tbl;
}

SaddlePotential pot2() { return make_saddle(vec2(1.0, -1.0)); }
SaddlePotential pot3() {
  Eigen::VectorXd lam(3);
  lam << 1.0, 1.0, -1.0;
  return make_saddle(lam);
}

}  // namespace

TEST_CASE("chain family geometry") {
  const SaddlePotential pot = pot2();
  ConfigFamily fam = chain_family(2, pot, 0.5);
  CHECK(fam.ell() == 2);
  CHECK(fam.dimA == 1);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd r = Eigen::VectorXd::Constant(1, 0.4);
  const SpikeConfig cfg = generate(fam, a, r, 0.05);
  CHECK(cfg.points[0] == vec2(0.0, 0.0));
  CHECK(cfg.points[1] == vec2(0.4, 0.0));
  CHECK(cfg.taus[0] == 1);
  CHECK(cfg.taus[1] == -1);
  CHECK(cfg.beta == 0.5);

  ConfigFamily f5 = chain_family(5, pot, 0.5);
  Eigen::VectorXd r4(4);
  r4 << 0.2, 0.25, 0.21, 0.3;
  const SpikeConfig c5 = generate(f5, a, r4, 0.05);
  CHECK(c5.taus == std::vector<int>{1, -1, 1, -1, 1});
  CHECK(c5.points[4][0] == doctest::Approx(0.96).epsilon(1e-14));
  CHECK(c5.points[4][1] == 0.0);

  CHECK_THROWS_AS((void)chain_family(7, pot, 0.5), Error);
  CHECK_THROWS_AS((void)chain_family(1, pot, 0.5), Error);
  r[0] = -0.1;
  CHECK_THROWS_AS((void)generate(fam, a, r, 0.05), Error);
  r[0] = 0.4;
  CHECK_THROWS_AS((void)generate(fam, a, r, -0.05), Error);
}

TEST_CASE("star and cross need two shrinking directions") {
  CHECK_THROWS_AS((void)star_family(3, pot2(), 0.5), Error);
  CHECK_THROWS_AS((void)cross_family(pot2(), 0.5), Error);
  CHECK_THROWS_AS((void)star_family(6, pot3(), 0.5), Error);

  const SaddlePotential pot = pot3();
  ConfigFamily star = star_family(3, pot, 0.5);
  CHECK(star.ell() == 4);
  Eigen::VectorXd a = vec2(0.1, -0.2);
  Eigen::VectorXd r(3);
  r << 0.3, 0.31, 0.32;
  const SpikeConfig sc = generate(star, a, r, 0.05);
  CHECK(sc.taus == std::vector<int>{-1, 1, 1, 1});
  CHECK(sc.points[0][0] == 0.1);
  CHECK(sc.points[0][2] == 0.0);
  CHECK(sc.points[1][0] == doctest::Approx(0.4));          // angle 0
  CHECK(sc.points[2][0] == doctest::Approx(0.1 - 0.155));  // angle 2 pi/3
  CHECK(sc.points[2][1] == doctest::Approx(-0.2 + 0.31 * std::sqrt(3.0) / 2));
  for (int i = 1; i <= 3; ++i)
    CHECK((sc.points[i] - sc.points[0]).norm() == doctest::Approx(r[i - 1]).epsilon(1e-14));

  ConfigFamily cross = cross_family(pot, 0.5);
  CHECK(cross.ell() == 6);
  Eigen::VectorXd rc(5);
  rc << 0.2, 0.22, 0.24, 0.26, 0.28;
  const SpikeConfig cc = generate(cross, Eigen::VectorXd::Zero(2), rc, 0.05);
  CHECK(cc.taus == std::vector<int>{-1, 1, -1, 1, 1, 1});
  CHECK(cc.points[3][0] == doctest::Approx(0.66));
  CHECK(cc.points[4][1] == doctest::Approx(0.26));
  CHECK(cc.points[5][1] == doctest::Approx(-0.28));
}

TEST_CASE("all-positive family hangs spikes off the B axis") {
  const SaddlePotential pot = pot2();
  const double eps = 0.05;
  ConfigFamily fam = positive_family(2, pot, 0.5, eps);
  CHECK(fam.k == 0);
  Eigen::VectorXd a(2);
  a << 0.01, -0.02;
  const SpikeConfig cfg = generate(fam, a, Eigen::VectorXd(), eps);
  CHECK(cfg.taus == std::vector<int>{1, 1});
  const double gap = 2.0 * eps * std::log(1.0 / eps);
  CHECK(cfg.points[0][0] == 0.01);
  CHECK(cfg.points[0][1] == doctest::Approx(-gap / 2).epsilon(1e-14));
  CHECK(cfg.points[1][0] == -0.02);
  CHECK(cfg.points[1][1] == doctest::Approx(gap / 2).epsilon(1e-14));
  // one-dimensional A has no room for an all-positive cluster in 1d overall
  Eigen::VectorXd lam1(2);
  lam1 << 1.0, -1.0;
  CHECK_THROWS_AS((void)positive_family(7, pot, 0.5, eps), Error);
}

TEST_CASE("chart map inverts generate") {
  const SaddlePotential pot = pot3();
  Eigen::VectorXd a = vec2(0.07, -0.03);
  Eigen::VectorXd r(3);
  r << 0.33, 0.29, 0.41;
  for (ConfigFamily fam : {chain_family(4, pot, 0.5), star_family(3, pot, 0.5)}) {
    const SpikeConfig cfg = generate(fam, a, r, 0.05);
    Eigen::VectorXd a2, r2;
    h_map(cfg, fam.dimA, a2, r2);
    CHECK((a2 - a).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((r2 - r).lpNorm<Eigen::Infinity>() <= 1e-15);
  }
  // all-positive chart: anchors round trip, r is empty
  ConfigFamily fp = positive_family(3, pot2(), 0.5, 0.05);
  Eigen::VectorXd ap(3);
  ap << 0.01, -0.04, 0.02;
  const SpikeConfig cp = generate(fp, ap, Eigen::VectorXd(), 0.05);
  Eigen::VectorXd a2, r2;
  h_map(cp, 1, a2, r2);
  CHECK(r2.size() == 0);
  CHECK((a2 - ap).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("chart radii are nearest earlier opposite-sign distances") {
  SpikeConfig cfg;
  cfg.taus = {1, -1, 1};
  cfg.points = {vec2(0.0, 0.0), vec2(0.4, 0.0), vec2(0.9, 0.1)};
  Eigen::VectorXd a, r;
  h_map(cfg, 1, a, r);
  CHECK(r.size() == 2);
  CHECK(r[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx((cfg.points[2] - cfg.points[1]).norm()).epsilon(1e-15));

  SpikeConfig orphan;  // second +1 has no earlier -1
  orphan.taus = {1, 1, -1};
  orphan.points = {vec2(0.0, 0.0), vec2(0.4, 0.0), vec2(0.8, 0.0)};
  CHECK_THROWS_AS(h_map(orphan, 1, a, r), Error);
}

TEST_CASE("reduced energy assembles potential and interaction parts") {
  const SaddlePotential pot = pot2();
  SpikeConfig cfg;
  cfg.epsilon = 0.05;
  cfg.beta = 0.5;
  cfg.taus = {1, -1, 1};
  cfg.points = {vec2(-0.2, 0.01), vec2(0.0, -0.02), vec2(0.22, 0.0)};
  for (KernelMode mode : {KernelMode::asymptotic, KernelMode::xi_exact}) {
    const XiTable* tbl = mode == KernelMode::xi_exact ? &xt23() : nullptr;
    const ReducedEval ev = reduced_energy(cfg, p23(), pot, rc23(), mode, tbl);
    CHECK(ev.value == ev.potential_term + ev.interaction_term);
    double pot_want = 0.0;
    for (const auto& P : cfg.points) pot_want += 0.5 * rc23().c2 * quad(pot, Form::M, P);
    CHECK(ev.potential_term == doctest::Approx(pot_want).epsilon(1e-14));
    double int_want = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const double rho = (cfg.points[i] - cfg.points[j]).norm() / cfg.epsilon;
        const double ker = mode == KernelMode::xi_exact
                               ? eval_xi(xt23(), p23(), rho)
                               : rc23().c3 * eval_w(p23(), rho);
        int_want -= cfg.taus[i] * cfg.taus[j] * ker;
      }
    CHECK(ev.interaction_term == doctest::Approx(int_want).epsilon(1e-12));
    CHECK(ev.gradient.size() == 6);
  }
  // separations here sit at rho = 4, where the exact kernel is still some
  // 12 percent below c3 w; the modes only have to be in the same ballpark
  const ReducedEval ea = reduced_energy(cfg, p23(), pot, rc23(), KernelMode::asymptotic);
  const ReducedEval ex = reduced_energy(cfg, p23(), pot, rc23(), KernelMode::xi_exact, &xt23());
  CHECK(ex.value == doctest::Approx(ea.value).epsilon(0.2));
  CHECK_THROWS_AS((void)reduced_energy(cfg, p23(), pot, rc23(), KernelMode::xi_exact, nullptr),
                  Error);
}

TEST_CASE("reduced gradient matches central differences") {
  const SaddlePotential pot = pot2();
  std::mt19937 rng(20240816);
  std::uniform_real_distribution<double> pos(-0.25, 0.25);
  const double d = 3e-6;
  int tested = 0;
  while (tested < 10) {
    const int l = 2 + (int)(rng() % 2);
    SpikeConfig cfg;
    cfg.epsilon = 0.05;
    cfg.beta = 0.5;
    for (int i = 0; i < l; ++i) {
      cfg.points.push_back(vec2(pos(rng), pos(rng)));
      cfg.taus.push_back(i % 2 ? -1 : 1);
    }
    bool ok = true;  // keep separations inside the tabulated kernel range
    for (int i = 0; i < l && ok; ++i)
      for (int j = i + 1; j < l; ++j)
        ok &= (cfg.points[i] - cfg.points[j]).norm() / cfg.epsilon > 2.5;
    if (!ok) continue;
    ++tested;
    for (KernelMode mode : {KernelMode::asymptotic, KernelMode::xi_exact}) {
      const XiTable* tbl = mode == KernelMode::xi_exact ? &xt23() : nullptr;
      const ReducedEval ev = reduced_energy(cfg, p23(), pot, rc23(), mode, tbl);
      double worst = 0.0;
      for (int i = 0; i < l; ++i)
        for (int c = 0; c < 2; ++c) {
          SpikeConfig cp = cfg, cm = cfg;
          cp.points[i][c] += d;
          cm.points[i][c] -= d;
          const double fd = (reduced_energy(cp, p23(), pot, rc23(), mode, tbl).value -
                             reduced_energy(cm, p23(), pot, rc23(), mode, tbl).value) /
                            (2 * d);
          worst = std::max(worst, std::abs(fd - ev.gradient[i * 2 + c]));
        }
      const double scale = std::max(1.0, ev.gradient.lpNorm<Eigen::Infinity>());
      CHECK(worst / scale <= 1e-6);
    }
  }
}

TEST_CASE("critical pair agrees with a dense chart scan") {
  const SaddlePotential pot = pot2();
  const double eps = 0.05;
  ConfigFamily fam = chain_family(2, pot, 0.5);
  Eigen::VectorXd a0 = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd r0 = Eigen::VectorXd::Constant(1, 2.0 * eps * std::log(1.0 / eps));
  const SpikeConfig seed = generate(fam, a0, r0, eps);

  CriticalOpts opts;
  CriticalDiagnostics diag;
  const SpikeConfig crit = find_critical_point(seed, p23(), pot, rc23(), opts, diag);
  CHECK(diag.grad_norm <= opts.gtol);
  // the inertia is reported for the full 4-coordinate Hessian
  CHECK(diag.n_near_null == 0);
  CHECK(diag.n_positive + diag.n_negative == 4);
  const double a_star = crit.points[0][0];
  const double d_star = crit.points[1][0] - crit.points[0][0];
  // the pair should sit symmetric about the saddle along e1
  CHECK(std::abs(a_star + d_star / 2) <= 1e-6);
  CHECK(crit.points[0][1] == doctest::Approx(0.0).epsilon(1e-9));

  // independent route: dense scan of the chart gradient over (a, d)
  auto chart_grad = [&](double a, double dd) {
    SpikeConfig c = seed;
    c.points[0] = vec2(a, 0.0);
    c.points[1] = vec2(a + dd, 0.0);
    const ReducedEval ev = reduced_energy(c, p23(), pot, rc23(), KernelMode::asymptotic);
    const double ga = ev.gradient[0] + ev.gradient[2];
    const double gd = ev.gradient[2];
    return std::hypot(ga, gd);
  };
  double best_a = 0.0, best_d = 0.0, best = 1e300;
  for (double a = -0.30; a <= -0.05; a += 1e-3)
    for (double dd = 0.20; dd <= 0.55; dd += 1e-3) {
      const double g = chart_grad(a, dd);
      if (g < best) {
        best = g;
        best_a = a;
        best_d = dd;
      }
    }
  CHECK(std::abs(best_a - a_star) <= 2e-3);
  CHECK(std::abs(best_d - d_star) <= 2e-3);

  // separation lands in the admissible window
  const double lo = 2.0 * 0.5 * 0.5 * eps * std::log(1.0 / eps);
  const double hi = 4.0 * eps * std::log(1.0 / eps);
  CHECK(d_star >= lo);
  CHECK(d_star <= hi);

  // the exact kernel moves the endpoint only slightly
  opts.mode = KernelMode::xi_exact;
  opts.tbl = &xt23();
  CriticalDiagnostics diag2;
  const SpikeConfig crit2 = find_critical_point(seed, p23(), pot, rc23(), opts, diag2);
  CHECK(std::abs(crit2.points[0][0] - a_star) <= 5e-3);
  CHECK(diag2.grad_norm <= opts.gtol);
}

TEST_CASE("maxmin report at a feasible rung") {
  const SaddlePotential pot = pot2();
  ConfigFamily fam = chain_family(2, pot, 0.15);
  const MaxminReport rep = maxmin_report(fam, p23(), pot, rc23(), 0.05, &xt23());
  CHECK(rep.level == doctest::Approx(0.5 * rc23().c4 * std::pow(0.05, 0.3)));
  CHECK(rep.target == doctest::Approx(0.5 * rep.level));
  CHECK(rep.anchor_inside);
  CHECK(rep.n_K > 0);
  CHECK(rep.n_K0 >= 16);
  CHECK(rep.J_min <= rep.K0_min);
  CHECK(rep.K0_min <= rep.K0_mean);
  CHECK(rep.K0_mean <= rep.K0_max);
  CHECK(rep.K0_max_rel_dev > 0.0);
  CHECK(rep.K0_max_rel_dev < 0.30);
}
