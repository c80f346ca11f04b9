#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "spikes/constants.hpp"
#include "spikes/errors.hpp"
#include "spikes/profile.hpp"

using namespace spikes;

namespace {

const Profile& p13() {
  static Profile pr = solve_profile(1, make_nonlinearity(3.0), 1e-8);
  return pr;
}
const Profile& p14() {
  static Profile pr = solve_profile(1, make_nonlinearity(4.0), 1e-8);
  return pr;
}
const Profile& p23() {
  static Profile pr = solve_profile(2, make_nonlinearity(3.0), 1e-8);
  return pr;
}

}  // namespace

// For w = 1.5 sech^2(x/2) every moment below is a rational number:
//   c2 = 3, c3 = 12, c1 = 6/5, int f'(w) w'^2 = 72/35.
TEST_CASE("1d cubic constants hit the closed forms") {
  const ReducedConstants rc = compute_constants(p13());
  CHECK(rc.c2 == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(rc.c3 == doctest::Approx(12.0).epsilon(1e-6));
  CHECK(rc.c1_unit == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(rc.c4 == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(z_diag_h1(p13()) == doctest::Approx(72.0 / 35.0).epsilon(1e-6));
  CHECK(std::abs(pohozaev_defect(p13())) <= 1e-6);
}

// w = sqrt(2) sech(x): c2 = 2, c3 = 4 sqrt(2), c1 = 4/3, f'w'^2 moment 16/5
TEST_CASE("1d quartic constants hit the closed forms") {
  const ReducedConstants rc = compute_constants(p14());
  CHECK(rc.c2 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rc.c3 == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-6));
  CHECK(rc.c1_unit == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(z_diag_h1(p14()) == doctest::Approx(3.2).epsilon(1e-6));
  CHECK(std::abs(pohozaev_defect(p14())) <= 1e-6);
}

TEST_CASE("planar cubic constants") {
  const ReducedConstants rc = compute_constants(p23());
  // scaling identity special to p=3, N=2: c1 = c2/2 (the two sides go
  // through different quadratures here)
  CHECK(rc.c1_unit == doctest::Approx(0.5 * rc.c2).epsilon(1e-10));
  CHECK(rc.c2 == doctest::Approx(15.501586325308734).epsilon(1e-8));
  CHECK(rc.c3 == doctest::Approx(54.45110565672313).epsilon(1e-8));
  CHECK(rc.c4 == rc.c2);
  CHECK(std::abs(pohozaev_defect(p23())) <= 1e-6);
  CHECK(z_diag_h1(p23()) > 0.0);
}

// interaction kernel against direct quadrature of 1.5^3 sech^4(x/2) sech^2((x-rho)/2),
// values computed with an adaptive integrator to 1e-12
TEST_CASE("1d interaction integral matches reference quadrature") {
  const Profile& pr = p13();
  CHECK(interaction_xi(pr, 3.0) == doctest::Approx(2.24370985834291).epsilon(1e-6));
  CHECK(interaction_xi(pr, 6.0) == doctest::Approx(0.16855516167413).epsilon(1e-6));
  CHECK(interaction_xi(pr, 10.0) == doctest::Approx(0.00326196631988827).epsilon(1e-6));
  CHECK(interaction_xi_prime(pr, 3.0) == doctest::Approx(-1.58805681155811).epsilon(1e-6));
  CHECK(interaction_xi_prime(pr, 6.0) == doctest::Approx(-0.161150066889255).epsilon(1e-6));
  double xi = 0.0, xip = 0.0;
  interaction_xi_pair(pr, 6.0, xi, xip);
  CHECK(xi == interaction_xi(pr, 6.0));
  CHECK(xip == interaction_xi_prime(pr, 6.0));
  CHECK_THROWS_AS((void)interaction_xi(pr, -1.0), Error);
}

TEST_CASE("interaction kernel approaches c3 w(rho)") {
  const Profile& pr = p13();
  const ReducedConstants rc = compute_constants(pr);
  const double ratio = interaction_xi(pr, 10.0) / (rc.c3 * eval_w(pr, 10.0));
  CHECK(std::abs(ratio - 1.0) < 5e-3);
  // and the extrapolated prefactor agrees with the direct moment
  CHECK(c3_from_xi(pr) == doctest::Approx(rc.c3).epsilon(2e-3));
}

TEST_CASE("xi table interpolates and extends the kernel") {
  const Profile& pr = p23();
  const XiTable tbl = build_xi_table(pr, 1.0, 24.0, 0.1);
  CHECK(tbl.rho_hi() == doctest::Approx(24.0));
  for (double rho : {2.55, 7.31, 15.0}) {
    CHECK(eval_xi(tbl, pr, rho) ==
          doctest::Approx(interaction_xi(pr, rho)).epsilon(1e-6));
    CHECK(eval_xi_prime(tbl, pr, rho) ==
          doctest::Approx(interaction_xi_prime(pr, rho)).epsilon(1e-5));
  }
  // beyond the last node the kernel continues as c3_tail w
  CHECK(eval_xi(tbl, pr, 26.0) ==
        doctest::Approx(tbl.c3_tail * eval_w(pr, 26.0)).epsilon(1e-12));
  const double d = 1e-6;
  const double fd = (eval_xi(tbl, pr, 9.0 + d) - eval_xi(tbl, pr, 9.0 - d)) / (2 * d);
  CHECK(eval_xi_prime(tbl, pr, 9.0) == doctest::Approx(fd).epsilon(1e-4));
}
