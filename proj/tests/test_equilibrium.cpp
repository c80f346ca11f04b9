#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "spikes/equilibrium.hpp"
#include "spikes/errors.hpp"

using namespace spikes;

namespace {

Eigen::MatrixXd pair_points() {
  Eigen::MatrixXd pts(2, 2);
  pts << 0.0, 1.0, 0.0, 0.0;
  return pts;
}

Eigen::MatrixXd triangle_points() {
  Eigen::MatrixXd pts(2, 3);
  pts << 0.0, 1.0, 0.5, 0.0, 0.0, std::sqrt(3.0) / 2.0;
  return pts;
}

}  // namespace

TEST_CASE("contact graph edges and the unit-distance gate") {
  UnitConfig pairc = contact_graph(pair_points());
  CHECK(pairc.ell() == 2);
  CHECK(pairc.edges.size() == 1);

  UnitConfig tri = contact_graph(triangle_points());
  CHECK(tri.edges.size() == 3);

  Eigen::MatrixXd wide(2, 2);
  wide << 0.0, 1.25, 0.0, 0.0;  // separated pair, no contact
  CHECK(contact_graph(wide).edges.empty());

  Eigen::MatrixXd close(2, 2);
  close << 0.0, 0.9, 0.0, 0.0;  // overlapping cores are rejected
  CHECK_THROWS_AS((void)contact_graph(close), Error);

  Eigen::MatrixXd near_unit(2, 2);
  near_unit << 0.0, 1.0000005, 0.0, 0.0;  // within tol counts as contact
  CHECK(contact_graph(near_unit, 1e-6).edges.size() == 1);

  CHECK_THROWS_AS((void)contact_graph(Eigen::MatrixXd::Zero(4, 2)), Error);
}

TEST_CASE("balance matrix of the unit pair") {
  UnitConfig uc = contact_graph(pair_points());
  const Eigen::MatrixXd A = balance_matrix(uc);
  CHECK(A.rows() == 4);
  CHECK(A.cols() == 1);
  CHECK(A(0, 0) == doctest::Approx(-1.0));  // P0 - P1 = -e1
  CHECK(A(1, 0) == 0.0);
  CHECK(A(2, 0) == doctest::Approx(1.0));
  CHECK(A(3, 0) == 0.0);
  CHECK(balance_kernel(uc).dim == 0);
  CHECK(balance_kernel(contact_graph(triangle_points())).dim == 0);
}

TEST_CASE("hexagon with center carries the one-dimensional stress") {
  UnitConfig hex = hexagon_with_center();
  CHECK(hex.ell() == 7);
  CHECK(hex.edges.size() == 12);
  const BalanceKernel ker = balance_kernel(hex);
  REQUIRE(ker.dim == 1);
  // spokes (edges at the center, vertex 0) share one weight, the ring the
  // opposite one, equal in magnitude
  double spoke = 0.0, ring = 0.0;
  for (std::size_t e = 0; e < hex.edges.size(); ++e) {
    const bool is_spoke = hex.edges[e].first == 0 || hex.edges[e].second == 0;
    (is_spoke ? spoke : ring) = ker.basis(static_cast<Eigen::Index>(e), 0);
  }
  CHECK(std::abs(spoke) > 0.1);
  CHECK(spoke == doctest::Approx(-ring).epsilon(1e-9));
  for (std::size_t e = 0; e < hex.edges.size(); ++e) {
    const bool is_spoke = hex.edges[e].first == 0 || hex.edges[e].second == 0;
    CHECK(ker.basis(static_cast<Eigen::Index>(e), 0) ==
          doctest::Approx(is_spoke ? spoke : ring).epsilon(1e-9));
  }
}

TEST_CASE("dilation identity") {
  UnitConfig hex = hexagon_with_center();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::VectorXd a(hex.edges.size());
    for (int e = 0; e < a.size(); ++e) a[e] = u(rng);
    const DilationIdentity di = dilation_value(hex, a);
    CHECK(di.value == doctest::Approx(di.contraction).epsilon(1e-12));
  }
  // a balanced stress has zero total dilation
  const BalanceKernel ker = balance_kernel(hex);
  const DilationIdentity dk = dilation_value(hex, ker.basis.col(0));
  CHECK(std::abs(dk.value) <= 1e-10);
  CHECK(std::abs(dk.contraction) <= 1e-10);
  CHECK_THROWS_AS((void)dilation_value(hex, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("random contact search finds only rigid graphs at small ell") {
  const auto classes = search_equilibria(2, 2, 50, 12345);
  REQUIRE(!classes.empty());
  std::uint64_t total = 0;
  for (const auto& gc : classes) {
    CHECK(gc.kernel_dim == 0);
    CHECK(gc.edges.size() == 1);
    total += gc.count;
    CHECK(gc.example_points.cols() == 2);
  }
  CHECK(total >= 25);  // most trials relax to the contact pair, some drift apart

  for (const auto& gc : search_equilibria(3, 2, 300, 12345)) {
    CHECK(gc.kernel_dim == 0);
    CHECK(gc.edges.size() >= 1);
    CHECK(gc.edges.size() <= 3);
  }
  CHECK_THROWS_AS((void)search_equilibria(8, 2, 10, 1), Error);
  CHECK_THROWS_AS((void)search_equilibria(3, 4, 10, 1), Error);
}

TEST_CASE("search is reproducible from its seed") {
  const auto a = search_equilibria(3, 2, 120, 777);
  const auto b = search_equilibria(3, 2, 120, 777);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].hash == b[i].hash);
    CHECK(a[i].count == b[i].count);
    CHECK(a[i].edges.size() == b[i].edges.size());
  }
}

TEST_CASE("sign-constrained stress on the centered hexagon") {
  UnitConfig hex = hexagon_with_center();
  // center opposite to the ring: the stress sign pattern is realizable
  std::vector<int> taus = {-1, 1, 1, 1, 1, 1, 1};
  const SignFeasibility sf = sign_constrained_kernel(hex, taus);
  CHECK(sf.feasible);
  CHECK(sf.residual <= 1e-8);
  CHECK(sf.weights.size() == 12);

  // a single-sign cluster cannot carry the mixed-sign stress
  std::vector<int> allplus(7, 1);
  CHECK_FALSE(sign_constrained_kernel(hex, allplus).feasible);

  // rigid pair: no stress at all, nothing to realize
  UnitConfig pairc = contact_graph(pair_points());
  CHECK_FALSE(sign_constrained_kernel(pairc, {1, -1}).feasible);

  CHECK_THROWS_AS((void)sign_constrained_kernel(hex, {1, -1}), Error);
  CHECK_THROWS_AS((void)sign_constrained_kernel(hex, taus, 2), Error);
}
