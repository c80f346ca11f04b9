#pragma once
#include <Eigen/Dense>

#include "spikes/profile.hpp"

namespace spikes {

// Scalar coefficients of the reduced energy. c1_unit is the per-spike
// limiting energy, so the constant for an l-spike cluster is l * c1_unit.
struct ReducedConstants {
  double c1_unit = 0.0;  // 1/2 int(|grad w|^2 + w^2) - int F(w)
  double c2 = 0.0;       // 1/2 int w^2
  double c3 = 0.0;       // int f(w) e^{x_1} dx
  double c4 = 0.0;       // min(c2, c3)
};

ReducedConstants compute_constants(const Profile& pr);

// Exact interaction kernel xi(rho) = int f(w(x)) w(x + rho e_1) dx and its
// derivative xi'(rho) = int f(w(x)) w'(|x + rho e_1|) (x_1 + rho)/|x + rho e_1| dx,
// reduced to a cylindrical quadrature (weight t^{N-2}).
double interaction_xi(const Profile& pr, double rho);
double interaction_xi_prime(const Profile& pr, double rho);
void interaction_xi_pair(const Profile& pr, double rho, double& xi, double& xip);

// Second route to c3: extrapolate xi(rho)/w(rho) to rho = infinity by a
// cubic fit in 1/rho. Cross-checks the direct quadrature to ~1e-3.
double c3_from_xi(const Profile& pr);

// |int(|grad w|^2 + w^2) - int f(w) w| / int(|grad w|^2 + w^2); the identity
// follows from multiplying the profile equation by w.
double pohozaev_defect(const Profile& pr);

// ||dw/dx_1||^2_{H^1}. The translation kernel identity L[dw/dx_1] = 0
// collapses it to (1/N) |S^{N-1}| int f'(w) w'^2 r^{N-1} dr.
double z_diag_h1(const Profile& pr);

// Sampled (xi, xi') on a uniform rho grid for fast kernel evaluation with an
// exact value/derivative pair (cubic Hermite and its derivative). Beyond the
// last node the kernel continues as c3_tail * w(rho), matched there.
struct XiTable {
  double rho0 = 0.0, drho = 0.0;
  Eigen::VectorXd xi, xip;
  double c3_tail = 0.0;
  double rho_hi() const { return rho0 + drho * (xi.size() - 1); }
};

XiTable build_xi_table(const Profile& pr, double rho_lo = 0.1, double rho_hi = 45.0,
                       double drho = 0.1);
double eval_xi(const XiTable& tbl, const Profile& pr, double rho);
double eval_xi_prime(const XiTable& tbl, const Profile& pr, double rho);

}  // namespace spikes
