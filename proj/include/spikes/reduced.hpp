#pragma once
#include <Eigen/Dense>
#include <vector>

#include "spikes/constants.hpp"
#include "spikes/potential.hpp"
#include "spikes/profile.hpp"

namespace spikes {

enum class KernelMode { asymptotic, xi_exact };

struct ReducedEval {
  double value = 0.0;
  Eigen::VectorXd gradient;  // stacked d/dP_i, length N*ell
  KernelMode mode = KernelMode::asymptotic;
  double potential_term = 0.0;    // (c2/2) Sum M[P_i]^2
  double interaction_term = 0.0;  // -(1/2) Sum_{i!=j} tau_i tau_j kernel(rho_ij)
  bool admissible = true;         // in_gamma at this config (warn-level)
};

// J over spike positions. xi_exact mode needs the sampled kernel table; the
// gradient then uses the exact derivative of the same interpolant, so it is
// consistent with finite differences of the value.
ReducedEval reduced_energy(const SpikeConfig& cfg, const Profile& pr,
                           const SaddlePotential& pot, const ReducedConstants& rc,
                           KernelMode mode, const XiTable* tbl = nullptr);

enum class FamilyKind { linear_chain, polygon_star, cross };

// Parameter charts for the three cluster shapes plus the all-positive case
// (k = 0, chain kind with fixed pairwise-separated B offsets). Directions are
// the leading axes of A: chains run along e_1, stars span (e_1,e_2), the
// cross uses (e_1,e_2).
struct ConfigFamily {
  FamilyKind kind = FamilyKind::linear_chain;
  int h = 1, k = 1;  // positive / negative peak counts; ell = h + k
  int N = 2;
  int dimA = 1;
  double beta = 0.9;
  Eigen::MatrixXd boffsets;  // N x ell, used only when k = 0
  int ell() const { return h + k; }
};

ConfigFamily chain_family(int ell, const SaddlePotential& pot, double beta);
ConfigFamily star_family(int h, const SaddlePotential& pot, double beta);
ConfigFamily cross_family(const SaddlePotential& pot, double beta);
ConfigFamily positive_family(int ell, const SaddlePotential& pot, double beta, double eps);

// Point pattern of the family at chart parameters (a, r); a has dimA entries
// (ell*dimA in the all-positive case), r has ell-1 positive entries (empty in
// the all-positive case).
SpikeConfig generate(const ConfigFamily& fam, const Eigen::VectorXd& a,
                     const Eigen::VectorXd& r, double eps);

// Inverse chart: a = pi_A(P_1) and r_i = min over earlier opposite-sign
// neighbors of |P_i - P_j| (ties broken to the smaller j within 1e-12).
// All-positive configs return pi_A of every point and an empty r.
void h_map(const SpikeConfig& cfg, int dimA, Eigen::VectorXd& a, Eigen::VectorXd& r);

struct CriticalOpts {
  double gtol = 1e-9;
  int max_iter = 200;
  KernelMode mode = KernelMode::asymptotic;
  const XiTable* tbl = nullptr;
  double rho_min = 1.0;  // working-domain floor on separations, in units of eps
  double box = 1.0;      // working-domain cap on |P_i|
};

struct CriticalDiagnostics {
  int iterations = 0;
  double grad_norm = 0.0;
  int n_positive = 0, n_negative = 0, n_near_null = 0;
  Eigen::VectorXd hessian_eigenvalues;
  bool in_gamma_final = false;
  bool in_D_final = false;
};

// Trust-region (Levenberg) minimization of |grad J|^2 with a finite-difference
// Hessian of the analytic gradient; classifies the endpoint by Hessian
// signature (eigenvalues below 1e-3 |H| count as near-null).
SpikeConfig find_critical_point(const SpikeConfig& seed, const Profile& pr,
                                const SaddlePotential& pot, const ReducedConstants& rc,
                                const CriticalOpts& opts, CriticalDiagnostics& diag);

struct MaxminReport {
  double eps = 0.0, beta = 0.0;
  double level = 0.0;   // c4 eps^2beta / 2, the K-set bound on the D functional
  double target = 0.0;  // c4 eps^2beta / 4, the predicted boundary value of J
  double J_min = 0.0, J_max = 0.0;
  double K0_min = 0.0, K0_max = 0.0, K0_mean = 0.0;
  double K0_max_rel_dev = 0.0;  // max |J/target - 1| over the K0 samples
  int n_K = 0, n_K0 = 0;
  bool anchor_inside = false;  // whether (0, r_eps) itself lies in K
  double anchor_r = 0.0;
  Eigen::MatrixXd K_samples;   // rows: (a..., r..., S, J)
  Eigen::MatrixXd K0_samples;  // same layout, S = level
};

// Samples the set K = {S < c4 eps^2beta / 2} on a chart grid around the
// anchor (0, r_eps) and locates its boundary K0 by bisecting the level
// crossing along a fixed fan of rays from the anchor; J is evaluated in
// xi_exact mode.
MaxminReport maxmin_report(const ConfigFamily& fam, const Profile& pr,
                           const SaddlePotential& pot, const ReducedConstants& rc,
                           double eps, const XiTable* tbl = nullptr);

}  // namespace spikes
