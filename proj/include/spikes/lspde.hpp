#pragma once
#include <Eigen/Dense>
#include <vector>

#include "spikes/constants.hpp"
#include "spikes/grid.hpp"
#include "spikes/io.hpp"
#include "spikes/potential.hpp"
#include "spikes/profile.hpp"

namespace spikes {

// Grid realization of S_eps[v] = eps^2 Lap v - V v + f(v) on [-L,L]^2 with
// homogeneous Dirichlet data, 5-point Laplacian, and the C^2 quintic cutoff
// chi (1 inside r0_frac*L, 0 outside r1_frac*L).
struct LSParameters {
  double epsilon = 0.05;
  double beta = 0.9;
  double mu = 0.5;  // *-norm weight exponent, must sit in (0, sigma)
  double r0_frac = 0.6;
  double r1_frac = 0.8;
  double eta(double sigma) const { return beta * beta * (1.0 + sigma); }
};

double cutoff_chi(const LSParameters& ps, double L, double xnorm);

// chi(x) Sum tau_i w((x-P_i)/eps); requires clearance >= 5 eps log(1/eps)
// between every spike and the boundary.
GridField assemble_ansatz(const SpikeConfig& cfg, const Profile& pr, const LSParameters& ps,
                          const Grid& g);

GridField residual(const GridField& v, const LSParameters& ps, const SaddlePotential& pot,
                   const Nonlinearity& nl);

// Discrete energy whose exact gradient is -h^2 S_eps[v]: edge differences for
// the gradient term, node sums for the rest.
double energy(const GridField& v, const LSParameters& ps, const SaddlePotential& pot,
              const Nonlinearity& nl);

// Z_{P_i,n} = (V - eps^2 Lap_5) applied to the analytic field
// d(chi w_{P_i})/dx_n; returned in spike-major order (i*2 + n).
std::vector<GridField> z_functions(const SpikeConfig& cfg, const Profile& pr,
                                   const LSParameters& ps, const SaddlePotential& pot,
                                   const Grid& g);

struct CorrectionResult {
  GridField phi;
  Eigen::MatrixXd alphas;        // ell x 2 multipliers
  double residual_norm = 0.0;    // max-norm of S[u+phi] - Sum alpha Z
  Eigen::VectorXd orth_defects;  // |<phi,Z_k>| / (|phi| |Z_k|), h^2-weighted
  int newton_iterations = 0;
  bool gamma_member = true;      // in_gamma at cfg (warn-level)
};

// Solves the projected problem S_eps[u + phi] = Sum alpha_in Z_in with
// <phi, Z_in> = 0 by a bordered iteration: the linearization is frozen at the
// ansatz (the same contraction the construction uses), each step does one
// preconditioned MINRES solve, and the multiplier block is eliminated by a
// Schur complement on the ell*2 constraints.
CorrectionResult projected_solve(const SpikeConfig& cfg, const Profile& pr,
                                 const SaddlePotential& pot, const Nonlinearity& nl,
                                 const LSParameters& ps, const Grid& g, double tol = 1e-11,
                                 JsonlLog* log = nullptr);

// eps^-2 * energy(v) - ell * c1_ref. Pass c1_grid(..) as c1_ref so the h^2
// bias of the O(1) per-spike energy cancels between the two terms.
double reduced_energy_numeric(const GridField& v, const LSParameters& ps,
                              const SaddlePotential& pot, const Nonlinearity& nl, int ell,
                              double c1_ref);

// Damped Newton on S_eps[v] = 0 (backtracking halving, at most 20).
GridField newton_solve(const GridField& v0, const SaddlePotential& pot, const Nonlinearity& nl,
                       const LSParameters& ps, double tol, int max_iter, int* steps = nullptr,
                       JsonlLog* log = nullptr);

struct Peak {
  Eigen::Vector2d pos;
  int sign = 1;
  double height = 0.0;
};

// Local maxima of |v| above the threshold, subgrid position by per-axis
// parabola fit.
std::vector<Peak> extract_peaks(const GridField& v, double threshold);

// sup over nodes of (Sum_i w((x-P_i)/eps))^{-mu} |v|
double weighted_norm(const GridField& v, const SpikeConfig& cfg, const Profile& pr, double mu);

struct MomentReport {
  Eigen::Vector2d lhs = Eigen::Vector2d::Zero();  // h^2 Sum V chi^2 w_i grad_h w_i
  Eigen::Vector2d rhs = Eigen::Vector2d::Zero();  // -eps^2 c2 (lambda .* P_i)
  double normalized_deviation = 0.0;              // |lhs-rhs| / eps^{2+beta}
};

MomentReport moment_check(const SpikeConfig& cfg, int i, const Profile& pr,
                          const SaddlePotential& pot, const ReducedConstants& rc,
                          const LSParameters& ps, const Grid& g);

// Discrete per-spike reference energy: single centered spike, V = 1, same
// grid and cutoff geometry.
double c1_grid(const Profile& pr, const LSParameters& ps, const Grid& g);

// Pointwise ansatz defect with exact Laplacian cancellation:
// (1 - V) w_P + [f(w_P) - Sum tau_i f(w_i)].
GridField ansatz_defect_field(const SpikeConfig& cfg, const Profile& pr,
                              const SaddlePotential& pot, const Grid& g);

// sup over |x| <= r0_frac*L of (Sum w_i)^{-(1-beta)} |defect|
double weighted_defect_sup(const SpikeConfig& cfg, const Profile& pr, const LSParameters& ps,
                           const SaddlePotential& pot, const Grid& g);

}  // namespace spikes
