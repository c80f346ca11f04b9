#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace spikes {

// Unit-distance configuration: points with pairwise distance >= 1 - tol and
// the contact edges sitting at distance 1 within tol.
struct UnitConfig {
  int dimension = 2;
  Eigen::MatrixXd points;  // dimension x ell
  std::vector<std::pair<int, int>> edges;
  double tol = 1e-6;
  int ell() const { return static_cast<int>(points.cols()); }
};

UnitConfig contact_graph(const Eigen::MatrixXd& points, double tol = 1e-6);

// (d*ell) x |E| balance map: column (i,j) adds +u_ij at block i and -u_ij at
// block j, u_ij = (Q_i - Q_j)/|Q_i - Q_j|.
Eigen::MatrixXd balance_matrix(const UnitConfig& uc);

struct BalanceKernel {
  int dim = 0;
  Eigen::MatrixXd basis;  // |E| x dim, orthonormal columns
};

// Numerical kernel of the balance map: singular vectors below 1e-8 sigma_max.
BalanceKernel balance_kernel(const UnitConfig& uc);

struct DilationIdentity {
  double value = 0.0;        // Sum_{i<j} a_ij |Q_i - Q_j|
  double contraction = 0.0;  // Sum_i balance_i . Q_i (equal to value exactly)
};

DilationIdentity dilation_value(const UnitConfig& uc, const Eigen::VectorXd& a);

// Regular unit hexagon plus center: 12 contacts, one-dimensional balance
// kernel spanned by (spokes +1, ring -1).
UnitConfig hexagon_with_center();

struct GraphClass {
  std::vector<std::pair<int, int>> edges;  // under the canonical labeling
  std::vector<int> degrees;                // sorted ascending
  std::uint64_t hash = 0;                  // canonical adjacency encoding
  int kernel_dim = 0;
  int count = 0;                 // trials that landed on this class
  Eigen::MatrixXd example_points;  // first representative found
};

// Multi-start contact maximization (repulsion/attraction sweep, then a
// Gauss-Newton polish of the active contacts to 1e-6), one kernel computation
// per distinct contact-graph isomorphism class. Deterministic in seed.
std::vector<GraphClass> search_equilibria(int ell, int dim, int trials, std::uint64_t seed);

struct SignFeasibility {
  bool feasible = false;
  double residual = 0.0;     // best min ||A a|| over the sweep, ||a||_1 = 1
  double mu1 = 0.0, mu2 = 0.0;
  Eigen::VectorXd weights;   // admissible a at the best angle
};

// Admissible-cone feasibility: a_ij = (mu2 - mu1 tau_i tau_j) b_ij, b >= 0 on
// edges, (mu1, mu2) swept over the unit circle; each angle solves a simplex-
// constrained least-squares by projected gradient.
SignFeasibility sign_constrained_kernel(const UnitConfig& uc, const std::vector<int>& taus,
                                        int angles = 360);

}  // namespace spikes
