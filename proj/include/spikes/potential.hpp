#pragma once
#include <Eigen/Dense>
#include <vector>

#include "spikes/constants.hpp"
#include "spikes/profile.hpp"

namespace spikes {

// Diagonal saddle potential V(x) = 1 + (1/2) sum lambda_n x_n^2 + cubic x_1^3,
// eigenvalues sorted positives first. A = span(e_1..e_r), B = the rest.
class SaddlePotential {
 public:
  SaddlePotential() = default;
  int dim() const { return static_cast<int>(lam_.size()); }
  int signature() const { return r_; }
  const Eigen::VectorXd& lambdas() const { return lam_; }
  double cubic() const { return cubic_; }
  double box() const { return box_; }

  double V(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradV(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessV(const Eigen::VectorXd& x) const;

  friend SaddlePotential make_saddle(const Eigen::VectorXd& lambdas, double cubic, double box);

 private:
  Eigen::VectorXd lam_;
  int r_ = 0;
  double cubic_ = 0.0;
  double box_ = 1.0;
};

// box: half-width of the working box; V must stay positive on it.
SaddlePotential make_saddle(const Eigen::VectorXd& lambdas, double cubic = 0.0,
                            double box = 1.39);

enum class Form { M, Mplus, Mminus, Mbar };

// form[P]^2 (quadratic) or form[P,Q] (bilinear); M is signed, the others
// are the positive/negative parts and their sum.
double quad(const SaddlePotential& pot, Form form, const Eigen::VectorXd& P);
double quad(const SaddlePotential& pot, Form form, const Eigen::VectorXd& P,
            const Eigen::VectorXd& Q);

struct SpikeConfig {
  double epsilon = 0.05;
  double beta = 0.9;
  std::vector<Eigen::VectorXd> points;
  std::vector<int> taus;  // +1 / -1
  int ell() const { return static_cast<int>(points.size()); }
};

// Gamma_eps membership: Mbar[P_i]^2 < eps^2beta for every i and
// w(|P_i-P_j|/eps) < eps^2beta for every pair.
bool in_gamma(const SpikeConfig& cfg, const Profile& pr, const SaddlePotential& pot);

// D_eps membership: c2 Sum Mbar[P_i]^2 + c3 Sum_{i != j} w(|P_i-P_j|/eps)
// < c4 eps^2beta.
bool in_D(const SpikeConfig& cfg, const Profile& pr, const SaddlePotential& pot,
          const ReducedConstants& rc);

// The D_eps functional itself (the left side above); also used as the level
// function for the max-min K set.
double d_functional(const SpikeConfig& cfg, const Profile& pr, const SaddlePotential& pot,
                    const ReducedConstants& rc);

}  // namespace spikes
