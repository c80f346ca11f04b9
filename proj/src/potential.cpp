#include "spikes/potential.hpp"

#include <cmath>

#include "spikes/errors.hpp"

namespace spikes {

double SaddlePotential::V(const Eigen::VectorXd& x) const {
  require(x.size() == lam_.size(), ErrorKind::DimensionMismatch, "V: dimension mismatch");
  double v = 1.0 + 0.5 * lam_.dot(x.cwiseProduct(x));
  if (cubic_ != 0.0) v += cubic_ * x[0] * x[0] * x[0];
  return v;
}

Eigen::VectorXd SaddlePotential::gradV(const Eigen::VectorXd& x) const {
  require(x.size() == lam_.size(), ErrorKind::DimensionMismatch, "gradV: dimension mismatch");
  Eigen::VectorXd g = lam_.cwiseProduct(x);
  if (cubic_ != 0.0) g[0] += 3.0 * cubic_ * x[0] * x[0];
  return g;
}

Eigen::MatrixXd SaddlePotential::hessV(const Eigen::VectorXd& x) const {
  require(x.size() == lam_.size(), ErrorKind::DimensionMismatch, "hessV: dimension mismatch");
  Eigen::MatrixXd h = lam_.asDiagonal();
  if (cubic_ != 0.0) h(0, 0) += 6.0 * cubic_ * x[0];
  return h;
}

SaddlePotential make_saddle(const Eigen::VectorXd& lambdas, double cubic, double box) {
  const int n = static_cast<int>(lambdas.size());
  require(n >= 2, ErrorKind::NotASaddle, "a saddle needs at least two directions");
  int pos = 0, neg = 0;
  for (int i = 0; i < n; ++i) {
    require(lambdas[i] != 0.0, ErrorKind::NotASaddle, "zero eigenvalue: critical point degenerate");
    (lambdas[i] > 0.0 ? pos : neg)++;
  }
  require(pos >= 1 && neg >= 1, ErrorKind::NotASaddle,
          "all eigenvalues share a sign: not a saddle");
  for (int i = 0; i + 1 < n; ++i)
    require(!(lambdas[i] < 0.0 && lambdas[i + 1] > 0.0), ErrorKind::BadConfig,
            "eigenvalues must be sorted positives first");
  SaddlePotential pot;
  pot.lam_ = lambdas;
  pot.r_ = pos;
  pot.cubic_ = cubic;
  pot.box_ = box;

  // inf V over the box: the quadratic part is separable (worst value at
  // |x_n| = box for negative lambda_n); scan x_1 when a cubic is present.
  double worst = 1.0;
  for (int i = (cubic == 0.0 ? 0 : 1); i < n; ++i)
    if (lambdas[i] < 0.0) worst += 0.5 * lambdas[i] * box * box;
  if (cubic != 0.0) {
    double m1 = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double x = -box + 2.0 * box * k / 400.0;
      m1 = std::min(m1, 0.5 * lambdas[0] * x * x + cubic * x * x * x);
    }
    worst += m1;
  }
  require(worst > 0.0, ErrorKind::BadConfig, "V not positive on the working box");
  return pot;
}

double quad(const SaddlePotential& pot, Form form, const Eigen::VectorXd& P,
            const Eigen::VectorXd& Q) {
  require(P.size() == pot.dim() && Q.size() == pot.dim(), ErrorKind::DimensionMismatch,
          "quad: dimension mismatch");
  const Eigen::VectorXd& lam = pot.lambdas();
  double s = 0.0;
  for (int i = 0; i < pot.dim(); ++i) {
    double c = lam[i];
    switch (form) {
      case Form::M: break;
      case Form::Mplus: c = std::max(c, 0.0); break;
      case Form::Mminus: c = std::max(-c, 0.0); break;
      case Form::Mbar: c = std::abs(c); break;
    }
    s += c * P[i] * Q[i];
  }
  return s;
}

double quad(const SaddlePotential& pot, Form form, const Eigen::VectorXd& P) {
  return quad(pot, form, P, P);
}

bool in_gamma(const SpikeConfig& cfg, const Profile& pr, const SaddlePotential& pot) {
  const double lvl = std::pow(cfg.epsilon, 2.0 * cfg.beta);
  const int l = cfg.ell();
  for (int i = 0; i < l; ++i)
    if (quad(pot, Form::Mbar, cfg.points[i]) >= lvl) return false;
  for (int i = 0; i < l; ++i)
    for (int j = i + 1; j < l; ++j)
      if (eval_w(pr, (cfg.points[i] - cfg.points[j]).norm() / cfg.epsilon) >= lvl) return false;
  return true;
}

double d_functional(const SpikeConfig& cfg, const Profile& pr, const SaddlePotential& pot,
                    const ReducedConstants& rc) {
  const int l = cfg.ell();
  double s = 0.0;
  for (int i = 0; i < l; ++i) s += rc.c2 * quad(pot, Form::Mbar, cfg.points[i]);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      if (j != i) s += rc.c3 * eval_w(pr, (cfg.points[i] - cfg.points[j]).norm() / cfg.epsilon);
  return s;
}

bool in_D(const SpikeConfig& cfg, const Profile& pr, const SaddlePotential& pot,
          const ReducedConstants& rc) {
  return d_functional(cfg, pr, pot, rc) <
         rc.c4 * std::pow(cfg.epsilon, 2.0 * cfg.beta);
}

}  // namespace spikes
