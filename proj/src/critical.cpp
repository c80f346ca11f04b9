#include <Eigen/Dense>
#include <cmath>

#include "spikes/errors.hpp"
#include "spikes/reduced.hpp"

namespace spikes {
namespace {

Eigen::VectorXd pack(const SpikeConfig& cfg, int N) {
  Eigen::VectorXd x(N * cfg.ell());
  for (int i = 0; i < cfg.ell(); ++i) x.segment(i * N, N) = cfg.points[i];
  return x;
}

void unpack(const Eigen::VectorXd& x, int N, SpikeConfig& cfg) {
  for (int i = 0; i < cfg.ell(); ++i) cfg.points[i] = x.segment(i * N, N);
}

bool in_working_domain(const SpikeConfig& cfg, const CriticalOpts& opts) {
  const int l = cfg.ell();
  for (int i = 0; i < l; ++i) {
    if (cfg.points[i].lpNorm<Eigen::Infinity>() > opts.box) return false;
    for (int j = i + 1; j < l; ++j)
      if ((cfg.points[i] - cfg.points[j]).norm() < opts.rho_min * cfg.epsilon) return false;
  }
  return true;
}

}  // namespace

SpikeConfig find_critical_point(const SpikeConfig& seed, const Profile& pr,
                                const SaddlePotential& pot, const ReducedConstants& rc,
                                const CriticalOpts& opts, CriticalDiagnostics& diag) {
  const int N = pot.dim();
  const int n = N * seed.ell();
  SpikeConfig cfg = seed;
  require(in_working_domain(cfg, opts), ErrorKind::LeftDomain, "seed outside the working domain");

  auto grad_at = [&](const Eigen::VectorXd& x) {
    SpikeConfig c = cfg;
    unpack(x, N, c);
    return reduced_energy(c, pr, pot, rc, opts.mode, opts.tbl).gradient;
  };
  auto hess_at = [&](const Eigen::VectorXd& x) {
    const double dstep = 1e-6;
    Eigen::MatrixXd H(n, n);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += dstep;
      xm[j] -= dstep;
      H.col(j) = (grad_at(xp) - grad_at(xm)) / (2.0 * dstep);
    }
    return Eigen::MatrixXd(0.5 * (H + H.transpose()));
  };

  Eigen::VectorXd x = pack(cfg, N);
  Eigen::VectorXd g = grad_at(x);
  double mu = 1e-4;
  bool domain_blocked = false;
  int it = 0;
  for (; it < opts.max_iter && g.norm() > opts.gtol; ++it) {
    const Eigen::MatrixXd H = hess_at(x);
    const Eigen::MatrixXd A = H * H;
    const Eigen::VectorXd b = -H * g;
    bool accepted = false;
    domain_blocked = false;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      Eigen::MatrixXd Areg = A;
      Areg.diagonal().array() += mu;
      const Eigen::VectorXd step = Areg.ldlt().solve(b);
      Eigen::VectorXd xt = x + step;
      SpikeConfig ct = cfg;
      unpack(xt, N, ct);
      if (!in_working_domain(ct, opts)) {
        domain_blocked = true;
        mu *= 4.0;
        continue;
      }
      const Eigen::VectorXd gt = grad_at(xt);
      if (gt.squaredNorm() < g.squaredNorm()) {
        x = xt;
        g = gt;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
      } else {
        mu *= 4.0;
      }
      require(mu < 1e16, domain_blocked ? ErrorKind::LeftDomain : ErrorKind::NotConverged,
              domain_blocked ? "search pinned against the domain boundary"
                             : "trust region collapsed before reaching gtol");
    }
    require(accepted, domain_blocked ? ErrorKind::LeftDomain : ErrorKind::NotConverged,
            "no acceptable step");
  }
  require(g.norm() <= opts.gtol, ErrorKind::NotConverged, "iteration limit reached");

  unpack(x, N, cfg);
  diag.iterations = it;
  diag.grad_norm = g.norm();
  const Eigen::MatrixXd H = hess_at(x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  diag.hessian_eigenvalues = es.eigenvalues();
  const double scale = diag.hessian_eigenvalues.cwiseAbs().maxCoeff();
  diag.n_positive = diag.n_negative = diag.n_near_null = 0;
  for (int i = 0; i < n; ++i) {
    const double lam = diag.hessian_eigenvalues[i];
    if (std::abs(lam) < 1e-3 * scale)
      diag.n_near_null++;
    else if (lam > 0)
      diag.n_positive++;
    else
      diag.n_negative++;
  }
  diag.in_gamma_final = in_gamma(cfg, pr, pot);
  diag.in_D_final = in_D(cfg, pr, pot, rc);
  return cfg;
}

}  // namespace spikes
