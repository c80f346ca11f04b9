#include "spikes/reduced.hpp"

#include <cmath>

#include "spikes/errors.hpp"

namespace spikes {
namespace {

double kernel_val(const Profile& pr, const ReducedConstants& rc, KernelMode mode,
                  const XiTable* tbl, double rho) {
  if (mode == KernelMode::asymptotic) return rc.c3 * eval_w(pr, rho);
  require(tbl != nullptr, ErrorKind::BadConfig, "xi_exact mode needs a xi table");
  return eval_xi(*tbl, pr, rho);
}

double kernel_der(const Profile& pr, const ReducedConstants& rc, KernelMode mode,
                  const XiTable* tbl, double rho) {
  if (mode == KernelMode::asymptotic) return rc.c3 * eval_w_prime(pr, rho);
  require(tbl != nullptr, ErrorKind::BadConfig, "xi_exact mode needs a xi table");
  return eval_xi_prime(*tbl, pr, rho);
}

Eigen::VectorXd embed_A(const Eigen::VectorXd& a, int dimA, int N) {
  require(a.size() == dimA, ErrorKind::DimensionMismatch, "anchor not in A");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  x.head(dimA) = a;
  return x;
}

}  // namespace

ReducedEval reduced_energy(const SpikeConfig& cfg, const Profile& pr,
                           const SaddlePotential& pot, const ReducedConstants& rc,
                           KernelMode mode, const XiTable* tbl) {
  const int l = cfg.ell();
  const int N = pot.dim();
  require(l >= 1 && static_cast<int>(cfg.taus.size()) == l, ErrorKind::BadConfig,
          "config needs matching points and signs");
  for (const auto& P : cfg.points)
    require(P.size() == N, ErrorKind::DimensionMismatch, "point dimension mismatch");

  ReducedEval ev;
  ev.mode = mode;
  ev.gradient = Eigen::VectorXd::Zero(N * l);
  for (int i = 0; i < l; ++i) {
    ev.potential_term += 0.5 * rc.c2 * quad(pot, Form::M, cfg.points[i]);
    ev.gradient.segment(i * N, N) +=
        rc.c2 * pot.lambdas().cwiseProduct(cfg.points[i]);
  }
  for (int i = 0; i < l; ++i) {
    for (int j = i + 1; j < l; ++j) {
      const Eigen::VectorXd d = cfg.points[i] - cfg.points[j];
      const double dist = d.norm();
      require(dist > 0.0, ErrorKind::BadConfig, "coincident spike points");
      const double rho = dist / cfg.epsilon;
      const double tt = cfg.taus[i] * cfg.taus[j];
      ev.interaction_term -= tt * kernel_val(pr, rc, mode, tbl, rho);
      const Eigen::VectorXd pull =
          (tt * kernel_der(pr, rc, mode, tbl, rho) / (cfg.epsilon * dist)) * d;
      ev.gradient.segment(i * N, N) -= pull;
      ev.gradient.segment(j * N, N) += pull;
    }
  }
  ev.value = ev.potential_term + ev.interaction_term;
  ev.admissible = in_gamma(cfg, pr, pot);
  return ev;
}

ConfigFamily chain_family(int ell, const SaddlePotential& pot, double beta) {
  require(ell >= 2 && ell <= 6, ErrorKind::BadShape, "chain length outside the shape table");
  ConfigFamily f;
  f.kind = FamilyKind::linear_chain;
  f.h = (ell + 1) / 2;
  f.k = ell / 2;
  f.N = pot.dim();
  f.dimA = pot.signature();
  f.beta = beta;
  return f;
}

ConfigFamily star_family(int h, const SaddlePotential& pot, double beta) {
  require(h >= 2 && h <= 5, ErrorKind::BadShape, "star arm count outside the shape table");
  require(pot.signature() >= 2, ErrorKind::BadShape, "star needs dim A >= 2");
  ConfigFamily f;
  f.kind = FamilyKind::polygon_star;
  f.h = h;
  f.k = 1;
  f.N = pot.dim();
  f.dimA = pot.signature();
  f.beta = beta;
  return f;
}

ConfigFamily cross_family(const SaddlePotential& pot, double beta) {
  require(pot.signature() >= 2, ErrorKind::BadShape, "cross needs dim A >= 2");
  ConfigFamily f;
  f.kind = FamilyKind::cross;
  f.h = 4;
  f.k = 2;
  f.N = pot.dim();
  f.dimA = pot.signature();
  f.beta = beta;
  return f;
}

ConfigFamily positive_family(int ell, const SaddlePotential& pot, double beta, double eps) {
  require(ell >= 1 && ell <= 6, ErrorKind::BadShape, "cluster size outside the shape table");
  require(pot.signature() < pot.dim(), ErrorKind::BadShape,
          "all-positive cluster needs a B direction");
  ConfigFamily f;
  f.kind = FamilyKind::linear_chain;
  f.h = ell;
  f.k = 0;
  f.N = pot.dim();
  f.dimA = pot.signature();
  f.beta = beta;
  const double gap = 2.0 * eps * std::log(1.0 / eps);
  f.boffsets = Eigen::MatrixXd::Zero(f.N, ell);
  for (int i = 0; i < ell; ++i)
    f.boffsets(f.dimA, i) = (i - 0.5 * (ell - 1)) * gap;
  return f;
}

SpikeConfig generate(const ConfigFamily& fam, const Eigen::VectorXd& a,
                     const Eigen::VectorXd& r, double eps) {
  require(eps > 0.0, ErrorKind::BadConfig, "eps must be positive");
  const int l = fam.ell();
  SpikeConfig cfg;
  cfg.epsilon = eps;
  cfg.beta = fam.beta;
  cfg.points.resize(l);
  cfg.taus.resize(l);

  if (fam.k == 0) {
    require(fam.boffsets.cols() == l && fam.boffsets.rows() == fam.N, ErrorKind::BadShape,
            "all-positive family has no B offsets");
    require(a.size() == l * fam.dimA, ErrorKind::DimensionMismatch,
            "all-positive chart needs one anchor per point");
    for (int i = 0; i < l; ++i) {
      cfg.points[i] =
          embed_A(a.segment(i * fam.dimA, fam.dimA), fam.dimA, fam.N) + fam.boffsets.col(i);
      cfg.taus[i] = 1;
    }
    return cfg;
  }

  require(fam.h >= 1 && fam.k >= 1 && l <= 6, ErrorKind::BadShape,
          "(h,k) outside the shape table");
  require(r.size() == l - 1, ErrorKind::DimensionMismatch, "r must have ell-1 entries");
  for (int i = 0; i < r.size(); ++i)
    require(r[i] > 0.0, ErrorKind::BadConfig, "r entries must be positive");

  const Eigen::VectorXd P1 = embed_A(a, fam.dimA, fam.N);
  switch (fam.kind) {
    case FamilyKind::linear_chain: {
      require(fam.k == fam.h || fam.k == fam.h - 1, ErrorKind::BadShape,
              "chain needs k in {h-1, h}");
      cfg.points[0] = P1;
      cfg.taus[0] = 1;
      double cum = 0.0;
      for (int i = 1; i < l; ++i) {
        cum += r[i - 1];
        cfg.points[i] = P1;
        cfg.points[i][0] += cum;
        cfg.taus[i] = (i % 2 == 0) ? 1 : -1;
      }
      break;
    }
    case FamilyKind::polygon_star: {
      require(fam.k == 1 && fam.h >= 2 && fam.h <= 5, ErrorKind::BadShape,
              "star needs k=1, 2<=h<=5");
      require(fam.dimA >= 2, ErrorKind::BadShape, "star needs dim A >= 2");
      cfg.points[0] = P1;
      cfg.taus[0] = -1;
      for (int i = 1; i < l; ++i) {
        const double th = 2.0 * M_PI * (i - 1) / fam.h;
        cfg.points[i] = P1;
        cfg.points[i][0] += r[i - 1] * std::cos(th);
        cfg.points[i][1] += r[i - 1] * std::sin(th);
        cfg.taus[i] = 1;
      }
      break;
    }
    case FamilyKind::cross: {
      require(fam.h == 4 && fam.k == 2, ErrorKind::BadShape, "cross is the (4,2) shape");
      require(fam.dimA >= 2, ErrorKind::BadShape, "cross needs dim A >= 2");
      cfg.points.assign(6, P1);
      cfg.points[1][0] += r[0];
      cfg.points[2][0] += r[0] + r[1];
      cfg.points[3][0] += r[0] + r[1] + r[2];
      cfg.points[4][1] += r[3];
      cfg.points[5][1] -= r[4];
      cfg.taus = {-1, 1, -1, 1, 1, 1};
      break;
    }
  }
  return cfg;
}

void h_map(const SpikeConfig& cfg, int dimA, Eigen::VectorXd& a, Eigen::VectorXd& r) {
  const int l = cfg.ell();
  require(l >= 1, ErrorKind::BadConfig, "empty config");
  bool mixed = false;
  for (int t : cfg.taus) mixed |= (t != cfg.taus[0]);

  if (!mixed && cfg.taus[0] == 1) {
    a.resize(l * dimA);
    for (int i = 0; i < l; ++i) a.segment(i * dimA, dimA) = cfg.points[i].head(dimA);
    r.resize(0);
    return;
  }

  require(l >= 2, ErrorKind::BadConfig, "mixed chart needs at least two points");
  a = cfg.points[0].head(dimA);
  r.resize(l - 1);
  for (int i = 1; i < l; ++i) {
    double best = -1.0;
    for (int j = 0; j < i; ++j) {
      if (cfg.taus[j] != -cfg.taus[i]) continue;
      const double d = (cfg.points[i] - cfg.points[j]).norm();
      if (best < 0.0 || d < best - 1e-12) best = d;
    }
    require(best >= 0.0, ErrorKind::NoOppositePair,
            "no earlier opposite-sign neighbor for a point");
    r[i - 1] = best;
  }
}

}  // namespace spikes
