#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "spikes/errors.hpp"
#include "spikes/reduced.hpp"

namespace spikes {
namespace {

struct Chart {
  const ConfigFamily* fam;
  double eps;
  int na, nr;  // chart splits into anchor block and separation block

  SpikeConfig config(const Eigen::VectorXd& u) const {
    return generate(*fam, u.head(na), u.tail(nr), eps);
  }
};

}  // namespace

MaxminReport maxmin_report(const ConfigFamily& fam, const Profile& pr,
                           const SaddlePotential& pot, const ReducedConstants& rc,
                           double eps, const XiTable* tbl) {
  XiTable local;
  if (!tbl) {
    local = build_xi_table(pr);
    tbl = &local;
  }
  MaxminReport rep;
  rep.eps = eps;
  rep.beta = fam.beta;
  rep.level = 0.5 * rc.c4 * std::pow(eps, 2.0 * fam.beta);
  rep.target = 0.5 * rep.level;
  rep.anchor_r = 2.0 * eps * std::log(1.0 / eps);

  Chart ch;
  ch.fam = &fam;
  ch.eps = eps;
  ch.na = fam.k == 0 ? fam.ell() * fam.dimA : fam.dimA;
  ch.nr = fam.k == 0 ? 0 : fam.ell() - 1;
  const int dims = ch.na + ch.nr;

  // Box around the anchor (0, r_eps): anchors sized by the potential term
  // hitting the level, separations spanning the interaction crossing.
  double lmax = pot.lambdas().cwiseAbs().maxCoeff();
  const double a_max = 1.5 * std::sqrt(rep.level / (rc.c2 * lmax * fam.ell()));
  const double r_lo = std::max(1.0 * eps, 0.15 * rep.anchor_r);
  const double r_hi = 3.0 * rep.anchor_r;
  Eigen::VectorXd lo(dims), hi(dims);
  lo.head(ch.na).setConstant(-a_max);
  hi.head(ch.na).setConstant(a_max);
  lo.tail(ch.nr).setConstant(r_lo);
  hi.tail(ch.nr).setConstant(r_hi);

  const int nper = dims <= 2 ? 41 : (dims == 3 ? 17 : 9);
  Eigen::VectorXi shape = Eigen::VectorXi::Constant(dims, nper);
  long total = 1;
  for (int d = 0; d < dims; ++d) total *= nper;

  auto point_at = [&](const Eigen::VectorXi& idx) {
    Eigen::VectorXd u(dims);
    for (int d = 0; d < dims; ++d)
      u[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / (shape[d] - 1);
    return u;
  };
  auto S_at = [&](const Eigen::VectorXd& u) {
    return d_functional(ch.config(u), pr, pot, rc);
  };
  auto J_at = [&](const Eigen::VectorXd& u) {
    return reduced_energy(ch.config(u), pr, pot, rc, KernelMode::xi_exact, tbl).value;
  };

  std::vector<Eigen::VectorXd> krows, k0rows;
  Eigen::VectorXd u_inner;
  double s_inner = 0.0;
  Eigen::VectorXi idx = Eigen::VectorXi::Zero(dims);
  for (long t = 0; t < total; ++t) {
    const Eigen::VectorXd u = point_at(idx);
    const double S = S_at(u);
    if (S < rep.level) {
      const double J = J_at(u);
      Eigen::VectorXd row(dims + 2);
      row << u, S, J;
      krows.push_back(row);
      if (rep.n_K == 0 || J < rep.J_min) rep.J_min = J;
      if (rep.n_K == 0 || J > rep.J_max) rep.J_max = J;
      if (rep.n_K == 0 || S < s_inner) {
        s_inner = S;
        u_inner = u;
      }
      rep.n_K++;
    }
    for (int d = dims - 1; d >= 0; --d) {
      if (++idx[d] < shape[d]) break;
      idx[d] = 0;
    }
  }
  require(rep.n_K > 0, ErrorKind::EmptyFamily, "no sampled config below the K level");

  Eigen::VectorXd anchor(dims);
  anchor.head(ch.na).setZero();
  anchor.tail(ch.nr).setConstant(rep.anchor_r);
  rep.anchor_inside = S_at(anchor) < rep.level;

  // K0: bisect the level crossing along a fixed fan of rays from the anchor,
  // in chart coordinates scaled by the box half-widths. A fixed direction set
  // keeps the boundary statistics comparable across ladder points; rays also
  // stay on the boundary of the component the anchor belongs to.
  const Eigen::VectorXd origin = rep.anchor_inside ? anchor : u_inner;
  Eigen::VectorXd scale(dims);
  scale.head(ch.na).setConstant(a_max);
  scale.tail(ch.nr).setConstant(rep.anchor_r);
  std::vector<Eigen::VectorXd> dirs;
  if (dims == 2) {
    for (int i = 0; i < 64; ++i) {
      const double th = 2.0 * M_PI * i / 64.0;
      dirs.push_back(Eigen::Vector2d(std::cos(th), std::sin(th)));
    }
  } else {
    std::mt19937_64 g(9001);
    auto u01 = [&] { return ((g() >> 11) + 0.5) * 0x1.0p-53; };
    while (static_cast<int>(dirs.size()) < 96) {
      Eigen::VectorXd d(dims);
      for (int j = 0; j < dims; ++j)
        d[j] = std::sqrt(-2.0 * std::log(u01())) * std::cos(2.0 * M_PI * u01());
      if (d.norm() > 1e-3) dirs.push_back(d.normalized());
    }
  }

  double devsum = 0.0;
  for (const Eigen::VectorXd& dir : dirs) {
    double t_max = std::numeric_limits<double>::infinity();
    for (int j = 0; j < dims; ++j) {
      if (std::abs(dir[j]) < 1e-14) continue;
      const double bound = dir[j] > 0.0 ? hi[j] : lo[j];
      t_max = std::min(t_max, (bound - origin[j]) / (scale[j] * dir[j]));
    }
    if (!(t_max > 0.0)) continue;
    const Eigen::VectorXd step = scale.cwiseProduct(dir);
    if (S_at(origin + t_max * step) < rep.level) continue;  // K meets the box edge
    double ta = 0.0, tb = t_max;
    for (int bi = 0; bi < 60; ++bi) {
      const double tm = 0.5 * (ta + tb);
      if (S_at(origin + tm * step) < rep.level)
        ta = tm;
      else
        tb = tm;
    }
    const Eigen::VectorXd u0 = origin + 0.5 * (ta + tb) * step;
    const double J = J_at(u0);
    Eigen::VectorXd row(dims + 2);
    row << u0, S_at(u0), J;
    k0rows.push_back(row);
    const double dev = std::abs(J / rep.target - 1.0);
    if (rep.n_K0 == 0 || J < rep.K0_min) rep.K0_min = J;
    if (rep.n_K0 == 0 || J > rep.K0_max) rep.K0_max = J;
    if (dev > rep.K0_max_rel_dev) rep.K0_max_rel_dev = dev;
    devsum += J;
    rep.n_K0++;
  }
  if (rep.n_K0 > 0) rep.K0_mean = devsum / rep.n_K0;

  rep.K_samples.resize(static_cast<long>(krows.size()), dims + 2);
  for (size_t i = 0; i < krows.size(); ++i) rep.K_samples.row(i) = krows[i];
  rep.K0_samples.resize(static_cast<long>(k0rows.size()), dims + 2);
  for (size_t i = 0; i < k0rows.size(); ++i) rep.K0_samples.row(i) = k0rows[i];
  return rep;
}

}  // namespace spikes
