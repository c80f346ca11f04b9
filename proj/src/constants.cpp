#include "spikes/constants.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spikes/errors.hpp"
#include "spikes/quadrature.hpp"

namespace spikes {
namespace {

template <class F>
double radial_integral(const Profile& pr, F&& g, double rmax) {
  const int np = panels_for(0.0, rmax, 0.25);
  return integrate_panels([&](double r) { return g(r); }, 0.0, rmax, np, 16);
}

// Flattened cylindrical quadrature grid for integrals of radial functions
// against shifted factors: weights already carry |S^{N-2}| t^{N-2} (or the
// plain line measure when N = 1).
struct PlaneGrid {
  std::vector<double> x1, t, wgt;
};

double cutoff_radius(const Profile& pr) {
  return std::max(pr.rstar, 21.0 / (pr.nl.p - 2.0)) + 3.0;
}

PlaneGrid make_plane_grid(const Profile& pr) {
  const double rc = cutoff_radius(pr);
  const int order = 12;
  const GaussRule& gr = gauss_legendre(order);
  const int nx = panels_for(-rc, rc, 1.0);
  PlaneGrid g;
  if (pr.dim == 1) {
    g.x1.reserve(static_cast<size_t>(nx) * order);
    const double hx = 2.0 * rc / nx;
    for (int i = 0; i < nx; ++i) {
      const double a = -rc + i * hx;
      for (int q = 0; q < order; ++q) {
        g.x1.push_back(a + 0.5 * hx * (1.0 + gr.x[q]));
        g.t.push_back(0.0);
        g.wgt.push_back(0.5 * hx * gr.w[q]);
      }
    }
    return g;
  }
  const int nt = panels_for(0.0, rc, 1.0);
  const double hx = 2.0 * rc / nx, ht = rc / nt;
  const double ssub = sphere_area(pr.dim - 1);
  g.x1.reserve(static_cast<size_t>(nx) * nt * order * order);
  for (int i = 0; i < nx; ++i) {
    const double ax = -rc + i * hx;
    for (int q = 0; q < order; ++q) {
      const double x = ax + 0.5 * hx * (1.0 + gr.x[q]);
      const double wx = 0.5 * hx * gr.w[q];
      for (int j = 0; j < nt; ++j) {
        const double at = j * ht;
        for (int s = 0; s < order; ++s) {
          const double t = at + 0.5 * ht * (1.0 + gr.x[s]);
          const double wt = 0.5 * ht * gr.w[s];
          g.x1.push_back(x);
          g.t.push_back(t);
          g.wgt.push_back(wx * wt * ssub * std::pow(t, pr.dim - 2));
        }
      }
    }
  }
  return g;
}

// f(w(|x|)) at every grid point, premultiplied by the quadrature weight.
std::vector<double> source_factor(const Profile& pr, const PlaneGrid& g) {
  std::vector<double> fv(g.x1.size());
  for (size_t k = 0; k < fv.size(); ++k) {
    const double r = std::hypot(g.x1[k], g.t[k]);
    fv[k] = g.wgt[k] * pr.nl.f(eval_w(pr, r));
  }
  return fv;
}

void accumulate_xi(const Profile& pr, const PlaneGrid& g, const std::vector<double>& fv,
                   double rho, double& xi, double& xip) {
  double sv = 0.0, sp = 0.0;
  for (size_t k = 0; k < fv.size(); ++k) {
    const double u = g.x1[k] + rho;
    const double s = std::hypot(u, g.t[k]);
    sv += fv[k] * eval_w(pr, s);
    if (s > 0.0) sp += fv[k] * eval_w_prime(pr, s) * (u / s);
  }
  xi = sv;
  xip = sp;
}

double hermite_val(double y0, double y1, double m0, double m1, double h, double tt) {
  const double t2 = tt * tt, t3 = t2 * tt;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + tt) * h * m0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

double hermite_der(double y0, double y1, double m0, double m1, double h, double tt) {
  const double t2 = tt * tt;
  return ((6 * t2 - 6 * tt) * (y0 - y1)) / h + (3 * t2 - 4 * tt + 1) * m0 +
         (3 * t2 - 2 * tt) * m1;
}

}  // namespace

ReducedConstants compute_constants(const Profile& pr) {
  const double S = sphere_area(pr.dim);
  const double rmax = pr.rstar + 10.0;
  const int nm1 = pr.dim - 1;
  auto rpow = [nm1](double r) { return nm1 == 0 ? 1.0 : std::pow(r, nm1); };
  const double iw2 =
      radial_integral(pr, [&](double r) { double w = eval_w(pr, r); return w * w * rpow(r); }, rmax);
  const double igr = radial_integral(
      pr, [&](double r) { double v = eval_w_prime(pr, r); return v * v * rpow(r); }, rmax);
  const double iF =
      radial_integral(pr, [&](double r) { return pr.nl.F(eval_w(pr, r)) * rpow(r); }, rmax);

  ReducedConstants rc;
  rc.c2 = 0.5 * S * iw2;
  rc.c1_unit = 0.5 * S * (igr + iw2) - S * iF;

  const PlaneGrid g = make_plane_grid(pr);
  double c3 = 0.0;
  for (size_t k = 0; k < g.x1.size(); ++k) {
    const double r = std::hypot(g.x1[k], g.t[k]);
    c3 += g.wgt[k] * pr.nl.f(eval_w(pr, r)) * std::exp(g.x1[k]);
  }
  rc.c3 = c3;
  rc.c4 = std::min(rc.c2, rc.c3);
  return rc;
}

void interaction_xi_pair(const Profile& pr, double rho, double& xi, double& xip) {
  require(rho > 0.0, ErrorKind::BadConfig, "interaction distance must be positive");
  const PlaneGrid g = make_plane_grid(pr);
  const std::vector<double> fv = source_factor(pr, g);
  accumulate_xi(pr, g, fv, rho, xi, xip);
}

double interaction_xi(const Profile& pr, double rho) {
  double xi, xip;
  interaction_xi_pair(pr, rho, xi, xip);
  return xi;
}

double interaction_xi_prime(const Profile& pr, double rho) {
  double xi, xip;
  interaction_xi_pair(pr, rho, xi, xip);
  return xip;
}

double c3_from_xi(const Profile& pr) {
  // xi(rho)/w(rho) = c3 (1 + a/rho + b/rho^2 + ...); a cubic fit in 1/rho
  // through four stations leaves an O(rho^-4) tail.
  const double rhos[4] = {15.0, 20.0, 25.0, 30.0};
  const PlaneGrid g = make_plane_grid(pr);
  const std::vector<double> fv = source_factor(pr, g);
  Eigen::Matrix4d vand;
  Eigen::Vector4d q;
  for (int i = 0; i < 4; ++i) {
    double xi, xip;
    accumulate_xi(pr, g, fv, rhos[i], xi, xip);
    q[i] = xi / eval_w(pr, rhos[i]);
    const double u = 1.0 / rhos[i];
    vand(i, 0) = 1.0;
    vand(i, 1) = u;
    vand(i, 2) = u * u;
    vand(i, 3) = u * u * u;
  }
  return vand.fullPivLu().solve(q)[0];
}

double pohozaev_defect(const Profile& pr) {
  const double rmax = pr.rstar + 10.0;
  const int nm1 = pr.dim - 1;
  auto rpow = [nm1](double r) { return nm1 == 0 ? 1.0 : std::pow(r, nm1); };
  const double iw2 =
      radial_integral(pr, [&](double r) { double w = eval_w(pr, r); return w * w * rpow(r); }, rmax);
  const double igr = radial_integral(
      pr, [&](double r) { double v = eval_w_prime(pr, r); return v * v * rpow(r); }, rmax);
  const double ifw = radial_integral(
      pr, [&](double r) { double w = eval_w(pr, r); return pr.nl.f(w) * w * rpow(r); }, rmax);
  return std::abs(igr + iw2 - ifw) / (igr + iw2);
}

double z_diag_h1(const Profile& pr) {
  const double S = sphere_area(pr.dim);
  const double rmax = pr.rstar + 10.0;
  const int nm1 = pr.dim - 1;
  auto rpow = [nm1](double r) { return nm1 == 0 ? 1.0 : std::pow(r, nm1); };
  const double i = radial_integral(
      pr,
      [&](double r) {
        const double v = eval_w_prime(pr, r);
        return pr.nl.fprime(eval_w(pr, r)) * v * v * rpow(r);
      },
      rmax);
  return S / pr.dim * i;
}

XiTable build_xi_table(const Profile& pr, double rho_lo, double rho_hi, double drho) {
  require(rho_lo > 0.0 && rho_hi > rho_lo && drho > 0.0, ErrorKind::BadConfig,
          "bad xi table range");
  const int n = static_cast<int>(std::ceil((rho_hi - rho_lo) / drho)) + 1;
  XiTable tbl;
  tbl.rho0 = rho_lo;
  tbl.drho = drho;
  tbl.xi.resize(n);
  tbl.xip.resize(n);
  const PlaneGrid g = make_plane_grid(pr);
  const std::vector<double> fv = source_factor(pr, g);
  for (int k = 0; k < n; ++k) {
    double xi, xip;
    accumulate_xi(pr, g, fv, rho_lo + k * drho, xi, xip);
    tbl.xi[k] = xi;
    tbl.xip[k] = xip;
  }
  tbl.c3_tail = tbl.xi[n - 1] / eval_w(pr, tbl.rho_hi());
  return tbl;
}

double eval_xi(const XiTable& tbl, const Profile& pr, double rho) {
  require(rho >= tbl.rho0, ErrorKind::BadConfig, "interaction distance below xi table range");
  if (rho >= tbl.rho_hi()) return tbl.c3_tail * eval_w(pr, rho);
  const double s = (rho - tbl.rho0) / tbl.drho;
  int k = std::min(static_cast<int>(s), static_cast<int>(tbl.xi.size()) - 2);
  const double tt = s - k;
  return hermite_val(tbl.xi[k], tbl.xi[k + 1], tbl.xip[k], tbl.xip[k + 1], tbl.drho, tt);
}

double eval_xi_prime(const XiTable& tbl, const Profile& pr, double rho) {
  require(rho >= tbl.rho0, ErrorKind::BadConfig, "interaction distance below xi table range");
  if (rho >= tbl.rho_hi()) return tbl.c3_tail * eval_w_prime(pr, rho);
  const double s = (rho - tbl.rho0) / tbl.drho;
  int k = std::min(static_cast<int>(s), static_cast<int>(tbl.xi.size()) - 2);
  const double tt = s - k;
  return hermite_der(tbl.xi[k], tbl.xi[k + 1], tbl.xip[k], tbl.xip[k + 1], tbl.drho, tt);
}

}  // namespace spikes
