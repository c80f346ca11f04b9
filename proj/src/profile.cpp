#include "spikes/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "spikes/errors.hpp"
#include "spikes/ode.hpp"

namespace spikes {
namespace {

using Vec2 = Eigen::Vector2d;

struct Rhs {
  int dim;
  const Nonlinearity* nl;
  Vec2 operator()(double r, const Vec2& y) const {
    double damp = (dim > 1 && r > 0.0) ? (dim - 1) / r * y[1] : 0.0;
    return Vec2(y[1], -damp + y[0] - nl->f(y[0]));
  }
};

// Series start at r = delta removes the coordinate singularity:
// w(r) ~ w0 + (w0 - f(w0)) r^2 / (2N).
Vec2 series_start(double w0, int dim, const Nonlinearity& nl, double delta) {
  double c = (w0 - nl.f(w0)) / dim;
  return Vec2(w0 + 0.5 * c * delta * delta, c * delta);
}

enum class Shot { Cross, Turn };

// Classify the forward trajectory from w(0) = w0: monotone decay to zero is
// the separatrix; larger w0 crosses zero (undershoot), smaller w0 turns
// around below the constant solution w = 1 or drifts back up (overshoot).
Shot classify(double w0, int dim, const Nonlinearity& nl) {
  const double delta = 1e-4, rmax = 40.0;
  Dopri5<2> ode(1e-18, 1e-12);
  ode.start(delta, series_start(w0, dim, nl, delta), 1e-3);
  Rhs rhs{dim, &nl};
  double r = delta;
  while (r < rmax) {
    double rnext = std::min(r + 0.2, rmax);
    if (!ode.integrate_to(rnext, rhs)) break;
    r = ode.t();
    const Vec2& y = ode.y();
    if (y[0] <= 0.0) return Shot::Cross;
    if (y[1] > 0.0 && y[0] < 0.9) return Shot::Turn;
    if (y[0] > 3.0 * w0) return Shot::Turn;
  }
  return Shot::Turn;  // never crossed
}

double bisect_w0(int dim, const Nonlinearity& nl) {
  double lo = 0.0, hi = 0.0;
  double cand = 1.2;
  while (cand < 1000.0) {
    if (classify(cand, dim, nl) == Shot::Cross) {
      hi = cand;
      break;
    }
    lo = cand;
    cand *= 1.5;
  }
  require(hi > 0.0 && lo > 0.0, ErrorKind::NoGroundState,
          "no shooting bracket in w(0) <= 1000");
  while (hi - lo > 8.0 * std::numeric_limits<double>::epsilon() * hi) {
    double mid = 0.5 * (lo + hi);
    (classify(mid, dim, nl) == Shot::Cross ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Corrected tail shape r^{-nu} e^{-r} (1 + a1/r), a1 = nu(nu-1)/2. Used only
// to seed the inward integration; the stored amplitude is matched at r_star
// against the uncorrected law that eval_w uses.
double tail_shape(double r, double nu) {
  double a1 = 0.5 * nu * (nu - 1.0);
  return std::pow(r, -nu) * std::exp(-r) * (1.0 + a1 / r);
}
double tail_shape_prime(double r, double nu) {
  double a1 = 0.5 * nu * (nu - 1.0);
  return -std::pow(r, -nu) * std::exp(-r) *
         (1.0 + a1 / r + nu / r * (1.0 + a1 / r) + a1 / (r * r));
}

struct Table {
  std::vector<double> w, wp;
};

// Fill nodes k_from..k_to (descending) by integrating inward from the tail
// seed A * tail_shape(r_far). The growing mode is stable in this direction,
// so the trajectory relaxes onto the decaying solution; only the amplitude
// remains free and is fitted by the caller.
void fill_inward(Table& t, double A, int k_far, int k_to, double h, int dim,
                 const Nonlinearity& nl, double nu) {
  double r_far = k_far * h;
  Dopri5<2> ode(1e-300, 1e-13);
  ode.start(r_far, Vec2(A * tail_shape(r_far, nu), A * tail_shape_prime(r_far, nu)), -1e-3);
  Rhs rhs{dim, &nl};
  if ((int)t.w.size() <= k_far) {
    t.w.resize(k_far + 1, 0.0);
    t.wp.resize(k_far + 1, 0.0);
  }
  t.w[k_far] = ode.y()[0];
  t.wp[k_far] = ode.y()[1];
  for (int k = k_far - 1; k >= k_to; --k) {
    bool ok = ode.integrate_to(k * h, rhs);
    require(ok, ErrorKind::ToleranceNotReached, "inward integration stalled");
    t.w[k] = ode.y()[0];
    t.wp[k] = ode.y()[1];
  }
}

}  // namespace

Profile solve_profile(int dim, const Nonlinearity& nl, double tol) {
  require(dim >= 1 && dim <= 3, ErrorKind::BadConfig, "dimension must be 1, 2 or 3");
  require(tol > 0.0, ErrorKind::BadConfig, "tol must be positive");
  if (dim == 3)
    require(nl.p < 6.0, ErrorKind::BadConfig, "need p < 2N/(N-2) = 6 for N = 3");

  const double w0 = bisect_w0(dim, nl);
  const double nu = 0.5 * (dim - 1);
  const double w_splice = 0.1;  // hand over to inward integration here

  double h = std::clamp(1.4 * std::sqrt(tol), 1e-4, 4e-3);
  for (int refine = 0;; ++refine) {
    // Forward fill on the uniform grid until w drops below the splice level.
    // Beyond that the growing mode contaminates a forward trajectory faster
    // than bisection accuracy can pay for.
    Table t;
    t.w.push_back(w0);
    t.wp.push_back(0.0);
    {
      const double delta = 1e-4;
      Dopri5<2> ode(1e-18, 1e-13);
      ode.start(delta, series_start(w0, dim, nl, delta), 1e-4);
      Rhs rhs{dim, &nl};
      for (int k = 1;; ++k) {
        bool ok = ode.integrate_to(k * h, rhs);
        require(ok, ErrorKind::ToleranceNotReached, "forward integration stalled");
        t.w.push_back(ode.y()[0]);
        t.wp.push_back(ode.y()[1]);
        if (ode.y()[0] < w_splice) break;
        require(k < 4000000, ErrorKind::NoGroundState, "profile does not decay");
      }
    }
    const int k_splice = (int)t.w.size() - 1;
    const double w_f = t.w[k_splice];

    // Tail amplitude estimate, switch radius target, inward seed radius.
    double A_est = w_f / tail_shape(k_splice * h, nu);
    double r_star_t = std::log(A_est / 1e-8);
    for (int it = 0; it < 40; ++it) r_star_t = std::log(A_est / 1e-8) - nu * std::log(r_star_t);
    int k_far = (int)std::ceil((r_star_t + 7.0) / h);

    // Secant fit of the inward amplitude to the forward value at the splice.
    double A0 = A_est, A1 = A_est * (1.0 + 1e-3);
    Table tin;
    fill_inward(tin, A0, k_far, k_splice, h, dim, nl, nu);
    double m0 = tin.w[k_splice] - w_f;
    double A_fit = A0;
    for (int it = 0; it < 12; ++it) {
      fill_inward(tin, A1, k_far, k_splice, h, dim, nl, nu);
      double m1 = tin.w[k_splice] - w_f;
      if (std::abs(m1) <= 3e-12 * w_f || m1 == m0) {
        A_fit = A1;
        break;
      }
      double A2 = A1 - m1 * (A1 - A0) / (m1 - m0);
      A0 = A1;
      m0 = m1;
      A1 = A_fit = A2;
    }
    fill_inward(tin, A_fit, k_far, k_splice, h, dim, nl, nu);
    require(std::abs(tin.w[k_splice] - w_f) <= 1e-11 * w_f, ErrorKind::ToleranceNotReached,
            "amplitude fit did not close the splice");

    // Assemble: forward part up to the splice node, inward part beyond,
    // truncated at the first node below the switch threshold.
    int K = -1;
    for (int k = k_splice + 1; k <= k_far; ++k)
      if (tin.w[k] < 1e-8) {
        K = k;
        break;
      }
    require(K > 0, ErrorKind::ToleranceNotReached, "switch threshold not reached");

    Profile pr;
    pr.dim = dim;
    pr.nl = nl;
    pr.tol = tol;
    pr.w0 = w0;
    pr.h = h;
    pr.r.resize(K + 1);
    pr.w.resize(K + 1);
    pr.wp.resize(K + 1);
    for (int k = 0; k <= K; ++k) {
      pr.r[k] = k * h;
      if (k <= k_splice) {
        pr.w[k] = t.w[k];
        pr.wp[k] = t.wp[k];
      } else {
        pr.w[k] = tin.w[k];
        pr.wp[k] = tin.wp[k];
      }
    }
    pr.rstar = pr.r[K];
    pr.A = pr.w[K] / (std::pow(pr.rstar, -nu) * std::exp(-pr.rstar));

    // Verify: strict decay and the ODE residual of the first-order system
    // (w, w'), centered differences on the node grid. Differencing the
    // stored slope keeps integrator noise at O(delta/h); a second
    // difference of w would amplify it by another 1/h.
    bool shape_ok = true;
    for (int k = 0; k < K && shape_ok; ++k)
      shape_ok = pr.w[k] > pr.w[k + 1] && pr.w[k + 1] > 0.0 && (k == 0 || pr.wp[k] < 0.0);
    double res_max = 0.0;
    for (int k = 1; k < K; ++k) {
      double dwp = (pr.wp[k + 1] - pr.wp[k - 1]) / (2.0 * h);
      double dw = (pr.w[k + 1] - pr.w[k - 1]) / (2.0 * h);
      double damp = dim > 1 ? (dim - 1) / pr.r[k] * pr.wp[k] : 0.0;
      double res = std::max(std::abs(dwp + damp - pr.w[k] + nl.f(pr.w[k])),
                            std::abs(dw - pr.wp[k]));
      res_max = std::max(res_max, res);
    }
    if (shape_ok && res_max <= tol * w0) return pr;
    require(refine < 2, ErrorKind::ToleranceNotReached,
            "FD residual " + std::to_string(res_max) + " above tol after refinement");
    h *= 0.5;
  }
}

namespace {

// Cubic Hermite basis on the segment containing r; exactness of the
// derivative evaluator below relies on differentiating this same form.
struct Seg {
  int k;
  double t, h;
};
Seg locate(const Profile& pr, double r) {
  int k = (int)(r / pr.h);
  if (k >= (int)pr.w.size() - 1) k = (int)pr.w.size() - 2;
  return Seg{k, (r - pr.r[k]) / pr.h, pr.h};
}

}  // namespace

double eval_w(const Profile& pr, double r) {
  r = std::max(r, 0.0);
  if (r >= pr.rstar) return pr.A * std::pow(r, -pr.nu()) * std::exp(-r);
  Seg s = locate(pr, r);
  double t = s.t, t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * pr.w[s.k] + (t3 - 2 * t2 + t) * s.h * pr.wp[s.k] +
         (-2 * t3 + 3 * t2) * pr.w[s.k + 1] + (t3 - t2) * s.h * pr.wp[s.k + 1];
}

double eval_w_prime(const Profile& pr, double r) {
  r = std::max(r, 0.0);
  if (r >= pr.rstar) {
    double nu = pr.nu();
    return -pr.A * std::exp(-r) * std::pow(r, -nu) * (1.0 + nu / r);
  }
  Seg s = locate(pr, r);
  double t = s.t, t2 = t * t;
  return ((6 * t2 - 6 * t) * pr.w[s.k] + (-6 * t2 + 6 * t) * pr.w[s.k + 1]) / s.h +
         (3 * t2 - 4 * t + 1) * pr.wp[s.k] + (3 * t2 - 2 * t) * pr.wp[s.k + 1];
}

double decay_amplitude(const Profile& pr) {
  const int K = (int)pr.w.size() - 1;
  require(pr.w[K] < 1e-8, ErrorKind::NoPlateau, "table does not reach w < 1e-8");
  int k0 = K;
  while (k0 > 0 && pr.w[k0 - 1] < 1e-7) --k0;
  double nu = pr.nu();
  double gmin = 1e300, gmax = -1e300, gsum = 0.0;
  for (int k = k0; k <= K; ++k) {
    double g = pr.w[k] * std::pow(pr.r[k], nu) * std::exp(pr.r[k]);
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
    gsum += g;
  }
  double mean = gsum / (K - k0 + 1);
  require((gmax - gmin) / mean <= 1e-2, ErrorKind::NoPlateau,
          "tail amplitude plateau flatness above 1e-2");
  return mean;
}

void save_profile(const Profile& pr, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::BadConfig, "cannot open " + path + " for writing");
  char buf[256];
  std::snprintf(buf, sizeof buf, "# spike-cluster profile v1, %d, %.17g, %.17g, %.17g, %.17g\n",
                pr.dim, pr.nl.p, pr.w0, pr.A, pr.rstar);
  out << buf;
  for (int k = 0; k < (int)pr.w.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", pr.r[k], pr.w[k], pr.wp[k]);
    out << buf;
  }
  require(out.good(), ErrorKind::BadConfig, "short write to " + path);
}

Profile load_profile(const std::string& path, double tol) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::CacheMiss, "no profile cache at " + path);
  std::string header;
  std::getline(in, header);
  Profile pr;
  double p = 0.0;
  int got = std::sscanf(header.c_str(), "# spike-cluster profile v1, %d, %lg, %lg, %lg, %lg",
                        &pr.dim, &p, &pr.w0, &pr.A, &pr.rstar);
  require(got == 5, ErrorKind::BadConfig, "unrecognized profile cache header in " + path);
  pr.nl = make_nonlinearity(p);
  pr.tol = tol;
  std::vector<double> r, w, wp;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double a, b, c;
    require(std::sscanf(line.c_str(), "%lg,%lg,%lg", &a, &b, &c) == 3, ErrorKind::BadConfig,
            "bad profile cache row: " + line);
    r.push_back(a);
    w.push_back(b);
    wp.push_back(c);
  }
  require(r.size() >= 3, ErrorKind::BadConfig, "profile cache too short");
  pr.r = Eigen::Map<Eigen::VectorXd>(r.data(), r.size());
  pr.w = Eigen::Map<Eigen::VectorXd>(w.data(), w.size());
  pr.wp = Eigen::Map<Eigen::VectorXd>(wp.data(), wp.size());
  pr.h = pr.r[1] - pr.r[0];
  return pr;
}

std::string profile_cache_name(int dim, double p, double tol) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "profile_N%d_p%g_tol%g.csv", dim, p, tol);
  return buf;
}

}  // namespace spikes
