#include "spikes/lspde.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>

#include "spikes/errors.hpp"

namespace spikes {
namespace {

void check_resolution(const Grid& g, double eps) {
  require(g.h() <= eps / 8.0 + 1e-15, ErrorKind::UnderResolved,
          "grid spacing exceeds eps/8");
}

double clearance_needed(double eps) { return 5.0 * eps * std::log(1.0 / eps); }

// quintic smoothstep: 1 on [0,r0], 0 on [r1,inf), C^2 across both joints
double chi_of_t(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double dchi_of_t(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double u = 1.0 - t;
  return -30.0 * t * t * u * u;
}

struct Cutoff {
  double r0, r1;
  double val(double s) const { return chi_of_t((s - r0) / (r1 - r0)); }
  double der(double s) const { return dchi_of_t((s - r0) / (r1 - r0)) / (r1 - r0); }
};

Cutoff cutoff_for(const LSParameters& ps, double L) {
  return Cutoff{ps.r0_frac * L, ps.r1_frac * L};
}

int interior_size(const Grid& g) { return (g.n - 2) * (g.n - 2); }

int interior_index(const Grid& g, int i, int j) { return (i - 1) * (g.n - 2) + (j - 1); }

Eigen::VectorXd to_interior(const GridField& f) {
  const int n = f.g.n;
  Eigen::VectorXd v(interior_size(f.g));
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j) v[interior_index(f.g, i, j)] = f.at(i, j);
  return v;
}

GridField from_interior(const Grid& g, const Eigen::VectorXd& v) {
  GridField f = zero_field(g);
  for (int i = 1; i < g.n - 1; ++i)
    for (int j = 1; j < g.n - 1; ++j) f.at(i, j) = v[interior_index(g, i, j)];
  return f;
}

// -eps^2 Lap_5 + V + shift(x); shift carries the -f'(v) part of the
// linearization (empty = SPD preconditioner)
Eigen::SparseMatrix<double> assemble_operator(const Grid& g, double eps,
                                              const SaddlePotential& pot,
                                              const Eigen::VectorXd* shift) {
  const int n = g.n;
  const int m = interior_size(g);
  const double k = eps * eps / (g.h() * g.h());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * 5);
  Eigen::Vector2d x;
  for (int i = 1; i < n - 1; ++i) {
    for (int j = 1; j < n - 1; ++j) {
      const int row = interior_index(g, i, j);
      x << g.x(i), g.y(j);
      double diag = 4.0 * k + pot.V(x);
      if (shift) diag += (*shift)[row];
      trip.emplace_back(row, row, diag);
      if (i > 1) trip.emplace_back(row, interior_index(g, i - 1, j), -k);
      if (i < n - 2) trip.emplace_back(row, interior_index(g, i + 1, j), -k);
      if (j > 1) trip.emplace_back(row, interior_index(g, i, j - 1), -k);
      if (j < n - 2) trip.emplace_back(row, interior_index(g, i, j + 1), -k);
    }
  }
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

// preconditioned MINRES for the symmetric indefinite linearization, with the
// SPD part -eps^2 Lap + V as preconditioner (factored once per grid)
struct Minres {
  const Eigen::SparseMatrix<double>* A = nullptr;
  const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>* M = nullptr;
  int max_iter = 4000;
  double rtol = 1e-10;
  mutable int last_iters = 0;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    const int m = static_cast<int>(b.size());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd v_prev = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd v = b;
    Eigen::VectorXd z = M->solve(v);
    double gamma_prev = 1.0;
    double gamma = std::sqrt(v.dot(z));
    if (!(gamma > 0.0)) return x;
    const double gamma0 = gamma;
    double eta = gamma;
    double s_prev = 0.0, s_cur = 0.0;
    double c_prev = 1.0, c_cur = 1.0;
    Eigen::VectorXd w_prev = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd w_cur = Eigen::VectorXd::Zero(m);
    const bool trace = std::getenv("SPIKES_MINRES_DEBUG") != nullptr;
    for (int it = 1; it <= max_iter; ++it) {
      z /= gamma;
      Eigen::VectorXd Az = (*A) * z;
      const double delta = z.dot(Az);
      if (trace && it <= 3)
        std::fprintf(stderr, "minres it=%d gamma=%.3e delta=%.3e Az_max=%.3e\n", it, gamma,
                     delta, Az.cwiseAbs().maxCoeff());
      Eigen::VectorXd v_next = Az - (delta / gamma) * v - (gamma / gamma_prev) * v_prev;
      Eigen::VectorXd z_next = M->solve(v_next);
      const double gamma_next = std::sqrt(std::max(0.0, v_next.dot(z_next)));
      const double a0 = c_cur * delta - c_prev * s_cur * gamma;
      const double a1 = std::sqrt(a0 * a0 + gamma_next * gamma_next);
      const double a2 = s_cur * delta + c_prev * c_cur * gamma;
      const double a3 = s_prev * gamma;
      const double c_next = a0 / a1;
      const double s_next = gamma_next / a1;
      Eigen::VectorXd w_next = (z - a3 * w_prev - a2 * w_cur) / a1;
      x += (c_next * eta) * w_next;
      eta = -s_next * eta;
      last_iters = it;
      if (std::abs(eta) <= rtol * gamma0) return x;
      v_prev.swap(v);
      v.swap(v_next);
      z.swap(z_next);
      gamma_prev = gamma;
      gamma = gamma_next;
      c_prev = c_cur;
      c_cur = c_next;
      s_prev = s_cur;
      s_cur = s_next;
      w_prev.swap(w_cur);
      w_cur.swap(w_next);
      require(gamma > 0.0, ErrorKind::LinearSolveStagnation,
              "MINRES broke down at iteration " + std::to_string(it) + ", relative residual " +
                  std::to_string(std::abs(eta) / gamma0));
    }
    fail(ErrorKind::LinearSolveStagnation,
         "MINRES stalled at relative residual " + std::to_string(std::abs(eta) / gamma0));
  }
};

GridField residual_impl(const GridField& v, double eps, const SaddlePotential& pot,
                        const Nonlinearity& nl) {
  const Grid& g = v.g;
  check_resolution(g, eps);
  const int n = g.n;
  const double k = eps * eps / (g.h() * g.h());
  GridField r = zero_field(g);
  Eigen::Vector2d x;
  for (int i = 1; i < n - 1; ++i) {
    for (int j = 1; j < n - 1; ++j) {
      const double c = v.at(i, j);
      x << g.x(i), g.y(j);
      r.at(i, j) = k * (v.at(i + 1, j) + v.at(i - 1, j) + v.at(i, j + 1) + v.at(i, j - 1) -
                        4.0 * c) -
                   pot.V(x) * c + nl.f(c);
    }
  }
  return r;
}

double max_abs(const GridField& f) {
  double m = 0.0;
  for (double c : f.v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

double cutoff_chi(const LSParameters& ps, double L, double xnorm) {
  return cutoff_for(ps, L).val(xnorm);
}

GridField assemble_ansatz(const SpikeConfig& cfg, const Profile& pr, const LSParameters& ps,
                          const Grid& g) {
  const double eps = ps.epsilon;
  const double need = clearance_needed(eps);
  for (const auto& P : cfg.points) {
    require(P.size() == 2, ErrorKind::DimensionMismatch, "ansatz is two dimensional");
    require(g.L - P.lpNorm<Eigen::Infinity>() >= need, ErrorKind::SpikeNearBoundary,
            "spike too close to the box boundary");
  }
  const Cutoff chi = cutoff_for(ps, g.L);
  GridField u = zero_field(g);
  Eigen::Vector2d x;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      x << g.x(i), g.y(j);
      const double c = chi.val(x.norm());
      if (c == 0.0) continue;
      double s = 0.0;
      for (std::size_t q = 0; q < cfg.points.size(); ++q)
        s += cfg.taus[q] * eval_w(pr, (x - cfg.points[q].head<2>()).norm() / eps);
      u.at(i, j) = c * s;
    }
  }
  return u;
}

GridField residual(const GridField& v, const LSParameters& ps, const SaddlePotential& pot,
                   const Nonlinearity& nl) {
  return residual_impl(v, ps.epsilon, pot, nl);
}

double energy(const GridField& v, const LSParameters& ps, const SaddlePotential& pot,
              const Nonlinearity& nl) {
  const Grid& g = v.g;
  check_resolution(g, ps.epsilon);
  const int n = g.n;
  const double h2 = g.h() * g.h();
  const double e2 = ps.epsilon * ps.epsilon;
  double grad = 0.0, rest = 0.0;
  Eigen::Vector2d x;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = v.at(i, j);
      if (i + 1 < n) {
        const double d = v.at(i + 1, j) - c;
        grad += d * d;
      }
      if (j + 1 < n) {
        const double d = v.at(i, j + 1) - c;
        grad += d * d;
      }
      if (c != 0.0) {
        x << g.x(i), g.y(j);
        rest += h2 * (0.5 * pot.V(x) * c * c - nl.F(c));
      }
    }
  }
  return 0.5 * e2 * grad + rest;
}

std::vector<GridField> z_functions(const SpikeConfig& cfg, const Profile& pr,
                                   const LSParameters& ps, const SaddlePotential& pot,
                                   const Grid& g) {
  const double eps = ps.epsilon;
  check_resolution(g, eps);
  const Cutoff chi = cutoff_for(ps, g.L);
  const int n = g.n;
  const double k = eps * eps / (g.h() * g.h());
  std::vector<GridField> out;
  Eigen::Vector2d x;
  for (std::size_t q = 0; q < cfg.points.size(); ++q) {
    const Eigen::Vector2d P = cfg.points[q].head<2>();
    // analytic d(chi w_P)/dx_n, then the discrete (V - eps^2 Lap_5)
    std::array<GridField, 2> d = {zero_field(g), zero_field(g)};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        x << g.x(i), g.y(j);
        const double s = x.norm();
        const double cv = chi.val(s);
        const double cd = chi.der(s);
        if (cv == 0.0 && cd == 0.0) continue;
        const double r = (x - P).norm();
        const double w = eval_w(pr, r / eps);
        double radial = 0.0;  // chi * w'(r/eps)/eps along the unit offset
        if (r > 1e-14) radial = cv * eval_w_prime(pr, r / eps) / eps / r;
        for (int nn = 0; nn < 2; ++nn) {
          double val = radial * (x[nn] - P[nn]);
          if (cd != 0.0 && s > 1e-14) val += cd * (x[nn] / s) * w;
          d[nn].at(i, j) = val;
        }
      }
    }
    for (int nn = 0; nn < 2; ++nn) {
      GridField z = zero_field(g);
      for (int i = 1; i < n - 1; ++i) {
        for (int j = 1; j < n - 1; ++j) {
          x << g.x(i), g.y(j);
          const double c = d[nn].at(i, j);
          z.at(i, j) = pot.V(x) * c -
                       k * (d[nn].at(i + 1, j) + d[nn].at(i - 1, j) + d[nn].at(i, j + 1) +
                            d[nn].at(i, j - 1) - 4.0 * c);
        }
      }
      out.push_back(std::move(z));
    }
  }
  return out;
}

CorrectionResult projected_solve(const SpikeConfig& cfg, const Profile& pr,
                                 const SaddlePotential& pot, const Nonlinearity& nl,
                                 const LSParameters& ps, const Grid& g, double tol,
                                 JsonlLog* log) {
  const double eps = ps.epsilon;
  check_resolution(g, eps);
  const GridField u = assemble_ansatz(cfg, pr, ps, g);
  const std::vector<GridField> zf = z_functions(cfg, pr, ps, pot, g);
  const int mcon = static_cast<int>(zf.size());
  const int msz = interior_size(g);

  Eigen::MatrixXd Z(msz, mcon);
  for (int c = 0; c < mcon; ++c) Z.col(c) = to_interior(zf[c]);

  // linearization frozen at the ansatz; MINRES solves L y = b with the SPD
  // part as preconditioner
  Eigen::VectorXd ui = to_interior(u);
  Eigen::VectorXd shift(msz);
  for (int r = 0; r < msz; ++r) shift[r] = -nl.fprime(ui[r]);
  const Eigen::SparseMatrix<double> L = assemble_operator(g, eps, pot, &shift);
  const Eigen::SparseMatrix<double> M = assemble_operator(g, eps, pot, nullptr);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> Mfac(M);
  require(Mfac.info() == Eigen::Success, ErrorKind::LinearSolveStagnation,
          "preconditioner factorization failed");
  Minres solver{&L, &Mfac};

  Eigen::MatrixXd Y(msz, mcon);
  for (int c = 0; c < mcon; ++c) Y.col(c) = solver.solve(Z.col(c));
  const Eigen::MatrixXd G = Z.transpose() * Y;
  const Eigen::FullPivLU<Eigen::MatrixXd> Glu(G);
  require(Glu.isInvertible(), ErrorKind::LinearSolveStagnation,
          "constraint Schur complement is singular");

  CorrectionResult res;
  res.gamma_member = in_gamma(cfg, pr, pot);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(msz);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(mcon);

  GridField vfield = u;
  double rn = 0.0;
  bool done = false;
  for (int it = 0; it <= 30; ++it) {
    GridField rf = residual_impl(vfield, eps, pot, nl);
    Eigen::VectorXd r = to_interior(rf) - Z * alpha;
    rn = r.lpNorm<Eigen::Infinity>();
    if (log) log->add(it, rn, 1.0);
    res.newton_iterations = it;
    if (rn <= tol) {
      done = true;
      break;
    }
    // the residual Jacobian is -L, so the Newton step solves
    // L dphi + Z dalpha = r with Z^T (phi + dphi) = 0
    Eigen::VectorXd y0 = solver.solve(r);
    Eigen::VectorXd rhs = Z.transpose() * y0 + Z.transpose() * phi;
    Eigen::VectorXd dalpha = Glu.solve(rhs);
    Eigen::VectorXd dphi = y0 - Y * dalpha;
    phi += dphi;
    alpha += dalpha;
    GridField pf = from_interior(g, phi);
    for (Eigen::Index q = 0; q < pf.v.size(); ++q) vfield.v[q] = u.v[q] + pf.v[q];
  }
  require(done, ErrorKind::NewtonDiverged, "projected iteration did not converge");

  // exact Gram projection onto the orthogonal complement of span Z
  const Eigen::MatrixXd Gram = Z.transpose() * Z;
  phi -= Z * Gram.ldlt().solve(Z.transpose() * phi);
  GridField pf = from_interior(g, phi);
  for (Eigen::Index q = 0; q < pf.v.size(); ++q) vfield.v[q] = u.v[q] + pf.v[q];

  // refit multipliers to the final phi and report the true defect
  GridField rf = residual_impl(vfield, eps, pot, nl);
  Eigen::VectorXd ri = to_interior(rf);
  alpha = Gram.ldlt().solve(Z.transpose() * ri);
  res.residual_norm = (ri - Z * alpha).lpNorm<Eigen::Infinity>();

  res.phi = pf;
  res.alphas = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>>(
      alpha.data(), mcon / 2, 2);
  res.orth_defects.resize(mcon);
  const double pn = phi.norm();
  for (int c = 0; c < mcon; ++c) {
    const double zn = Z.col(c).norm();
    res.orth_defects[c] = (pn > 0.0 && zn > 0.0) ? std::abs(phi.dot(Z.col(c))) / (pn * zn) : 0.0;
  }
  return res;
}

double reduced_energy_numeric(const GridField& v, const LSParameters& ps,
                              const SaddlePotential& pot, const Nonlinearity& nl, int ell,
                              double c1_ref) {
  const double e2 = ps.epsilon * ps.epsilon;
  return energy(v, ps, pot, nl) / e2 - ell * c1_ref;
}

GridField newton_solve(const GridField& v0, const SaddlePotential& pot, const Nonlinearity& nl,
                       const LSParameters& ps, double tol, int max_iter, int* steps,
                       JsonlLog* log) {
  const double eps = ps.epsilon;
  const Grid& g = v0.g;
  check_resolution(g, eps);
  const Eigen::SparseMatrix<double> M = assemble_operator(g, eps, pot, nullptr);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> Mfac(M);
  require(Mfac.info() == Eigen::Success, ErrorKind::LinearSolveStagnation,
          "preconditioner factorization failed");

  GridField v = v0;
  const int msz = interior_size(g);
  for (int it = 0; it <= max_iter; ++it) {
    GridField rf = residual_impl(v, eps, pot, nl);
    const double rn = max_abs(rf);
    if (log) log->add(it, rn, 1.0);
    if (rn <= tol) {
      require(max_abs(v) >= 1e-3, ErrorKind::TrivialCollapse,
              "Newton collapsed to the trivial solution");
      if (steps) *steps = it;
      return v;
    }
    require(it < max_iter, ErrorKind::NewtonDiverged, "Newton ran out of iterations");

    Eigen::VectorXd vi = to_interior(v);
    Eigen::VectorXd shift(msz);
    for (int r = 0; r < msz; ++r) shift[r] = -nl.fprime(vi[r]);
    const Eigen::SparseMatrix<double> L = assemble_operator(g, eps, pot, &shift);
    Minres solver{&L, &Mfac};
    Eigen::VectorXd dv = solver.solve(to_interior(rf));

    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 20; ++bt) {
      GridField trial = from_interior(g, vi + t * dv);
      if (max_abs(residual_impl(trial, eps, pot, nl)) < rn) {
        v = trial;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    require(accepted, ErrorKind::NewtonDiverged, "backtracking found no decrease");
  }
  fail(ErrorKind::NewtonDiverged, "Newton ran out of iterations");
}

std::vector<Peak> extract_peaks(const GridField& v, double threshold) {
  const Grid& g = v.g;
  std::vector<Peak> out;
  for (int i = 1; i < g.n - 1; ++i) {
    for (int j = 1; j < g.n - 1; ++j) {
      const double c = std::abs(v.at(i, j));
      if (c < threshold) continue;
      bool top = true;
      for (int di = -1; di <= 1 && top; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (std::abs(v.at(i + di, j + dj)) >= c) {
            top = false;
            break;
          }
        }
      if (!top) continue;
      const double s = v.at(i, j) > 0.0 ? 1.0 : -1.0;
      const double b = s * v.at(i, j);
      const double ax = s * v.at(i - 1, j), cx = s * v.at(i + 1, j);
      const double ay = s * v.at(i, j - 1), cy = s * v.at(i, j + 1);
      const double dx = 0.5 * (ax - cx) / (ax - 2.0 * b + cx);
      const double dy = 0.5 * (ay - cy) / (ay - 2.0 * b + cy);
      Peak p;
      p.pos << g.x(i) + dx * g.h(), g.y(j) + dy * g.h();
      p.sign = v.at(i, j) > 0.0 ? 1 : -1;
      p.height = b - 0.125 * ((ax - cx) * dx + (ay - cy) * dy);
      out.push_back(p);
    }
  }
  return out;
}

double weighted_norm(const GridField& v, const SpikeConfig& cfg, const Profile& pr, double mu) {
  require(mu > 0.0 && mu < std::min(1.0, pr.nl.p - 2.0), ErrorKind::BadConfig,
          "weight exponent must sit in (0, sigma)");
  const Grid& g = v.g;
  double best = 0.0;
  Eigen::Vector2d x;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const double c = std::abs(v.at(i, j));
      if (c == 0.0) continue;
      x << g.x(i), g.y(j);
      double s = 0.0;
      for (std::size_t q = 0; q < cfg.points.size(); ++q)
        s += eval_w(pr, (x - cfg.points[q].head<2>()).norm() / cfg.epsilon);
      best = std::max(best, c / std::pow(s, mu));
    }
  }
  return best;
}

MomentReport moment_check(const SpikeConfig& cfg, int i, const Profile& pr,
                          const SaddlePotential& pot, const ReducedConstants& rc,
                          const LSParameters& ps, const Grid& g) {
  const double eps = ps.epsilon;
  check_resolution(g, eps);
  require(i >= 0 && i < static_cast<int>(cfg.points.size()), ErrorKind::BadConfig,
          "spike index out of range");
  const Eigen::Vector2d P = cfg.points[static_cast<std::size_t>(i)].head<2>();
  const Cutoff chi = cutoff_for(ps, g.L);

  GridField w = zero_field(g);
  Eigen::Vector2d x;
  for (int a = 0; a < g.n; ++a)
    for (int b = 0; b < g.n; ++b) {
      x << g.x(a), g.y(b);
      w.at(a, b) = eval_w(pr, (x - P).norm() / eps);
    }

  // lhs with the centered-difference gradient of the sampled field, so the
  // V = const part telescopes away exactly and the h^2 error is genuine
  MomentReport rep;
  const double h2 = g.h() * g.h();
  for (int a = 1; a < g.n - 1; ++a) {
    for (int b = 1; b < g.n - 1; ++b) {
      x << g.x(a), g.y(b);
      const double cv = chi.val(x.norm());
      if (cv == 0.0) continue;
      const double f = pot.V(x) * cv * cv * w.at(a, b) * h2;
      rep.lhs[0] += f * (w.at(a + 1, b) - w.at(a - 1, b)) / (2.0 * g.h());
      rep.lhs[1] += f * (w.at(a, b + 1) - w.at(a, b - 1)) / (2.0 * g.h());
    }
  }
  rep.rhs = -(eps * eps) * rc.c2 * pot.lambdas().cwiseProduct(P);
  rep.normalized_deviation = (rep.lhs - rep.rhs).norm() / std::pow(eps, 2.0 + cfg.beta);
  return rep;
}

double c1_grid(const Profile& pr, const LSParameters& ps, const Grid& g) {
  check_resolution(g, ps.epsilon);
  const Cutoff chi = cutoff_for(ps, g.L);
  const double eps = ps.epsilon;
  GridField u = zero_field(g);
  Eigen::Vector2d x;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      x << g.x(i), g.y(j);
      const double c = chi.val(x.norm());
      if (c != 0.0) u.at(i, j) = c * eval_w(pr, x.norm() / eps);
    }
  // same discrete energy with V frozen at 1
  const double h2 = g.h() * g.h();
  double grad = 0.0, rest = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double c = u.at(i, j);
      if (i + 1 < g.n) {
        const double d = u.at(i + 1, j) - c;
        grad += d * d;
      }
      if (j + 1 < g.n) {
        const double d = u.at(i, j + 1) - c;
        grad += d * d;
      }
      if (c != 0.0) rest += h2 * (0.5 * c * c - pr.nl.F(c));
    }
  return (0.5 * eps * eps * grad + rest) / (eps * eps);
}

GridField ansatz_defect_field(const SpikeConfig& cfg, const Profile& pr,
                              const SaddlePotential& pot, const Grid& g) {
  GridField d = zero_field(g);
  Eigen::Vector2d x;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      x << g.x(i), g.y(j);
      double wp = 0.0, fsum = 0.0;
      for (std::size_t q = 0; q < cfg.points.size(); ++q) {
        const double w = eval_w(pr, (x - cfg.points[q].head<2>()).norm() / cfg.epsilon);
        wp += cfg.taus[q] * w;
        fsum += cfg.taus[q] * pr.nl.f(w);
      }
      d.at(i, j) = (1.0 - pot.V(x)) * wp + (pr.nl.f(wp) - fsum);
    }
  }
  return d;
}

double weighted_defect_sup(const SpikeConfig& cfg, const Profile& pr, const LSParameters& ps,
                           const SaddlePotential& pot, const Grid& g) {
  const GridField d = ansatz_defect_field(cfg, pr, pot, g);
  const double rin = ps.r0_frac * g.L;
  double best = 0.0;
  Eigen::Vector2d x;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      x << g.x(i), g.y(j);
      if (x.norm() > rin) continue;
      double s = 0.0;
      for (std::size_t q = 0; q < cfg.points.size(); ++q)
        s += eval_w(pr, (x - cfg.points[q].head<2>()).norm() / cfg.epsilon);
      best = std::max(best, std::abs(d.at(i, j)) / std::pow(s, 1.0 - cfg.beta));
    }
  }
  return best;
}

}  // namespace spikes
