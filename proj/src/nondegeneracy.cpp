#include "spikes/nondegeneracy.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

#include "spikes/errors.hpp"

namespace spikes {
namespace {

// Flux-form discretization on cell centers r_i = (i+1/2)h. The face weight
// r^{N-1} vanishes at r=0 for N >= 2, which encodes the regularity condition;
// for N = 1 the parity of the mode sets the r=0 face (Neumann for even,
// Dirichlet by reflection for odd). Dirichlet at r = R. The diagonal
// similarity by sqrt(r_i^{N-1}) makes the matrix symmetric tridiagonal.
struct ModeMatrix {
  Eigen::VectorXd diag, sub, weight;  // weight_i = r_i^{N-1}
  double h = 0.0;
};

ModeMatrix assemble_mode(const Profile& pr, int m, double R, int ne) {
  const int N = pr.dim;
  const double h = R / ne;
  ModeMatrix mm;
  mm.h = h;
  mm.diag.resize(ne);
  mm.sub.resize(ne - 1);
  mm.weight.resize(ne);
  auto face = [&](int j) { return N == 1 ? 1.0 : std::pow(j * h, N - 1); };
  const double cent = static_cast<double>(m) * (m + N - 2);
  for (int i = 0; i < ne; ++i)
    mm.weight[i] = N == 1 ? 1.0 : std::pow((i + 0.5) * h, N - 1);
  for (int i = 0; i < ne; ++i) {
    const double r = (i + 0.5) * h;
    double q = -1.0 + pr.nl.fprime(eval_w(pr, r));
    if (cent != 0.0) q -= cent / (r * r);
    double sl = face(i), sr = face(i + 1);
    if (i == 0 && N == 1) sl = (m % 2 == 0) ? 0.0 : 2.0 * sl;
    if (i == ne - 1) sr = 2.0 * sr;
    mm.diag[i] = q - (sl + sr) / (h * h * mm.weight[i]);
    if (i + 1 < ne)
      mm.sub[i] = face(i + 1) / (h * h * std::sqrt(mm.weight[i] * mm.weight[i + 1]));
  }
  return mm;
}

Eigen::VectorXd eigenvalues_of(const ModeMatrix& mm) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(mm.diag, mm.sub, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Inverse iteration near the given shift; returns the eigenvector in the
// original (unsimilar) variables u_i = v_i / sqrt(weight_i). The shift is
// nudged off the computed eigenvalue so the factorization stays regular;
// the spectral gap is O(1), so convergence is still immediate.
Eigen::VectorXd inverse_iterate(const ModeMatrix& mm, double shift) {
  const int n = static_cast<int>(mm.diag.size());
  Eigen::SparseMatrix<double> T(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * n);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (double nudge : {1e-8, 1e-5}) {
    trip.clear();
    const double sh = shift + nudge * (1.0 + std::abs(shift));
    for (int i = 0; i < n; ++i) {
      trip.emplace_back(i, i, mm.diag[i] - sh);
      if (i + 1 < n) {
        trip.emplace_back(i, i + 1, mm.sub[i]);
        trip.emplace_back(i + 1, i, mm.sub[i]);
      }
    }
    T.setFromTriplets(trip.begin(), trip.end());
    lu.compute(T);
    if (lu.info() == Eigen::Success) break;
  }
  require(lu.info() == Eigen::Success, ErrorKind::NondegeneracyFailed,
          "inverse iteration factorization failed");
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  for (int it = 0; it < 8; ++it) {
    v = lu.solve(v);
    v.normalize();
  }
  for (int i = 0; i < n; ++i) v[i] /= std::sqrt(mm.weight[i]);
  return v;
}

}  // namespace

NondegeneracyReport verify_nondegeneracy(const Profile& pr, double R, int ne) {
  require(R > 4.0 && ne >= 64, ErrorKind::BadConfig, "nondegeneracy grid too coarse");
  NondegeneracyReport rep;
  rep.grid_points = ne;
  rep.radius = R;

  const ModeMatrix m0 = assemble_mode(pr, 0, R, ne);
  rep.lambda_mode0 = eigenvalues_of(m0).cwiseAbs().minCoeff();

  const ModeMatrix m1 = assemble_mode(pr, 1, R, ne);
  int idx = 0;
  const Eigen::VectorXd ev1 = eigenvalues_of(m1);
  ev1.cwiseAbs().minCoeff(&idx);
  rep.lambda_mode1 = std::abs(ev1[idx]);

  const Eigen::VectorXd u = inverse_iterate(m1, ev1[idx]);
  double uu = 0.0, ww = 0.0, uw = 0.0;
  for (int i = 0; i < ne; ++i) {
    const double r = (i + 0.5) * m1.h;
    const double wp = eval_w_prime(pr, r);
    uu += m1.weight[i] * u[i] * u[i];
    ww += m1.weight[i] * wp * wp;
    uw += m1.weight[i] * u[i] * wp;
  }
  rep.overlap_mode1 = std::abs(uw) / std::sqrt(uu * ww);

  require(rep.lambda_mode1 <= 1e-4, ErrorKind::NondegeneracyFailed,
          "translation eigenvalue not near zero");
  require(rep.overlap_mode1 >= 0.999, ErrorKind::NondegeneracyFailed,
          "mode-1 null vector not aligned with w'");
  require(rep.lambda_mode0 >= 0.1, ErrorKind::NondegeneracyFailed,
          "mode-0 spectrum too close to zero");
  return rep;
}

}  // namespace spikes
