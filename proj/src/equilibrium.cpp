#include "spikes/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "spikes/errors.hpp"

namespace spikes {
namespace {

// uniform in [0,1) straight from the generator words, so results do not
// depend on the standard library's distribution internals
double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t encode_edges(const std::vector<std::pair<int, int>>& edges,
                           const std::vector<int>& perm) {
  std::uint64_t h = 0;
  for (const auto& e : edges) {
    int u = perm[static_cast<std::size_t>(e.first)];
    int v = perm[static_cast<std::size_t>(e.second)];
    if (u > v) std::swap(u, v);
    h |= 1ULL << (u * 7 + v);
  }
  return h;
}

std::vector<std::vector<int>> all_permutations(int ell) {
  std::vector<int> idx(static_cast<std::size_t>(ell));
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(idx);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

// canonical labeling by exhaustive relabeling (cheap for ell <= 7)
std::uint64_t canonical_hash(const std::vector<std::pair<int, int>>& edges,
                             const std::vector<std::vector<int>>& perms) {
  std::uint64_t best = ~0ULL;
  for (const auto& p : perms) best = std::min(best, encode_edges(edges, p));
  return best;
}

std::vector<std::pair<int, int>> decode_edges(std::uint64_t h, int ell) {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < ell; ++u)
    for (int v = u + 1; v < ell; ++v)
      if (h & (1ULL << (u * 7 + v))) out.emplace_back(u, v);
  return out;
}

std::vector<int> degree_sequence(const std::vector<std::pair<int, int>>& edges, int ell) {
  std::vector<int> deg(static_cast<std::size_t>(ell), 0);
  for (const auto& e : edges) {
    ++deg[static_cast<std::size_t>(e.first)];
    ++deg[static_cast<std::size_t>(e.second)];
  }
  std::sort(deg.begin(), deg.end());
  return deg;
}

// one repulsion/attraction sweep followed by a Gauss-Newton polish of the
// active contacts; returns false if the polish lands below 1 - tol
bool relax_to_contacts(Eigen::MatrixXd& Q, std::mt19937_64& rng) {
  const int d = static_cast<int>(Q.rows());
  const int ell = static_cast<int>(Q.cols());
  (void)rng;
  const int sweeps = 350;
  for (int it = 0; it < sweeps; ++it) {
    const double frac = static_cast<double>(it) / sweeps;
    const double capture = 0.5 - 0.42 * frac;
    const double lr = 0.25 - 0.20 * frac;
    Eigen::MatrixXd force = Eigen::MatrixXd::Zero(d, ell);
    for (int i = 0; i < ell; ++i) {
      for (int j = i + 1; j < ell; ++j) {
        Eigen::VectorXd diff = Q.col(i) - Q.col(j);
        const double dist = diff.norm();
        if (dist < 1e-12) continue;
        double mag = 0.0;
        if (dist < 1.0)
          mag = 1.2 * (1.0 - dist);  // repel below contact distance
        else if (dist < 1.0 + capture)
          mag = -0.35 * (dist - 1.0);  // attract near misses
        force.col(i) += mag * diff / dist;
        force.col(j) -= mag * diff / dist;
      }
    }
    Q += lr * force;
  }

  // Gauss-Newton on the active contact residuals
  for (int gn = 0; gn < 15; ++gn) {
    std::vector<std::pair<int, int>> active;
    for (int i = 0; i < ell; ++i)
      for (int j = i + 1; j < ell; ++j) {
        const double dist = (Q.col(i) - Q.col(j)).norm();
        if (std::abs(dist - 1.0) <= 0.12) active.emplace_back(i, j);
      }
    if (active.empty()) break;
    const int m = static_cast<int>(active.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, d * ell);
    Eigen::VectorXd r(m);
    double worst = 0.0;
    for (int e = 0; e < m; ++e) {
      const auto [i, j] = active[static_cast<std::size_t>(e)];
      Eigen::VectorXd diff = Q.col(i) - Q.col(j);
      const double dist = diff.norm();
      r[e] = dist - 1.0;
      worst = std::max(worst, std::abs(r[e]));
      J.block(e, d * i, 1, d) = (diff / dist).transpose();
      J.block(e, d * j, 1, d) = -(diff / dist).transpose();
    }
    if (worst <= 1e-12) break;
    Eigen::MatrixXd H = J.transpose() * J;
    H.diagonal().array() += 1e-10;
    Eigen::VectorXd step = H.ldlt().solve(-J.transpose() * r);
    for (int i = 0; i < ell; ++i) Q.col(i) += step.segment(d * i, d);
  }

  for (int i = 0; i < ell; ++i)
    for (int j = i + 1; j < ell; ++j)
      if ((Q.col(i) - Q.col(j)).norm() < 1.0 - 1e-6) return false;
  return true;
}

// Euclidean projection onto the simplex {t >= 0, sum t = 1}
Eigen::VectorXd project_simplex(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  std::vector<double> s(u.data(), u.data() + n);
  std::sort(s.begin(), s.end(), std::greater<double>());
  double cum = 0.0, lam = 0.0;
  int rho = 0;
  for (int k = 0; k < n; ++k) {
    cum += s[static_cast<std::size_t>(k)];
    const double cand = (cum - 1.0) / (k + 1);
    if (s[static_cast<std::size_t>(k)] - cand > 0.0) {
      rho = k + 1;
      lam = cand;
    }
  }
  (void)rho;
  return (u.array() - lam).max(0.0);
}

}  // namespace

UnitConfig contact_graph(const Eigen::MatrixXd& points, double tol) {
  UnitConfig uc;
  uc.dimension = static_cast<int>(points.rows());
  uc.points = points;
  uc.tol = tol;
  require(uc.dimension == 2 || uc.dimension == 3, ErrorKind::BadConfig,
          "points must be planar or spatial");
  const int ell = uc.ell();
  for (int i = 0; i < ell; ++i) {
    for (int j = i + 1; j < ell; ++j) {
      const double d = (points.col(i) - points.col(j)).norm();
      require(d >= 1.0 - tol, ErrorKind::TooClose, "pair below unit distance");
      if (d <= 1.0 + tol) uc.edges.emplace_back(i, j);
    }
  }
  return uc;
}

Eigen::MatrixXd balance_matrix(const UnitConfig& uc) {
  const int d = uc.dimension;
  const int m = static_cast<int>(uc.edges.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d * uc.ell(), m);
  for (int e = 0; e < m; ++e) {
    const auto [i, j] = uc.edges[static_cast<std::size_t>(e)];
    Eigen::VectorXd diff = uc.points.col(i) - uc.points.col(j);
    const Eigen::VectorXd u = diff / diff.norm();
    A.block(d * i, e, d, 1) = u;
    A.block(d * j, e, d, 1) = -u;
  }
  return A;
}

BalanceKernel balance_kernel(const UnitConfig& uc) {
  require(!uc.edges.empty(), ErrorKind::BadConfig, "configuration has no contacts");
  const Eigen::MatrixXd A = balance_matrix(uc);
  const int m = static_cast<int>(A.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cut = 1e-8 * sv[0];
  BalanceKernel ker;
  std::vector<int> keep;
  for (int c = 0; c < m; ++c) {
    const double s = c < sv.size() ? sv[c] : 0.0;
    if (s <= cut) keep.push_back(c);
  }
  ker.dim = static_cast<int>(keep.size());
  ker.basis.resize(m, ker.dim);
  for (int c = 0; c < ker.dim; ++c)
    ker.basis.col(c) = svd.matrixV().col(keep[static_cast<std::size_t>(c)]);
  return ker;
}

DilationIdentity dilation_value(const UnitConfig& uc, const Eigen::VectorXd& a) {
  require(a.size() == static_cast<Eigen::Index>(uc.edges.size()), ErrorKind::DimensionMismatch,
          "one weight per contact edge");
  DilationIdentity out;
  const int d = uc.dimension;
  Eigen::MatrixXd bal = Eigen::MatrixXd::Zero(d, uc.ell());
  for (std::size_t e = 0; e < uc.edges.size(); ++e) {
    const auto [i, j] = uc.edges[e];
    Eigen::VectorXd diff = uc.points.col(i) - uc.points.col(j);
    const double dist = diff.norm();
    out.value += a[static_cast<Eigen::Index>(e)] * dist;
    const Eigen::VectorXd u = diff / dist;
    bal.col(i) += a[static_cast<Eigen::Index>(e)] * u;
    bal.col(j) -= a[static_cast<Eigen::Index>(e)] * u;
  }
  for (int i = 0; i < uc.ell(); ++i) out.contraction += bal.col(i).dot(uc.points.col(i));
  return out;
}

UnitConfig hexagon_with_center() {
  Eigen::MatrixXd pts(2, 7);
  pts.col(0).setZero();
  for (int k = 0; k < 6; ++k) {
    const double th = M_PI / 3.0 * k;
    pts.col(k + 1) << std::cos(th), std::sin(th);
  }
  return contact_graph(pts, 1e-9);
}

std::vector<GraphClass> search_equilibria(int ell, int dim, int trials, std::uint64_t seed) {
  require(ell >= 2 && ell <= 7, ErrorKind::BadConfig, "ell must lie in [2,7]");
  require(dim == 2 || dim == 3, ErrorKind::BadConfig, "dimension must be 2 or 3");
  require(trials > 0, ErrorKind::BadConfig, "need at least one trial");

  const std::vector<std::vector<int>> perms = all_permutations(ell);
  std::map<std::uint64_t, std::uint64_t> canon_memo;  // raw labeling -> canonical
  std::map<std::uint64_t, GraphClass> classes;
  const double side = 1.4 * std::sqrt(static_cast<double>(ell));

  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(t));
    Eigen::MatrixXd Q(dim, ell);
    for (int c = 0; c < ell; ++c)
      for (int r = 0; r < dim; ++r) Q(r, c) = side * (u01(rng) - 0.5);
    if (!relax_to_contacts(Q, rng)) continue;

    std::vector<std::pair<int, int>> edges;
    bool ok = true;
    for (int i = 0; i < ell && ok; ++i)
      for (int j = i + 1; j < ell; ++j) {
        const double d = (Q.col(i) - Q.col(j)).norm();
        if (d < 1.0 - 1e-6) {
          ok = false;
          break;
        }
        if (d <= 1.0 + 1e-6) edges.emplace_back(i, j);
      }
    if (!ok || edges.empty()) continue;

    const std::uint64_t raw = encode_edges(edges, perms[0]);
    auto memo = canon_memo.find(raw);
    std::uint64_t canon;
    if (memo != canon_memo.end()) {
      canon = memo->second;
    } else {
      canon = canonical_hash(edges, perms);
      canon_memo.emplace(raw, canon);
    }

    auto cls = classes.find(canon);
    if (cls != classes.end()) {
      ++cls->second.count;
      continue;
    }
    GraphClass gc;
    gc.hash = canon;
    gc.edges = decode_edges(canon, ell);
    gc.degrees = degree_sequence(gc.edges, ell);
    gc.count = 1;
    gc.example_points = Q;
    gc.kernel_dim = balance_kernel(contact_graph(Q, 1e-6)).dim;
    classes.emplace(canon, std::move(gc));
  }

  std::vector<GraphClass> out;
  out.reserve(classes.size());
  for (auto& kv : classes) out.push_back(std::move(kv.second));
  std::sort(out.begin(), out.end(), [](const GraphClass& a, const GraphClass& b) {
    if (a.edges.size() != b.edges.size()) return a.edges.size() < b.edges.size();
    return a.hash < b.hash;
  });
  return out;
}

SignFeasibility sign_constrained_kernel(const UnitConfig& uc, const std::vector<int>& taus,
                                        int angles) {
  require(!uc.edges.empty(), ErrorKind::BadConfig, "configuration has no contacts");
  require(taus.size() == static_cast<std::size_t>(uc.ell()), ErrorKind::DimensionMismatch,
          "one sign per point");
  require(angles >= 4, ErrorKind::BadConfig, "sweep needs at least 4 angles");

  const Eigen::MatrixXd A = balance_matrix(uc);
  const int m = static_cast<int>(A.cols());
  const double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()[0];

  SignFeasibility best;
  best.residual = std::numeric_limits<double>::infinity();
  best.weights = Eigen::VectorXd::Zero(m);

  for (int k = 0; k < angles; ++k) {
    const double th = 2.0 * M_PI * k / angles;
    const double mu1 = std::cos(th), mu2 = std::sin(th);
    // a_e = c_e b_e with b_e >= 0: edges with c_e = 0 cannot carry weight,
    // the rest contribute sign(c_e) * t_e with t on the simplex
    std::vector<int> live;
    Eigen::VectorXd sgn(m);
    for (int e = 0; e < m; ++e) {
      const auto [i, j] = uc.edges[static_cast<std::size_t>(e)];
      const double c = mu2 - mu1 * taus[static_cast<std::size_t>(i)] *
                                 taus[static_cast<std::size_t>(j)];
      if (std::abs(c) < 1e-12) continue;
      sgn[e] = c > 0.0 ? 1.0 : -1.0;
      live.push_back(e);
    }
    if (live.empty()) continue;
    const int ml = static_cast<int>(live.size());
    Eigen::MatrixXd As(A.rows(), ml);
    for (int c = 0; c < ml; ++c) {
      const int e = live[static_cast<std::size_t>(c)];
      As.col(c) = A.col(e) * sgn[e];
    }
    const double L = As.squaredNorm();  // Frobenius bound on the Lipschitz constant
    Eigen::VectorXd t = Eigen::VectorXd::Constant(ml, 1.0 / ml);
    for (int it = 0; it < 600; ++it) {
      Eigen::VectorXd g = 2.0 * (As.transpose() * (As * t));
      t = project_simplex(t - g / (2.0 * L));
      if ((As * t).norm() <= 1e-12 * smax) break;
    }
    const double res = (As * t).norm();
    if (res < best.residual) {
      best.residual = res;
      best.mu1 = mu1;
      best.mu2 = mu2;
      best.weights.setZero();
      for (int c = 0; c < ml; ++c) {
        const int e = live[static_cast<std::size_t>(c)];
        best.weights[e] = sgn[e] * t[c];
      }
    }
  }
  best.feasible = best.residual <= 1e-8 * smax;
  return best;
}

}  // namespace spikes
