#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace spikes {

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
// iteration on the Legendre recurrence (machine precision for n <= 64).
struct GaussRule {
  Eigen::VectorXd x, w;
};

inline const GaussRule& gauss_legendre(int n) {
  static std::vector<GaussRule> cache(65);
  GaussRule& g = cache.at(n);
  if (g.x.size() == n) return g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.x[i] = -x;
    g.x[n - 1 - i] = x;
    g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return g;
}

// Composite Gauss panels over [a,b].
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, int order = 16) {
  const GaussRule& g = gauss_legendre(order);
  double s = 0.0;
  double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * hp;
    double mid = lo + 0.5 * hp, half = 0.5 * hp;
    for (int i = 0; i < order; ++i) s += half * g.w[i] * f(mid + half * g.x[i]);
  }
  return s;
}

inline int panels_for(double a, double b, double width) {
  int n = static_cast<int>(std::ceil((b - a) / width));
  return n < 1 ? 1 : n;
}

// Surface measure of S^{N-1}.
inline double sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * M_PI;
    case 3: return 4.0 * M_PI;
    default: return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
  }
}

}  // namespace spikes
