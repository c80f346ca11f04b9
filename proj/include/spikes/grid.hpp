#pragma once
#include <Eigen/Dense>
#include <string>

namespace spikes {

// Uniform square grid on [-L, L]^2, n nodes per side (n odd so the center is
// a node), Dirichlet convention on the outermost ring.
struct Grid {
  double L = 1.0;
  int n = 3;
  double h() const { return 2.0 * L / (n - 1); }
  double x(int i) const { return -L + i * h(); }
  double y(int j) const { return -L + j * h(); }
};

Grid make_grid(double L, int n);

struct GridField {
  Grid g;
  Eigen::VectorXd v;  // row-major: index i*n + j, i along x
  double& at(int i, int j) { return v[static_cast<long>(i) * g.n + j]; }
  double at(int i, int j) const { return v[static_cast<long>(i) * g.n + j]; }
};

GridField zero_field(const Grid& g);

// CSV rows "x,y,value"
void save_field_csv(const GridField& f, const std::string& path);

// Binary dump: int32 n, float64 L, then n*n row-major float64, little-endian.
void save_field_binary(const GridField& f, const std::string& path);
GridField load_field_binary(const std::string& path);

}  // namespace spikes
