#pragma once
#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace spikes {

inline constexpr const char* kToolkitVersion = "0.1.0";

// All floating-point output goes through %.17g so runs are bit-reproducible.
std::string fmt_g17(double v);

// write-temp-then-rename
void atomic_write(const std::string& path, const std::string& content);

// Flat key-value run configuration with [section] headers, # comments and
// bracketed arrays. Keys are stored as "section.key".
struct RunConfig {
  int dimension = 2;
  double p = 3.0;
  Eigen::VectorXd lambda;
  double cubic = 0.0;
  std::vector<double> ladder;  // strictly decreasing epsilons
  double beta = 0.9;
  double tol = 1e-8;
  double mu = 0.5;
  long seed = 12345;
  std::string family = "chain";
  int h = 1, k = 1;
  double grid_L = 0.0;  // 0 = choose from eps/beta
  int grid_n = 0;       // 0 = choose from h <= eps/8
  int ell = 2;
  int trials = 10000;
  std::string out_dir = ".";
  std::map<std::string, std::string> raw;  // every key as parsed, for the manifest echo
};

RunConfig load_config(const std::string& path);
RunConfig default_config();

// Accumulates per-stage outputs and writes manifest.json. The manifest echoes
// the full configuration so a run can be reproduced bit-identically; wall
// times are the only fields expected to differ between identical runs.
class ManifestWriter {
 public:
  ManifestWriter(std::string command, const RunConfig& cfg, long seed);
  void add_file(const std::string& stage, const std::string& path);
  void add_scalar(const std::string& stage, const std::string& key, double value);
  void add_wall_ms(const std::string& stage, double ms);
  void write(const std::string& dir) const;

 private:
  std::string command_;
  std::map<std::string, std::string> config_echo_;
  long seed_;
  std::vector<std::string> stage_order_;
  std::map<std::string, std::vector<std::string>> files_;
  std::map<std::string, std::vector<std::pair<std::string, double>>> scalars_;
  std::map<std::string, double> wall_;
  void ensure_stage(const std::string& stage);
};

// JSON-lines solver log: one {"iteration":..,"residual":..,"damping":..}
// object per line.
class JsonlLog {
 public:
  void add(int iteration, double residual, double damping);
  void write(const std::string& path) const;
  bool empty() const { return lines_.empty(); }

 private:
  std::vector<std::string> lines_;
};

}  // namespace spikes
