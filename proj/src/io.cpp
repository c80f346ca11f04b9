#include "spikes/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spikes/errors.hpp"

namespace spikes {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorKind::BadConfig, "cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    require(out.good(), ErrorKind::BadConfig, "short write to " + tmp);
  }
  require(std::rename(tmp.c_str(), path.c_str()) == 0, ErrorKind::BadConfig,
          "rename failed for " + path);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_array(const std::string& v, const std::string& key) {
  require(v.size() >= 2 && v.front() == '[' && v.back() == ']', ErrorKind::BadConfig,
          "expected [..] array for " + key);
  std::vector<double> out;
  std::string body = v.substr(1, v.size() - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    size_t pos = 0;
    const double x = std::stod(item, &pos);
    require(pos == item.size(), ErrorKind::BadConfig, "bad number in " + key + ": " + item);
    out.push_back(x);
  }
  require(!out.empty(), ErrorKind::BadConfig, "empty array for " + key);
  return out;
}

double num(const std::map<std::string, std::string>& kv, const std::string& key, double dflt) {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  size_t pos = 0;
  const double x = std::stod(it->second, &pos);
  require(pos == it->second.size(), ErrorKind::BadConfig, "bad number for " + key);
  return x;
}

std::string str(const std::map<std::string, std::string>& kv, const std::string& key,
                const std::string& dflt) {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : it->second;
}

RunConfig from_map(std::map<std::string, std::string> kv) {
  RunConfig rc;
  rc.raw = kv;
  rc.dimension = static_cast<int>(num(kv, "model.dimension", 2));
  rc.p = num(kv, "model.p", 3.0);
  rc.cubic = num(kv, "model.cubic", 0.0);
  std::vector<double> lam = kv.count("model.lambda")
                                ? parse_array(kv.at("model.lambda"), "model.lambda")
                                : std::vector<double>{1.0, -1.0};
  rc.lambda = Eigen::Map<Eigen::VectorXd>(lam.data(), static_cast<long>(lam.size()));
  rc.ladder = kv.count("run.epsilon") ? parse_array(kv.at("run.epsilon"), "run.epsilon")
                                      : std::vector<double>{0.1, 0.07, 0.05};
  rc.beta = num(kv, "run.beta", 0.9);
  rc.tol = num(kv, "run.tol", 1e-8);
  rc.mu = num(kv, "run.mu", 0.5);
  rc.seed = static_cast<long>(num(kv, "run.seed", 12345));
  rc.family = str(kv, "family.kind", "chain");
  rc.ell = static_cast<int>(num(kv, "family.ell", 2));
  rc.h = static_cast<int>(num(kv, "family.h", (rc.ell + 1) / 2));
  rc.k = static_cast<int>(num(kv, "family.k", rc.ell / 2));
  rc.grid_L = num(kv, "grid.L", 0.0);
  rc.grid_n = static_cast<int>(num(kv, "grid.n", 0));
  rc.trials = static_cast<int>(num(kv, "equilibrium.trials", 10000));

  require(rc.dimension >= 1 && rc.dimension <= 3, ErrorKind::BadConfig,
          "model.dimension must be 1, 2 or 3");
  require(rc.p > 2.0, ErrorKind::BadConfig, "model.p must exceed 2");
  require(rc.beta > 0.0 && rc.beta < 1.0, ErrorKind::BadConfig, "run.beta must be in (0,1)");
  require(!rc.ladder.empty(), ErrorKind::BadConfig, "run.epsilon must be nonempty");
  for (double e : rc.ladder)
    require(e > 0.0, ErrorKind::BadConfig, "epsilons must be positive");
  for (size_t i = 0; i + 1 < rc.ladder.size(); ++i)
    require(rc.ladder[i] > rc.ladder[i + 1], ErrorKind::BadConfig,
            "epsilon ladder must be strictly decreasing");
  require(rc.tol > 0.0, ErrorKind::BadConfig, "run.tol must be positive");
  return rc;
}

}  // namespace

RunConfig default_config() { return from_map({}); }

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::BadConfig, "cannot read config " + path);
  std::map<std::string, std::string> kv;
  std::string line, section;
  while (std::getline(in, line)) {
    const size_t hashpos = line.find('#');
    if (hashpos != std::string::npos) line = line.substr(0, hashpos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', ErrorKind::BadConfig, "malformed section: " + line);
      section = trim(line.substr(1, line.size() - 2));
      require(!section.empty(), ErrorKind::BadConfig, "empty section name");
      continue;
    }
    const size_t eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::BadConfig, "expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    require(!key.empty() && !val.empty(), ErrorKind::BadConfig, "empty key or value: " + line);
    require(!section.empty(), ErrorKind::BadConfig, "key outside any [section]: " + line);
    kv[section + "." + key] = val;
  }
  return from_map(std::move(kv));
}

ManifestWriter::ManifestWriter(std::string command, const RunConfig& cfg, long seed)
    : command_(std::move(command)), seed_(seed) {
  config_echo_ = cfg.raw;
  // Echo resolved defaults too, so the manifest alone reproduces the run.
  config_echo_["model.dimension"] = std::to_string(cfg.dimension);
  config_echo_["model.p"] = fmt_g17(cfg.p);
  config_echo_["model.cubic"] = fmt_g17(cfg.cubic);
  std::string lam = "[";
  for (int i = 0; i < cfg.lambda.size(); ++i)
    lam += (i ? ", " : "") + fmt_g17(cfg.lambda[i]);
  config_echo_["model.lambda"] = lam + "]";
  std::string eps = "[";
  for (size_t i = 0; i < cfg.ladder.size(); ++i)
    eps += (i ? ", " : "") + fmt_g17(cfg.ladder[i]);
  config_echo_["run.epsilon"] = eps + "]";
  config_echo_["run.beta"] = fmt_g17(cfg.beta);
  config_echo_["run.tol"] = fmt_g17(cfg.tol);
  config_echo_["run.mu"] = fmt_g17(cfg.mu);
  config_echo_["run.seed"] = std::to_string(cfg.seed);
  config_echo_["family.kind"] = cfg.family;
  config_echo_["family.ell"] = std::to_string(cfg.ell);
  config_echo_["family.h"] = std::to_string(cfg.h);
  config_echo_["family.k"] = std::to_string(cfg.k);
  config_echo_["grid.L"] = fmt_g17(cfg.grid_L);
  config_echo_["grid.n"] = std::to_string(cfg.grid_n);
  config_echo_["equilibrium.trials"] = std::to_string(cfg.trials);
}

void ManifestWriter::ensure_stage(const std::string& stage) {
  for (const auto& s : stage_order_)
    if (s == stage) return;
  stage_order_.push_back(stage);
}

void ManifestWriter::add_file(const std::string& stage, const std::string& path) {
  ensure_stage(stage);
  files_[stage].push_back(path);
}

void ManifestWriter::add_scalar(const std::string& stage, const std::string& key, double value) {
  ensure_stage(stage);
  scalars_[stage].emplace_back(key, value);
}

void ManifestWriter::add_wall_ms(const std::string& stage, double ms) {
  ensure_stage(stage);
  wall_[stage] = ms;
}

void ManifestWriter::write(const std::string& dir) const {
  nlohmann::ordered_json j;
  j["toolkit_version"] = kToolkitVersion;
  j["command"] = command_;
  j["seed"] = seed_;
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : config_echo_) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& name : stage_order_) {
    nlohmann::ordered_json st;
    st["name"] = name;
    st["outputs"] = files_.count(name) ? files_.at(name) : std::vector<std::string>{};
    nlohmann::ordered_json sc;
    if (scalars_.count(name))
      for (const auto& [k, v] : scalars_.at(name)) sc[k] = fmt_g17(v);
    st["scalars"] = sc;
    st["wall_ms"] = wall_.count(name) ? wall_.at(name) : 0.0;
    stages.push_back(st);
  }
  j["stages"] = stages;
  atomic_write(dir + "/manifest.json", j.dump(2) + "\n");
}

void JsonlLog::add(int iteration, double residual, double damping) {
  nlohmann::ordered_json j;
  j["iteration"] = iteration;
  j["residual"] = fmt_g17(residual);
  j["damping"] = fmt_g17(damping);
  lines_.push_back(j.dump());
}

void JsonlLog::write(const std::string& path) const {
  std::string out;
  for (const auto& l : lines_) out += l + "\n";
  atomic_write(path, out);
}

}  // namespace spikes
