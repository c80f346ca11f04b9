// spikes: command line surface over the cluster toolkit. Every command
// resolves its configuration, runs the pipeline stages, writes machine
// outputs (JSON) and plot data (CSV) atomically, and drops a manifest.json
// sufficient to reproduce the run bit-identically.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spikes/constants.hpp"
#include "spikes/equilibrium.hpp"
#include "spikes/errors.hpp"
#include "spikes/grid.hpp"
#include "spikes/io.hpp"
#include "spikes/lspde.hpp"
#include "spikes/nondegeneracy.hpp"
#include "spikes/potential.hpp"
#include "spikes/profile.hpp"
#include "spikes/reduced.hpp"

namespace {

using nlohmann::ordered_json;
using namespace spikes;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Profile obtain_profile(const RunConfig& cfg, bool cache_only, std::string& cache_path) {
  cache_path = join_path(cfg.out_dir, profile_cache_name(cfg.dimension, cfg.p, cfg.tol));
  if (std::filesystem::exists(cache_path)) return load_profile(cache_path, cfg.tol);
  require(!cache_only, ErrorKind::CacheMiss, "no profile cache at " + cache_path);
  const Profile pr = solve_profile(cfg.dimension, make_nonlinearity(cfg.p), cfg.tol);
  save_profile(pr, cache_path);
  return pr;
}

ConfigFamily family_from(const RunConfig& cfg, const SaddlePotential& pot, double eps) {
  if (cfg.family == "chain") return chain_family(cfg.ell, pot, cfg.beta);
  if (cfg.family == "star") return star_family(cfg.h, pot, cfg.beta);
  if (cfg.family == "cross") return cross_family(pot, cfg.beta);
  if (cfg.family == "positive") return positive_family(cfg.ell, pot, cfg.beta, eps);
  fail(ErrorKind::BadConfig, "unknown family.kind: " + cfg.family);
}

void anchor_chart(const ConfigFamily& fam, double eps, Eigen::VectorXd& a, Eigen::VectorXd& r) {
  const double re = 2.0 * eps * std::log(1.0 / eps);
  if (fam.k == 0) {
    a = Eigen::VectorXd::Zero(fam.ell() * fam.dimA);
    r.resize(0);
    return;
  }
  a = Eigen::VectorXd::Zero(fam.dimA);
  r = Eigen::VectorXd::Constant(fam.ell() - 1, re);
}

// PDE-side seeds recenter the pattern in the A-span: the chart translation is
// a gauge there (the critical configurations come out centered anyway), and a
// centered pattern needs half the box the cutoff clearance would otherwise eat.
void centered_chart(const ConfigFamily& fam, double eps, Eigen::VectorXd& a,
                    Eigen::VectorXd& r) {
  anchor_chart(fam, eps, a, r);
  if (fam.k == 0) return;
  const SpikeConfig sc = generate(fam, a, r, eps);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(fam.dimA);
  for (const auto& P : sc.points) mean += P.head(fam.dimA);
  a = -mean / static_cast<double>(fam.ell());
}

std::vector<std::string> chart_names(const ConfigFamily& fam) {
  std::vector<std::string> names;
  const int na = fam.k == 0 ? fam.ell() * fam.dimA : fam.dimA;
  for (int i = 1; i <= na; ++i) names.push_back("a" + std::to_string(i));
  if (fam.k != 0)
    for (int i = 2; i <= fam.ell(); ++i) names.push_back("r" + std::to_string(i));
  return names;
}

// box choice for the PDE grid: the usual multiple of the concentration scale,
// capped by the potential's positivity box, floored by the cutoff clearance
Grid pde_grid(const RunConfig& cfg, const SaddlePotential& pot, double eps, double beta,
              double spike_extent) {
  double L = cfg.grid_L;
  if (L <= 0.0) {
    const double wish = 10.0 * std::max(eps * std::log(1.0 / eps), std::pow(eps, beta));
    const double need = spike_extent + 5.02 * eps * std::log(1.0 / eps);
    L = std::min(pot.box(), std::max(wish, need));
  }
  int n = cfg.grid_n;
  if (n <= 0) {
    n = static_cast<int>(std::ceil(2.0 * L / (eps / 8.0))) + 1;
    if (n % 2 == 0) ++n;
  }
  return make_grid(L, n);
}

double spike_extent_of(const SpikeConfig& sc) {
  double m = 0.0;
  for (const auto& P : sc.points) m = std::max(m, P.lpNorm<Eigen::Infinity>());
  return m;
}

ordered_json config_json(const SpikeConfig& sc) {
  ordered_json j;
  j["epsilon"] = sc.epsilon;
  j["beta"] = sc.beta;
  j["taus"] = sc.taus;
  ordered_json pts = ordered_json::array();
  for (const auto& P : sc.points) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index q = 0; q < P.size(); ++q) row.push_back(P[q]);
    pts.push_back(row);
  }
  j["points"] = pts;
  return j;
}

void write_json(const std::string& path, const ordered_json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

int cmd_profile(const RunConfig& cfg, bool cache_only) {
  ManifestWriter man("profile", cfg, cfg.seed);
  Timer t;
  std::string cache_path;
  const Profile pr = obtain_profile(cfg, cache_only, cache_path);
  man.add_file("profile", cache_path);
  man.add_scalar("profile", "w0", pr.w0);
  man.add_scalar("profile", "A", pr.A);
  man.add_scalar("profile", "rstar", pr.rstar);
  man.add_wall_ms("profile", t.ms());

  Timer t2;
  const NondegeneracyReport nd = verify_nondegeneracy(pr);
  man.add_scalar("nondegeneracy", "lambda_mode0", nd.lambda_mode0);
  man.add_scalar("nondegeneracy", "lambda_mode1", nd.lambda_mode1);
  man.add_scalar("nondegeneracy", "overlap_mode1", nd.overlap_mode1);
  man.add_wall_ms("nondegeneracy", t2.ms());
  man.write(cfg.out_dir);
  std::cout << "profile: w0=" << fmt_g17(pr.w0) << " A=" << fmt_g17(pr.A)
            << " rstar=" << fmt_g17(pr.rstar) << "\n";
  return 0;
}

int cmd_constants(const RunConfig& cfg, bool cache_only) {
  ManifestWriter man("constants", cfg, cfg.seed);
  Timer t;
  std::string cache_path;
  const Profile pr = obtain_profile(cfg, cache_only, cache_path);
  man.add_file("profile", cache_path);
  man.add_wall_ms("profile", t.ms());

  Timer t2;
  const ReducedConstants rc = compute_constants(pr);
  ordered_json j;
  j["c1_unit"] = rc.c1_unit;
  j["c2"] = rc.c2;
  j["c3"] = rc.c3;
  j["c4"] = rc.c4;
  j["A"] = pr.A;
  j["w0"] = pr.w0;
  j["pohozaev_defect"] = pohozaev_defect(pr);
  const std::string path = join_path(cfg.out_dir, "constants.json");
  write_json(path, j);
  man.add_file("constants", path);
  man.add_scalar("constants", "c1_unit", rc.c1_unit);
  man.add_scalar("constants", "c2", rc.c2);
  man.add_scalar("constants", "c3", rc.c3);
  man.add_scalar("constants", "c4", rc.c4);
  man.add_wall_ms("constants", t2.ms());
  man.write(cfg.out_dir);
  std::cout << "constants: c2=" << fmt_g17(rc.c2) << " c3=" << fmt_g17(rc.c3) << "\n";
  return 0;
}

int cmd_reduce(const RunConfig& cfg) {
  ManifestWriter man("reduce", cfg, cfg.seed);
  std::string cache_path;
  const Profile pr = obtain_profile(cfg, false, cache_path);
  const ReducedConstants rc = compute_constants(pr);
  const SaddlePotential pot = make_saddle(cfg.lambda, cfg.cubic);
  const double eps = cfg.ladder.back();
  const ConfigFamily fam = family_from(cfg, pot, eps);
  const XiTable tbl = build_xi_table(pr);

  Timer t;
  const double re = 2.0 * eps * std::log(1.0 / eps);
  const double level = rc.c4 * std::pow(eps, 2.0 * cfg.beta) / 2.0;
  const double lmax = pot.lambdas().head(pot.signature()).maxCoeff();
  const double amax = 1.5 * std::sqrt(level / (rc.c2 * lmax * fam.ell()));
  const double rlo = std::max(eps, 0.15 * re), rhi = 3.0 * re;

  const std::vector<std::string> names = chart_names(fam);
  const int na = fam.k == 0 ? fam.ell() * fam.dimA : fam.dimA;
  const int nr = fam.k == 0 ? 0 : fam.ell() - 1;
  const int dims = na + nr;
  const int nper = dims <= 2 ? 41 : (dims == 3 ? 17 : 9);

  std::ostringstream csv;
  for (const auto& nm : names) csv << nm << ",";
  csv << "J,gradnorm\n";

  long total = 1;
  for (int d = 0; d < dims; ++d) total *= nper;
  double jmin = std::numeric_limits<double>::infinity(), jmax = -jmin;
  Eigen::VectorXd a(na), r(nr);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int d = 0; d < dims; ++d) {
      const int q = static_cast<int>(rem % nper);
      rem /= nper;
      const double frac = nper == 1 ? 0.5 : static_cast<double>(q) / (nper - 1);
      if (d < na)
        a[d] = -amax + 2.0 * amax * frac;
      else
        r[d - na] = rlo + (rhi - rlo) * frac;
    }
    const SpikeConfig sc = generate(fam, a, r, eps);
    const ReducedEval ev = reduced_energy(sc, pr, pot, rc, KernelMode::xi_exact, &tbl);
    for (int d = 0; d < na; ++d) csv << fmt_g17(a[d]) << ",";
    for (int d = 0; d < nr; ++d) csv << fmt_g17(r[d]) << ",";
    csv << fmt_g17(ev.value) << "," << fmt_g17(ev.gradient.norm()) << "\n";
    jmin = std::min(jmin, ev.value);
    jmax = std::max(jmax, ev.value);
  }
  const std::string path = join_path(cfg.out_dir, "reduce.csv");
  atomic_write(path, csv.str());
  man.add_file("sweep", path);
  man.add_scalar("sweep", "eps", eps);
  man.add_scalar("sweep", "rows", static_cast<double>(total));
  man.add_scalar("sweep", "J_min", jmin);
  man.add_scalar("sweep", "J_max", jmax);
  man.add_wall_ms("sweep", t.ms());
  man.write(cfg.out_dir);
  std::cout << "reduce: " << total << " rows, J in [" << fmt_g17(jmin) << ", " << fmt_g17(jmax)
            << "]\n";
  return 0;
}

int cmd_search(const RunConfig& cfg) {
  ManifestWriter man("search", cfg, cfg.seed);
  std::string cache_path;
  const Profile pr = obtain_profile(cfg, false, cache_path);
  const ReducedConstants rc = compute_constants(pr);
  const SaddlePotential pot = make_saddle(cfg.lambda, cfg.cubic);
  const double eps = cfg.ladder.back();
  const ConfigFamily fam = family_from(cfg, pot, eps);
  const XiTable tbl = build_xi_table(pr);

  Timer t;
  Eigen::VectorXd a, r;
  anchor_chart(fam, eps, a, r);
  const SpikeConfig seed = generate(fam, a, r, eps);
  CriticalOpts opts;
  opts.mode = KernelMode::xi_exact;
  opts.tbl = &tbl;
  opts.box = pot.box();
  CriticalDiagnostics diag;
  const SpikeConfig crit = find_critical_point(seed, pr, pot, rc, opts, diag);
  const ReducedEval ev = reduced_energy(crit, pr, pot, rc, KernelMode::xi_exact, &tbl);

  ordered_json j;
  j["eps"] = eps;
  j["beta"] = cfg.beta;
  j["family"] = cfg.family;
  j["config"] = config_json(crit);
  j["J"] = ev.value;
  j["grad_norm"] = diag.grad_norm;
  j["iterations"] = diag.iterations;
  j["n_positive"] = diag.n_positive;
  j["n_negative"] = diag.n_negative;
  j["n_near_null"] = diag.n_near_null;
  j["in_gamma"] = diag.in_gamma_final;
  j["in_D"] = diag.in_D_final;
  std::vector<double> evs(diag.hessian_eigenvalues.data(),
                          diag.hessian_eigenvalues.data() + diag.hessian_eigenvalues.size());
  j["hessian_eigenvalues"] = evs;
  const std::string path = join_path(cfg.out_dir, "search.json");
  write_json(path, j);
  man.add_file("search", path);
  man.add_scalar("search", "J", ev.value);
  man.add_scalar("search", "grad_norm", diag.grad_norm);
  man.add_scalar("search", "n_positive", diag.n_positive);
  man.add_scalar("search", "n_negative", diag.n_negative);
  man.add_scalar("search", "n_near_null", diag.n_near_null);
  man.add_wall_ms("search", t.ms());
  man.write(cfg.out_dir);
  std::cout << "search: |gradJ|=" << fmt_g17(diag.grad_norm) << " signature ("
            << diag.n_positive << "+," << diag.n_negative << "-," << diag.n_near_null
            << "0)\n";
  return 0;
}

int cmd_maxmin(const RunConfig& cfg) {
  ManifestWriter man("maxmin", cfg, cfg.seed);
  std::string cache_path;
  const Profile pr = obtain_profile(cfg, false, cache_path);
  const ReducedConstants rc = compute_constants(pr);
  const SaddlePotential pot = make_saddle(cfg.lambda, cfg.cubic);
  const XiTable tbl = build_xi_table(pr);

  Timer t;
  ordered_json runs = ordered_json::array();
  std::ostringstream csv;
  csv << "eps,level,target,n_K,n_K0,K0_mean,K0_max_rel_dev,anchor_inside\n";
  Eigen::MatrixXd last_k0;
  std::vector<std::string> names;
  for (double eps : cfg.ladder) {
    const ConfigFamily fam = family_from(cfg, pot, eps);
    const MaxminReport rep = maxmin_report(fam, pr, pot, rc, eps, &tbl);
    ordered_json j;
    j["eps"] = eps;
    j["level"] = rep.level;
    j["target"] = rep.target;
    j["n_K"] = rep.n_K;
    j["n_K0"] = rep.n_K0;
    j["K0_min"] = rep.K0_min;
    j["K0_max"] = rep.K0_max;
    j["K0_mean"] = rep.K0_mean;
    j["K0_max_rel_dev"] = rep.K0_max_rel_dev;
    j["anchor_inside"] = rep.anchor_inside;
    j["anchor_r"] = rep.anchor_r;
    runs.push_back(j);
    csv << fmt_g17(eps) << "," << fmt_g17(rep.level) << "," << fmt_g17(rep.target) << ","
        << rep.n_K << "," << rep.n_K0 << "," << fmt_g17(rep.K0_mean) << ","
        << fmt_g17(rep.K0_max_rel_dev) << "," << (rep.anchor_inside ? 1 : 0) << "\n";
    last_k0 = rep.K0_samples;
    names = chart_names(fam);
    man.add_scalar("maxmin", "K0_max_rel_dev_eps_" + fmt_g17(eps), rep.K0_max_rel_dev);
  }
  const std::string jpath = join_path(cfg.out_dir, "maxmin.json");
  write_json(jpath, ordered_json{{"runs", runs}});
  const std::string cpath = join_path(cfg.out_dir, "maxmin.csv");
  atomic_write(cpath, csv.str());

  std::ostringstream k0csv;
  for (const auto& nm : names) k0csv << nm << ",";
  k0csv << "S,J\n";
  for (Eigen::Index i = 0; i < last_k0.rows(); ++i) {
    for (Eigen::Index c = 0; c < last_k0.cols(); ++c) {
      k0csv << fmt_g17(last_k0(i, c));
      k0csv << (c + 1 < last_k0.cols() ? "," : "\n");
    }
  }
  const std::string kpath = join_path(cfg.out_dir, "maxmin_k0.csv");
  atomic_write(kpath, k0csv.str());

  man.add_file("maxmin", jpath);
  man.add_file("maxmin", cpath);
  man.add_file("maxmin", kpath);
  man.add_wall_ms("maxmin", t.ms());
  man.write(cfg.out_dir);
  std::cout << "maxmin: " << cfg.ladder.size() << " ladder points written\n";
  return 0;
}

int cmd_pde(const RunConfig& cfg) {
  require(cfg.dimension == 2, ErrorKind::BadConfig, "pde pipeline is two dimensional");
  ManifestWriter man("pde", cfg, cfg.seed);
  std::string cache_path;
  const Profile pr = obtain_profile(cfg, false, cache_path);
  const ReducedConstants rc = compute_constants(pr);
  const SaddlePotential pot = make_saddle(cfg.lambda, cfg.cubic);
  const double eps = cfg.ladder.back();
  const ConfigFamily fam = family_from(cfg, pot, eps);
  const XiTable tbl = build_xi_table(pr);

  Timer t1;
  Eigen::VectorXd a, r;
  centered_chart(fam, eps, a, r);
  CriticalOpts opts;
  opts.mode = KernelMode::xi_exact;
  opts.tbl = &tbl;
  opts.box = pot.box();
  CriticalDiagnostics diag;
  const SpikeConfig crit = find_critical_point(generate(fam, a, r, eps), pr, pot, rc, opts, diag);
  man.add_scalar("search", "grad_norm", diag.grad_norm);
  man.add_wall_ms("search", t1.ms());

  Timer t2;
  const Grid g = pde_grid(cfg, pot, eps, cfg.beta, spike_extent_of(crit));
  LSParameters ps;
  ps.epsilon = eps;
  ps.beta = cfg.beta;
  ps.mu = cfg.mu;
  JsonlLog clog;
  const CorrectionResult corr = projected_solve(crit, pr, pot, pr.nl, ps, g, 1e-11, &clog);
  const std::string clog_path = join_path(cfg.out_dir, "correction_log.jsonl");
  clog.write(clog_path);
  man.add_file("correction", clog_path);
  man.add_scalar("correction", "residual_norm", corr.residual_norm);
  man.add_scalar("correction", "newton_iterations", corr.newton_iterations);
  man.add_wall_ms("correction", t2.ms());

  Timer t3;
  GridField v0 = assemble_ansatz(crit, pr, ps, g);
  for (Eigen::Index q = 0; q < v0.v.size(); ++q) v0.v[q] += corr.phi.v[q];
  JsonlLog nlog;
  int steps = 0;
  const GridField v = newton_solve(v0, pot, pr.nl, ps, 1e-10, 25, &steps, &nlog);
  const std::string nlog_path = join_path(cfg.out_dir, "newton_log.jsonl");
  nlog.write(nlog_path);
  const double final_res = [&] {
    const GridField rf = residual(v, ps, pot, pr.nl);
    double m = 0.0;
    for (Eigen::Index q = 0; q < rf.v.size(); ++q) m = std::max(m, std::abs(rf.v[q]));
    return m;
  }();
  man.add_file("newton", nlog_path);
  man.add_scalar("newton", "steps", steps);
  man.add_scalar("newton", "residual", final_res);
  man.add_wall_ms("newton", t3.ms());

  Timer t4;
  std::vector<Peak> peaks = extract_peaks(v, 0.5 * eval_w(pr, 0.0));
  std::sort(peaks.begin(), peaks.end(), [](const Peak& x, const Peak& y) {
    return x.pos[0] != y.pos[0] ? x.pos[0] < y.pos[0] : x.pos[1] < y.pos[1];
  });
  std::ostringstream pcsv;
  pcsv << "i,x,y,sign,height\n";
  for (std::size_t i = 0; i < peaks.size(); ++i)
    pcsv << i << "," << fmt_g17(peaks[i].pos[0]) << "," << fmt_g17(peaks[i].pos[1]) << ","
         << peaks[i].sign << "," << fmt_g17(peaks[i].height) << "\n";
  const std::string ppath = join_path(cfg.out_dir, "peaks.csv");
  atomic_write(ppath, pcsv.str());
  const std::string fpath = join_path(cfg.out_dir, "field.bin");
  save_field_binary(v, fpath);

  ordered_json j;
  j["eps"] = eps;
  j["grid_L"] = g.L;
  j["grid_n"] = g.n;
  j["newton_steps"] = steps;
  j["residual"] = final_res;
  j["gamma_member"] = corr.gamma_member;
  j["predicted"] = config_json(crit);
  ordered_json pk = ordered_json::array();
  for (const auto& p : peaks)
    pk.push_back({{"x", p.pos[0]}, {"y", p.pos[1]}, {"sign", p.sign}, {"height", p.height}});
  j["peaks"] = pk;
  const std::string jpath = join_path(cfg.out_dir, "pde.json");
  write_json(jpath, j);

  man.add_file("peaks", ppath);
  man.add_file("peaks", fpath);
  man.add_file("peaks", jpath);
  man.add_scalar("peaks", "count", static_cast<double>(peaks.size()));
  man.add_wall_ms("peaks", t4.ms());
  man.write(cfg.out_dir);
  std::cout << "pde: " << peaks.size() << " peaks, " << steps << " Newton steps, residual "
            << fmt_g17(final_res) << "\n";
  return 0;
}

int cmd_lsreduce(const RunConfig& cfg) {
  require(cfg.dimension == 2, ErrorKind::BadConfig, "pde pipeline is two dimensional");
  ManifestWriter man("lsreduce", cfg, cfg.seed);
  std::string cache_path;
  const Profile pr = obtain_profile(cfg, false, cache_path);
  const ReducedConstants rc = compute_constants(pr);
  const SaddlePotential pot = make_saddle(cfg.lambda, cfg.cubic);
  const double eps = cfg.ladder.back();
  const ConfigFamily fam = family_from(cfg, pot, eps);
  const XiTable tbl = build_xi_table(pr);

  Timer t;
  Eigen::VectorXd a, r;
  centered_chart(fam, eps, a, r);
  const SpikeConfig sc = generate(fam, a, r, eps);
  const Grid g = pde_grid(cfg, pot, eps, cfg.beta, spike_extent_of(sc));
  LSParameters ps;
  ps.epsilon = eps;
  ps.beta = cfg.beta;
  ps.mu = cfg.mu;
  JsonlLog clog;
  const CorrectionResult corr = projected_solve(sc, pr, pot, pr.nl, ps, g, 1e-11, &clog);
  GridField v = assemble_ansatz(sc, pr, ps, g);
  for (Eigen::Index q = 0; q < v.v.size(); ++q) v.v[q] += corr.phi.v[q];

  const double c1g = c1_grid(pr, ps, g);
  const double jnum = reduced_energy_numeric(v, ps, pot, pr.nl, sc.ell(), c1g);
  const double jform = reduced_energy(sc, pr, pot, rc, KernelMode::xi_exact, &tbl).value;
  const double eta = ps.eta(std::min(1.0, pr.nl.p - 2.0));
  double phisup = 0.0;
  for (Eigen::Index q = 0; q < corr.phi.v.size(); ++q)
    phisup = std::max(phisup, std::abs(corr.phi.v[q]));

  ordered_json j;
  j["eps"] = eps;
  j["beta"] = cfg.beta;
  j["J_numeric"] = jnum;
  j["J_formula"] = jform;
  j["abs_diff"] = std::abs(jnum - jform);
  j["diff_over_eps2beta"] = std::abs(jnum - jform) / std::pow(eps, 2.0 * cfg.beta);
  j["c1_grid"] = c1g;
  j["phi_sup"] = phisup;
  j["eta"] = eta;
  j["phi_sup_over_eps_eta"] = phisup / std::pow(eps, eta);
  j["residual_norm"] = corr.residual_norm;
  j["orth_defect_max"] = corr.orth_defects.size() ? corr.orth_defects.maxCoeff() : 0.0;
  j["newton_iterations"] = corr.newton_iterations;
  const std::string jpath = join_path(cfg.out_dir, "lsreduce.json");
  write_json(jpath, j);
  const std::string fpath = join_path(cfg.out_dir, "phi.bin");
  save_field_binary(corr.phi, fpath);
  const std::string clog_path = join_path(cfg.out_dir, "correction_log.jsonl");
  clog.write(clog_path);

  man.add_file("correction", jpath);
  man.add_file("correction", fpath);
  man.add_file("correction", clog_path);
  man.add_scalar("correction", "J_numeric", jnum);
  man.add_scalar("correction", "J_formula", jform);
  man.add_scalar("correction", "phi_sup", phisup);
  man.add_wall_ms("correction", t.ms());
  man.write(cfg.out_dir);
  std::cout << "lsreduce: |J_num - J_formula| = " << fmt_g17(std::abs(jnum - jform)) << "\n";
  return 0;
}

int cmd_expansion_test(const RunConfig& cfg) {
  require(cfg.dimension == 2, ErrorKind::BadConfig, "pde pipeline is two dimensional");
  ManifestWriter man("expansion-test", cfg, cfg.seed);
  std::string cache_path;
  const Profile pr = obtain_profile(cfg, false, cache_path);
  const ReducedConstants rc = compute_constants(pr);
  const SaddlePotential pot = make_saddle(cfg.lambda, cfg.cubic);
  const XiTable tbl = build_xi_table(pr);

  Timer t;
  std::ostringstream lad, jd;
  lad << "eps,E,E_over_eps2beta\n";
  jd << "eps,Jdefect,Jdefect_over_eps2beta\n";
  std::vector<double> enorm, jnorm;
  for (double eps : cfg.ladder) {
    const ConfigFamily fam = family_from(cfg, pot, eps);
    Eigen::VectorXd a, r;
    centered_chart(fam, eps, a, r);
    const SpikeConfig sc = generate(fam, a, r, eps);
    const Grid g = pde_grid(cfg, pot, eps, cfg.beta, spike_extent_of(sc));
    LSParameters ps;
    ps.epsilon = eps;
    ps.beta = cfg.beta;
    ps.mu = cfg.mu;

    const GridField u = assemble_ansatz(sc, pr, ps, g);
    const double c1g = c1_grid(pr, ps, g);
    const double jform = reduced_energy(sc, pr, pot, rc, KernelMode::xi_exact, &tbl).value;
    const double E =
        std::abs(energy(u, ps, pot, pr.nl) / (eps * eps) - sc.ell() * c1g - jform);
    const double scale = std::pow(eps, 2.0 * cfg.beta);
    lad << fmt_g17(eps) << "," << fmt_g17(E) << "," << fmt_g17(E / scale) << "\n";
    enorm.push_back(E / scale);

    const CorrectionResult corr = projected_solve(sc, pr, pot, pr.nl, ps, g, 1e-11, nullptr);
    GridField v = u;
    for (Eigen::Index q = 0; q < v.v.size(); ++q) v.v[q] += corr.phi.v[q];
    const double jnum = reduced_energy_numeric(v, ps, pot, pr.nl, sc.ell(), c1g);
    const double Jd = std::abs(jnum - jform);
    jd << fmt_g17(eps) << "," << fmt_g17(Jd) << "," << fmt_g17(Jd / scale) << "\n";
    jnorm.push_back(Jd / scale);
    man.add_scalar("ladder", "E_norm_eps_" + fmt_g17(eps), E / scale);
    man.add_scalar("ladder", "Jdefect_norm_eps_" + fmt_g17(eps), Jd / scale);
  }
  const std::string lpath = join_path(cfg.out_dir, "ladder.csv");
  atomic_write(lpath, lad.str());
  const std::string jpath = join_path(cfg.out_dir, "jdefect.csv");
  atomic_write(jpath, jd.str());
  const auto decreasing = [](const std::vector<double>& v) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i + 1] >= v[i]) return false;
    return true;
  };
  man.add_file("ladder", lpath);
  man.add_file("ladder", jpath);
  man.add_wall_ms("ladder", t.ms());
  man.write(cfg.out_dir);
  std::cout << "expansion-test: E ladder decreasing: " << (decreasing(enorm) ? "yes" : "no")
            << ", J defect decreasing: " << (decreasing(jnorm) ? "yes" : "no") << "\n";
  return 0;
}

int cmd_lemma_check(const RunConfig& cfg) {
  ManifestWriter man("lemma-check", cfg, cfg.seed);
  Timer t;
  ordered_json report = ordered_json::array();
  std::ostringstream verdicts;
  for (int ell = 2; ell <= 6; ++ell) {
    const std::vector<GraphClass> classes =
        search_equilibria(ell, 2, cfg.trials, static_cast<std::uint64_t>(cfg.seed));
    int worst = 0;
    ordered_json cl = ordered_json::array();
    for (const auto& gc : classes) {
      worst = std::max(worst, gc.kernel_dim);
      std::ostringstream hex;
      hex << std::hex << gc.hash;
      ordered_json e;
      e["graph_id"] = hex.str();
      ordered_json edges = ordered_json::array();
      for (const auto& ed : gc.edges) edges.push_back({ed.first, ed.second});
      e["edges"] = edges;
      e["degrees"] = gc.degrees;
      e["count"] = gc.count;
      e["kernel_dim"] = gc.kernel_dim;
      cl.push_back(e);
    }
    report.push_back({{"ell", ell},
                      {"trials", cfg.trials},
                      {"classes", cl},
                      {"nontrivial_kernel", worst > 0}});
    const std::string line =
        "ell=" + std::to_string(ell) + ": " +
        (worst > 0 ? "nontrivial kernel found" : "no nontrivial kernel found") + " (" +
        std::to_string(classes.size()) + " contact graph classes, " +
        std::to_string(cfg.trials) + " trials)";
    verdicts << line << "\n";
    std::cout << line << "\n";
    man.add_scalar("lemma", "kernel_dim_max_ell_" + std::to_string(ell), worst);
  }
  // the known equilibrium at ell = 7
  const UnitConfig hex7 = hexagon_with_center();
  const BalanceKernel ker = balance_kernel(hex7);
  ordered_json h;
  h["ell"] = 7;
  h["kernel_dim"] = ker.dim;
  ordered_json edges = ordered_json::array();
  for (const auto& ed : hex7.edges) edges.push_back({ed.first, ed.second});
  h["edges"] = edges;
  ordered_json pts = ordered_json::array();
  for (int c = 0; c < hex7.ell(); ++c) pts.push_back({hex7.points(0, c), hex7.points(1, c)});
  h["points"] = pts;
  ordered_json basis = ordered_json::array();
  for (int c = 0; c < ker.dim; ++c) {
    std::vector<double> col(ker.basis.col(c).data(), ker.basis.col(c).data() + ker.basis.rows());
    basis.push_back(col);
  }
  h["kernel_basis"] = basis;
  report.push_back(h);
  const std::string line7 = ker.dim > 0
                                ? "ell=7: nontrivial kernel found (hexagon+center)"
                                : "ell=7: no nontrivial kernel found (hexagon+center)";
  verdicts << line7 << "\n";
  std::cout << line7 << "\n";
  man.add_scalar("lemma", "kernel_dim_hexagon_center", ker.dim);

  const std::string jpath = join_path(cfg.out_dir, "lemma.json");
  write_json(jpath, ordered_json{{"report", report}});
  const std::string vpath = join_path(cfg.out_dir, "verdicts.txt");
  atomic_write(vpath, verdicts.str());
  man.add_file("lemma", jpath);
  man.add_file("lemma", vpath);
  man.add_wall_ms("lemma", t.ms());
  man.write(cfg.out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spike cluster toolkit"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  long seed = -1;
  int threads = 0;
  app.add_option("--config", config_path, "run configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override the configured rng seed");
  app.add_option("--threads", threads, "Eigen thread cap (default 1)");

  bool cache_only = false;
  auto* c_profile = app.add_subcommand("profile", "ground profile cache + nondegeneracy check");
  auto* c_constants = app.add_subcommand("constants", "reduction constants JSON");
  for (auto* c : {c_profile, c_constants})
    c->add_flag("--cache-only", cache_only, "fail instead of solving when the cache is missing");
  auto* c_reduce = app.add_subcommand("reduce", "reduced energy landscape sweep CSV");
  auto* c_search = app.add_subcommand("search", "critical point search report");
  auto* c_maxmin = app.add_subcommand("maxmin", "max-min level set statistics");
  auto* c_pde = app.add_subcommand("pde", "full cluster pipeline: search, correct, solve, peaks");
  auto* c_lsreduce = app.add_subcommand("lsreduce", "projected correction and energy comparison");
  auto* c_expansion =
      app.add_subcommand("expansion-test", "energy expansion defect along the epsilon ladder");
  auto* c_lemma = app.add_subcommand("lemma-check", "unit-distance equilibrium kernel search");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  Eigen::setNbThreads(threads > 0 ? threads : 1);

  try {
    RunConfig cfg = config_path.empty() ? spikes::default_config() : load_config(config_path);
    if (seed >= 0) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    std::filesystem::create_directories(cfg.out_dir);

    if (c_profile->parsed()) return cmd_profile(cfg, cache_only);
    if (c_constants->parsed()) return cmd_constants(cfg, cache_only);
    if (c_reduce->parsed()) return cmd_reduce(cfg);
    if (c_search->parsed()) return cmd_search(cfg);
    if (c_maxmin->parsed()) return cmd_maxmin(cfg);
    if (c_pde->parsed()) return cmd_pde(cfg);
    if (c_lsreduce->parsed()) return cmd_lsreduce(cfg);
    if (c_expansion->parsed()) return cmd_expansion_test(cfg);
    if (c_lemma->parsed()) return cmd_lemma_check(cfg);
    std::cerr << "error: no command\n";
    return 2;
  } catch (const spikes::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_validation(e.kind()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
