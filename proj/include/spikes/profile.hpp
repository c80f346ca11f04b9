#pragma once
#include <Eigen/Dense>
#include <string>

#include "spikes/nonlinearity.hpp"

namespace spikes {

// Radial ground state of  w'' + (N-1)/r w' - w + f(w) = 0,  w'(0) = 0,
// w(inf) = 0, represented as a uniform node table (r_k, w_k, w'_k) up to a
// switch radius r_star, plus the tail amplitude A of the asymptotic law
// w ~ A r^{-(N-1)/2} e^{-r}. Immutable after construction.
struct Profile {
  int dim = 2;
  Nonlinearity nl;
  double tol = 1e-8;
  double w0 = 0.0;     // center value w(0)
  double A = 0.0;      // tail amplitude, matched at r_star
  double rstar = 0.0;  // first node with w < 1e-8; tail formula beyond
  double h = 0.0;      // node spacing
  Eigen::VectorXd r, w, wp;

  // exponent of the algebraic tail factor
  double nu() const { return 0.5 * (dim - 1); }
};

// Shooting solve with bisection on w(0). The returned table satisfies the
// finite-difference ODE residual bound  max |w'' + (N-1)/r w' - w + f(w)|
// <= tol * w(0)  on interior nodes.
Profile solve_profile(int dim, const Nonlinearity& nl, double tol);

// Total evaluators on r >= 0: cubic Hermite on the node table below r_star,
// closed-form tail above. eval_w_prime is the exact derivative of eval_w.
double eval_w(const Profile& pr, double r);
double eval_w_prime(const Profile& pr, double r);

// Plateau estimate of A from g(r) = w r^{(N-1)/2} e^r over the last decade
// of the table. Throws NoPlateau if the flatness gate (1e-2) fails.
double decay_amplitude(const Profile& pr);

// Cache file: "# spike-cluster profile v1, dim, p, w0, A, r_star" header,
// then "r,w,wprime" rows, all %.17g so a load/save round trip is
// byte-identical.
void save_profile(const Profile& pr, const std::string& path);
Profile load_profile(const std::string& path, double tol);
std::string profile_cache_name(int dim, double p, double tol);

}  // namespace spikes
