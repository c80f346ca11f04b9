#pragma once
#include "spikes/profile.hpp"

namespace spikes {

// Spectral check of the linearization L = Delta - 1 + f'(w) split into
// angular modes L_m u = u'' + (N-1)/r u' - m(m+N-2)/r^2 u - u + f'(w) u.
// Mode 1 must carry the translation kernel (eigenvalue ~ 0, eigenvector
// parallel to w'); mode 0 must have no eigenvalue near 0.
struct NondegeneracyReport {
  double lambda_mode0 = 0.0;  // smallest |eigenvalue| in mode 0
  double lambda_mode1 = 0.0;  // smallest |eigenvalue| in mode 1
  double overlap_mode1 = 0.0; // |cos angle| between the mode-1 null vector and w'
  int grid_points = 0;
  double radius = 0.0;
};

NondegeneracyReport verify_nondegeneracy(const Profile& pr, double R = 16.0, int ne = 3200);

}  // namespace spikes
