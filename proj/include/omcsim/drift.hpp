#pragma once

#include <Eigen/Dense>

#include "omcsim/params.hpp"

namespace omcsim {

using Mat4c = Eigen::Matrix4cd;

// First-moment drift matrix over the operator vector (a, a†, b, b†):
// diagonal (-kappa_t, -kappa_t*, -mu_t, -mu_t*) with ±ig couplings.
// With rwa=true the four entries generated by the pair-creation terms
// ab / a†b† are zero, leaving the beam-splitter pattern.
using DriftMatrix = Mat4c;

DriftMatrix build_drift_matrix(const SimParams& p);

// Drift of the source-system cross moments (<ac>, <a†c>, <bc>, <b†c>):
// diagonal (-sigma, -(kappa+gamma)/2, -tau_plus, -tau_minus*).
// Independent of the rwa flag; only the opto-mechanical block is switched.
Mat4c noise_drift(const SimParams& p);

struct NormalModes {
  cx omega_plus;
  cx omega_minus;
  bool oscillatory;  // both squared frequencies real and >= 0
};

// Hybridized mode frequencies of the undamped linear system,
//   w±² = (delta² + omega_m² ± sqrt((delta²-omega_m²)² + 16 g² delta omega_m))/2,
// returned as principal square roots. Below the oscillation threshold
// (4g² > delta omega_m) omega_minus is complex; use the flag for decisions.
NormalModes normal_mode_frequencies(const SimParams& p);

// True iff 4 g² <= delta * omega_m.
bool is_oscillatory(const SimParams& p);

}  // namespace omcsim
