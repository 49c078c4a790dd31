#include "omcsim/drift.hpp"

#include <cmath>

namespace omcsim {

DriftMatrix build_drift_matrix(const SimParams& p) {
  p.validate();
  const auto r = DerivedRates::from(p);
  const cx ig(0.0, p.g);
  // coupling generated by the beam-splitter terms a b† + a† b
  const cx rot = ig;
  // coupling generated by the pair terms a b + a† b†, dropped under rwa
  const cx cnt = p.rwa ? cx(0, 0) : ig;

  DriftMatrix k;
  k << -r.kappa_t, 0, -rot, -cnt,
       0, -std::conj(r.kappa_t), cnt, rot,
       -rot, -cnt, -r.mu_t, 0,
       cnt, rot, 0, -std::conj(r.mu_t);
  return k;
}

Mat4c noise_drift(const SimParams& p) {
  p.validate();
  const auto r = DerivedRates::from(p);
  const cx ig(0.0, p.g);

  Mat4c n;
  n << -r.sigma, 0, -ig, -ig,
       0, -(p.kappa + p.gamma) / 2, ig, ig,
       -ig, -ig, -r.tau_plus, 0,
       ig, ig, 0, -std::conj(r.tau_minus);
  return n;
}

NormalModes normal_mode_frequencies(const SimParams& p) {
  p.validate();
  const double d2 = p.delta * p.delta;
  const double m2 = p.omega_m * p.omega_m;
  const double disc = (d2 - m2) * (d2 - m2) + 16 * p.g * p.g * p.delta * p.omega_m;
  // disc >= 0 whenever delta >= 0; keep the complex root for completeness
  const cx root = std::sqrt(cx(disc, 0.0));
  const cx wp2 = 0.5 * (cx(d2 + m2, 0.0) + root);
  const cx wm2 = 0.5 * (cx(d2 + m2, 0.0) - root);

  NormalModes nm;
  nm.omega_plus = std::sqrt(wp2);
  nm.omega_minus = std::sqrt(wm2);
  nm.oscillatory = is_oscillatory(p);
  return nm;
}

bool is_oscillatory(const SimParams& p) {
  p.validate();
  return 4 * p.g * p.g <= p.delta * p.omega_m;
}

}  // namespace omcsim
