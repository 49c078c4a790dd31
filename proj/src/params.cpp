#include "omcsim/params.hpp"

#include <cmath>

namespace omcsim {

void PhysicalParams::validate() const {
  if (!(omega_c > 0) || !(cavity_length > 0) || !(eff_mass > 0) ||
      !(omega_m_phys > 0)) {
    throw InvalidParameter(
        "PhysicalParams: all fields must be strictly positive");
  }
}

double bare_coupling(const PhysicalParams& p) {
  p.validate();
  return (p.omega_c / p.cavity_length) *
         std::sqrt(hbar / (p.eff_mass * p.omega_m_phys));
}

double effective_coupling(double bare_g, double alpha0) {
  if (!(alpha0 >= 0)) {
    throw InvalidParameter("effective_coupling: alpha0 must be >= 0");
  }
  return bare_g * alpha0;
}

void SimParams::validate() const {
  auto fail = [](const std::string& what) {
    throw InvalidParameter("SimParams: " + what);
  };
  if (!(kappa > 0)) fail("kappa must be > 0");
  if (!(gamma >= 0)) fail("gamma must be >= 0");
  if (!(mu >= 0)) fail("mu must be >= 0");
  if (!(nbar >= 0)) fail("nbar must be >= 0");
  if (!(omega_m > 0)) fail("omega_m must be > 0");
  if (!(g >= 0)) fail("g must be >= 0 (coupling phase is fixed real)");
  if (!std::isfinite(delta)) fail("delta must be finite");
}

DerivedRates DerivedRates::from(const SimParams& p) {
  const cx i(0.0, 1.0);
  DerivedRates r;
  r.kappa_t = i * p.delta + p.kappa / 2;
  r.mu_t = i * p.omega_m + p.mu / 2;
  r.sigma = 2.0 * i * p.delta + (p.kappa + p.gamma) / 2;
  r.tau_plus = i * (p.omega_m + p.delta) + (p.mu + p.gamma) / 2;
  r.tau_minus = i * (p.omega_m - p.delta) + (p.mu + p.gamma) / 2;
  return r;
}

SimParams strong_coupling_params(double g, double nbar, double mu) {
  SimParams p;
  p.kappa = 1.0;
  p.gamma = 0.9;
  p.mu = mu;
  p.nbar = nbar;
  p.omega_m = 4.4;
  p.delta = 1.02 * 4.4;
  p.g = g;
  p.rwa = false;
  return p;
}

}  // namespace omcsim
