#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace omcsim {

using cx = std::complex<double>;

// Reduced Planck constant [J s], CODATA 2018.
inline constexpr double hbar = 1.054571817e-34;

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failures: step-size underflow, unstable fixed-point solves, ...
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fock-space cutoff too small for the requested evolution.
struct TruncationError : SolverError {
  using SolverError::SolverError;
};

// Dimensionful cavity/mirror parameters, used only for the bare
// radiation-pressure coupling rate.
struct PhysicalParams {
  double omega_c = 0;       // optical angular frequency [rad/s]
  double cavity_length = 0; // [m]
  double eff_mass = 0;      // effective mirror mass [kg]
  double omega_m_phys = 0;  // mechanical angular frequency [rad/s]

  void validate() const;
};

// Bare single-photon coupling rate G = (omega_c/L) sqrt(hbar/(m omega_m)).
double bare_coupling(const PhysicalParams& p);

// Pump-enhanced coupling g = G B alpha0; alpha0 is the steady intracavity
// amplitude with the phase convention fixed so that g is real and >= 0.
double effective_coupling(double bare_g, double alpha0);

// Dimensionless simulation parameters. All rates and frequencies are in
// units of the optical cavity decay rate (kappa = 1 conventionally, but the
// field stays configurable so dimensional runs remain possible).
struct SimParams {
  double kappa = 1.0;   // optical cavity energy decay rate
  double gamma = 0.0;   // source cavity decay rate
  double mu = 0.0;      // mechanical decay rate
  double nbar = 0.0;    // mean thermal phonon occupation of the bath
  double omega_m = 1.0; // mechanical frequency
  double delta = 0.0;   // effective cavity detuning
  double g = 0.0;       // effective opto-mechanical coupling (real, >= 0)
  bool rwa = false;     // keep only the beam-splitter (red-sideband) coupling

  void validate() const;
};

// Complex half-width rates entering the drift matrices.
struct DerivedRates {
  cx kappa_t;   // i delta + kappa/2
  cx mu_t;      // i omega_m + mu/2
  cx sigma;     // 2 i delta + (kappa + gamma)/2
  cx tau_plus;  // i (omega_m + delta) + (mu + gamma)/2
  cx tau_minus; // i (omega_m - delta) + (mu + gamma)/2

  static DerivedRates from(const SimParams& p);
};

// Groblacher-type strong-coupling parameter set in units of kappa;
// mu = 1e-3 is the value used by the bundled scenarios, mu_experimental
// the measured mechanical linewidth.
inline constexpr double mu_experimental = 6.5e-4;

SimParams strong_coupling_params(double g = 1.5, double nbar = 0.0,
                                 double mu = 1e-3);

}  // namespace omcsim
