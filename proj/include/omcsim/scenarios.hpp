#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "omcsim/moments.hpp"

namespace omcsim {

// A named run: parameters, source state, thermal occupation used for the
// pre-injection steady-state preparation, and the output grid.
struct Scenario {
  std::string name;
  SimParams params;
  SourceSpec source;
  double nbar_init = 0.0;
  double t_end = 20.0;
  int samples = 2000;
};

struct RunMeta {
  std::string scenario;
  double rel_tol = 0, abs_tol = 0, fixed_dt = 0;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> n_a;
  std::vector<double> n_b;
  std::vector<double> cross;  // Re <a†c + c†a>
  RunMeta metadata;
};

// Registered presets. The strong-coupling set kappa=1, gamma=0.9, mu=1e-3,
// omega_m=4.4, delta=1.02*omega_m underlies all of them:
//   fig2a-g{0.1,0.5,1.0,1.5}  single-photon traces across coupling strengths
//   fig2b                     g=1.5 photon/phonon pair
//   fig2b-expmu               same with the measured mechanical linewidth
//   fig3                      g=2.0
//   fig4-fock5 / fig4-coh-real / fig4-coh-imag   source-state comparison
//   fig5 / fig5-nbar0         hot mechanical bath and its cold reference
const std::vector<Scenario>& scenario_registry();

Scenario preset(std::string_view name);  // throws InvalidParameter if unknown

// Prepare the gamma=0 steady state at nbar_init, inject the source at t=0,
// integrate to t_end and sample the observables.
TimeSeries run_scenario(const Scenario& s, const SolverOptions& opt = {});

// Strict local maxima of y by 3-point comparison after an optional centered
// moving-average window (odd, 1 = none). A plateau reports its first index.
std::vector<std::pair<double, double>> peak_census(
    std::span<const double> times, std::span<const double> values,
    int window = 1);

std::vector<std::pair<double, double>> peak_census(const TimeSeries& ts,
                                                   int window = 1);

}  // namespace omcsim
