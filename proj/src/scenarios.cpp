#include "omcsim/scenarios.hpp"

#include <cmath>

namespace omcsim {

namespace {

Scenario make(std::string name, double g, const SourceSpec& src,
              double nbar = 0.0, double mu = 1e-3) {
  Scenario s;
  s.name = std::move(name);
  s.params = strong_coupling_params(g, nbar, mu);
  s.source = src;
  s.nbar_init = nbar;
  s.t_end = 20.0;
  s.samples = 2000;
  return s;
}

std::vector<Scenario> build_registry() {
  const double r5 = std::sqrt(5.0);
  std::vector<Scenario> reg;
  for (double g : {0.1, 0.5, 1.0, 1.5}) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fig2a-g%.1f", g);
    reg.push_back(make(buf, g, SourceSpec::fock(1)));
  }
  reg.push_back(make("fig2b", 1.5, SourceSpec::fock(1)));
  reg.push_back(make("fig2b-expmu", 1.5, SourceSpec::fock(1), 0.0,
                     mu_experimental));
  reg.push_back(make("fig3", 2.0, SourceSpec::fock(1)));
  reg.push_back(make("fig4-fock5", 1.5, SourceSpec::fock(5)));
  reg.push_back(make("fig4-coh-real", 1.5, SourceSpec::coherent(cx(r5, 0))));
  reg.push_back(make("fig4-coh-imag", 1.5, SourceSpec::coherent(cx(0, r5))));
  reg.push_back(make("fig5", 1.5, SourceSpec::fock(1), 1000.0));
  reg.push_back(make("fig5-nbar0", 1.5, SourceSpec::fock(1), 0.0));
  return reg;
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> reg = build_registry();
  return reg;
}

Scenario preset(std::string_view name) {
  for (const auto& s : scenario_registry()) {
    if (s.name == name) return s;
  }
  throw InvalidParameter("unknown preset '" + std::string(name) + "'");
}

TimeSeries run_scenario(const Scenario& s, const SolverOptions& opt) {
  if (!(s.t_end > 0) || s.samples < 2) {
    throw InvalidParameter("run_scenario: need t_end > 0 and samples >= 2");
  }

  MomentState init;
  init.time = 0.0;
  init.corr = steady_state(s.params, s.nbar_init);
  init.noise = NoiseVector{};  // source uncorrelated at injection
  init.source = source_moments(s.source, s.params.gamma, s.params.delta, 0.0);

  const AffineSystem sys = assemble_affine_system(s.params, s.source);
  const auto states = integrate(sys, init, s.t_end, s.samples, opt);

  TimeSeries ts;
  ts.metadata = RunMeta{s.name, opt.rel_tol, opt.abs_tol, opt.fixed_dt};
  ts.times.reserve(states.size());
  for (const auto& st : states) {
    const Observables o = observables(st);
    ts.times.push_back(st.time);
    ts.n_a.push_back(o.n_a);
    ts.n_b.push_back(o.n_b);
    ts.cross.push_back(o.re_cross);
  }
  return ts;
}

std::vector<std::pair<double, double>> peak_census(
    std::span<const double> times, std::span<const double> values,
    int window) {
  const std::size_t n = values.size();
  if (n < 3 || times.size() != n) {
    throw InvalidParameter("peak_census: need >= 3 equally sized samples");
  }
  if (window < 1 || window % 2 == 0) {
    throw InvalidParameter("peak_census: window must be odd and >= 1");
  }

  std::vector<double> y(values.begin(), values.end());
  if (window > 1) {
    const int hw = window / 2;
    std::vector<double> sm(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= static_cast<std::size_t>(hw) ? i - hw : 0;
      const std::size_t hi = std::min(n - 1, i + hw);
      double acc = 0;
      for (std::size_t j = lo; j <= hi; ++j) acc += y[j];
      sm[i] = acc / double(hi - lo + 1);
    }
    y.swap(sm);
  }

  std::vector<std::pair<double, double>> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (y[i] == y[i - 1]) continue;  // not the first index of a plateau
    if (y[i] <= y[i - 1]) continue;
    // scan over a possible plateau to the first differing value
    std::size_t j = i;
    while (j + 1 < n && y[j + 1] == y[i]) ++j;
    if (j + 1 < n && y[j + 1] < y[i]) {
      peaks.emplace_back(times[i], values[i]);
    }
    i = j;
  }
  return peaks;
}

std::vector<std::pair<double, double>> peak_census(const TimeSeries& ts,
                                                   int window) {
  return peak_census(ts.times, ts.n_a, window);
}

}  // namespace omcsim
