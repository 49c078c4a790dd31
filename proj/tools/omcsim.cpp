// omcsim - cascaded opto-mechanical cavity simulator, command-line front end.
//
// Subcommands: simulate, modes, steady-state, oracle, sweep, reproduce.
// Exit codes: 0 success, 2 usage/config error, 3 numerical failure.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "omcsim/config.hpp"
#include "omcsim/svg.hpp"

namespace fs = std::filesystem;
using namespace omcsim;

namespace {

struct CliOptions {
  std::string config_path;
  std::string preset_name;
  std::optional<double> kappa, gamma, mu, nbar, omega_m, delta, g;
  std::optional<bool> rwa;
  std::optional<std::string> source_kind;
  std::optional<int> source_n;
  std::optional<double> beta_re, beta_im;
  std::optional<double> rel_tol, abs_tol, fixed_dt, t_end;
  std::optional<int> samples;
  std::optional<int> na_max, nb_max, nc_max;
  std::optional<std::string> mode;
  std::string out_path, svg_path, name;
};

void add_common_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--config", o.config_path, "config file (ini-style)");
  cmd->add_option("--preset", o.preset_name, "scenario registry entry");
  cmd->add_option("--kappa", o.kappa, "optical cavity decay rate");
  cmd->add_option("--gamma", o.gamma, "source cavity decay rate");
  cmd->add_option("--mu", o.mu, "mechanical decay rate");
  cmd->add_option("--nbar", o.nbar, "thermal phonon occupation (bath)");
  cmd->add_option("--omega-m", o.omega_m, "mechanical frequency");
  cmd->add_option("--delta", o.delta, "effective detuning");
  cmd->add_option("--g", o.g, "effective coupling");
  cmd->add_option("--rwa", o.rwa, "red-sideband (beam-splitter) coupling only");
  cmd->add_option("--source", o.source_kind, "source kind: fock|coherent");
  cmd->add_option("--n", o.source_n, "Fock photon number");
  cmd->add_option("--beta-re", o.beta_re, "coherent amplitude, real part");
  cmd->add_option("--beta-im", o.beta_im, "coherent amplitude, imag part");
  cmd->add_option("--rel-tol", o.rel_tol, "relative tolerance");
  cmd->add_option("--abs-tol", o.abs_tol, "absolute tolerance");
  cmd->add_option("--fixed-dt", o.fixed_dt, "fixed-step mode step size");
  cmd->add_option("--t-end", o.t_end, "integration end time");
  cmd->add_option("--samples", o.samples, "output grid size");
  cmd->add_option("--na-max", o.na_max, "oracle cutoff, mode a");
  cmd->add_option("--nb-max", o.nb_max, "oracle cutoff, mode b");
  cmd->add_option("--nc-max", o.nc_max, "oracle cutoff, source mode");
}

RunConfig build_config(const CliOptions& o) {
  RunConfig c;
  if (!o.config_path.empty()) c = load_config_file(o.config_path);
  if (!o.preset_name.empty()) {
    c.scenario = preset(o.preset_name);
    if (c.csv_path.empty()) c.csv_path = c.scenario.name + ".csv";
  }
  auto& s = c.scenario;
  if (o.kappa) s.params.kappa = *o.kappa;
  if (o.gamma) s.params.gamma = *o.gamma;
  if (o.mu) s.params.mu = *o.mu;
  if (o.nbar) {
    s.params.nbar = *o.nbar;
    s.nbar_init = *o.nbar;
  }
  if (o.omega_m) s.params.omega_m = *o.omega_m;
  if (o.delta) s.params.delta = *o.delta;
  if (o.g) s.params.g = *o.g;
  if (o.rwa) s.params.rwa = *o.rwa;
  if (o.source_kind) {
    if (*o.source_kind == "fock") s.source.kind = SourceKind::Fock;
    else if (*o.source_kind == "coherent") s.source.kind = SourceKind::Coherent;
    else throw ConfigError("unknown source kind '" + *o.source_kind + "'");
  }
  if (o.source_n) s.source.n = *o.source_n;
  if (o.beta_re) s.source.beta.real(*o.beta_re);
  if (o.beta_im) s.source.beta.imag(*o.beta_im);
  if (o.rel_tol) c.solver.rel_tol = *o.rel_tol;
  if (o.abs_tol) c.solver.abs_tol = *o.abs_tol;
  if (o.fixed_dt) c.solver.fixed_dt = *o.fixed_dt;
  if (o.t_end) s.t_end = *o.t_end;
  if (o.samples) s.samples = *o.samples;
  if (o.na_max) c.cutoffs.n_a_max = *o.na_max;
  if (o.nb_max) c.cutoffs.n_b_max = *o.nb_max;
  if (o.nc_max) c.cutoffs.n_c_max = *o.nc_max;
  if (o.mode) c.mode = parse_run_mode(*o.mode);
  if (!o.name.empty()) s.name = o.name;
  if (!o.out_path.empty()) c.csv_path = o.out_path;
  if (!o.svg_path.empty()) c.svg_path = o.svg_path;
  if (s.name.empty()) s.name = "run";
  if (c.csv_path.empty()) c.csv_path = s.name + ".csv";
  c.validate();
  return c;
}

// env-selected default output directory for relative paths
std::string resolve_out(const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  const char* dir = std::getenv("OMCSIM_OUT_DIR");
  if (!dir || !*dir) return path;
  fs::create_directories(dir);
  return (fs::path(dir) / path).string();
}

std::string with_suffix(const std::string& csv, const std::string& tag) {
  fs::path p(csv);
  fs::path q = p.parent_path() / (p.stem().string() + tag + p.extension().string());
  return q.string();
}

// Product initial state (vacuum a, thermal(nbar_init) b, source c) for
// oracle runs and for apples-to-apples mode=both comparisons; the plain
// moments mode uses the coupled pre-injection steady state instead.
MomentState product_moment_state(const Scenario& s) {
  MomentState init;
  std::array<cx, n_corr> r{};
  r[m_aad] = 1.0;
  r[m_bbd] = s.nbar_init + 1.0;
  r[m_bdb] = s.nbar_init;
  init.corr = CorrelationMatrix::from_reduced(r);
  init.source = source_moments(s.source, s.params.gamma, s.params.delta, 0.0);
  return init;
}

TimeSeries trace_from_states(const Scenario& s, const SolverOptions& opt,
                             const std::vector<MomentState>& states) {
  TimeSeries ts;
  ts.metadata = RunMeta{s.name, opt.rel_tol, opt.abs_tol, opt.fixed_dt};
  for (const auto& st : states) {
    const Observables ob = observables(st);
    ts.times.push_back(st.time);
    ts.n_a.push_back(ob.n_a);
    ts.n_b.push_back(ob.n_b);
    ts.cross.push_back(ob.re_cross);
  }
  return ts;
}

TimeSeries run_moments_product_start(const Scenario& s,
                                     const SolverOptions& opt) {
  const AffineSystem sys = assemble_affine_system(s.params, s.source);
  return trace_from_states(
      s, opt, integrate(sys, product_moment_state(s), s.t_end, s.samples, opt));
}

TimeSeries run_oracle(const RunConfig& c) {
  const Scenario& s = c.scenario;
  TruncationSpec tr = c.cutoffs;
  if (s.source.kind == SourceKind::Coherent) {
    const int need = coherent_cutoff(s.source.beta, 1e-6);
    if (tr.n_c_max < need) {
      std::cerr << "note: raising nc_max to " << need
                << " (coherent tail < 1e-6)\n";
      tr.n_c_max = need;
    }
  } else if (tr.n_c_max < s.source.n) {
    std::cerr << "note: raising nc_max to " << s.source.n << "\n";
    tr.n_c_max = s.source.n;
  }
  tr.validate();

  const Liouvillian gen = build_liouvillian(s.params, tr);
  const DensityMatrix rho0 =
      DensityMatrix::product_state(tr, s.source, s.nbar_init);

  std::vector<double> grid(s.samples);
  for (int i = 0; i < s.samples; ++i) grid[i] = s.t_end * i / (s.samples - 1);

  IntegratorOptions iopt;
  iopt.rel_tol = c.solver.rel_tol;
  iopt.abs_tol = c.solver.abs_tol;
  iopt.fixed_dt = c.solver.fixed_dt;

  TimeSeries ts;
  ts.metadata = RunMeta{s.name + "-oracle", iopt.rel_tol, iopt.abs_tol,
                        iopt.fixed_dt};
  ts.times.resize(grid.size());
  ts.n_a.resize(grid.size());
  ts.n_b.resize(grid.size());
  ts.cross.resize(grid.size());
  double max_leak = 0;
  evolve_rho(
      gen, rho0, grid,
      [&](std::size_t i, double t, const DensityMatrix& rho) {
        ts.times[i] = t;
        ts.n_a[i] = expectation(rho, FockObservable::n_a).real();
        ts.n_b[i] = expectation(rho, FockObservable::n_b).real();
        ts.cross[i] = 2.0 * expectation(rho, FockObservable::adc).real();
        max_leak = std::max(max_leak, leakage(rho).max());
      },
      iopt);
  std::cerr << "oracle cutoffs (" << tr.n_a_max << "," << tr.n_b_max << ","
            << tr.n_c_max << "), max top-level population " << max_leak
            << "\n";
  return ts;
}

void emit_outputs(const RunConfig& c, const TimeSeries& ts,
                  const std::string& csv_path) {
  const std::string csv = resolve_out(csv_path);
  write_csv_file(csv, ts);
  write_meta_file(csv + ".meta", c);
  std::cout << "wrote " << csv << "\n";
  if (!c.svg_path.empty()) {
    try {
      std::vector<PlotSeries> series{{"n_a", ts.times, ts.n_a},
                                     {"n_b", ts.times, ts.n_b}};
      write_svg_file(resolve_out(c.svg_path),
                     render_svg_plot(c.scenario.name, "t [1/kappa]",
                                     "occupation", series));
      std::cout << "wrote " << resolve_out(c.svg_path) << "\n";
    } catch (const std::exception& e) {
      std::cerr << "warning: plot emission failed: " << e.what() << "\n";
    }
  }
}

int cmd_simulate(const CliOptions& o, bool force_oracle) {
  RunConfig c = build_config(o);
  if (force_oracle) c.mode = RunMode::oracle;

  if (c.mode == RunMode::moments) {
    emit_outputs(c, run_scenario(c.scenario, c.solver), c.csv_path);
    return 0;
  }
  if (c.mode == RunMode::oracle) {
    emit_outputs(c, run_oracle(c), c.csv_path);
    return 0;
  }
  // both: same (product) initial state on the two solvers, then compare
  const TimeSeries tm = run_moments_product_start(c.scenario, c.solver);
  const TimeSeries to = run_oracle(c);
  emit_outputs(c, tm, c.csv_path);
  emit_outputs(c, to, with_suffix(c.csv_path, "_oracle"));
  double dev = 0;
  for (std::size_t i = 0; i < tm.n_a.size(); ++i) {
    dev = std::max(dev, std::abs(tm.n_a[i] - to.n_a[i]));
  }
  std::cout << "max|Δn_a| = " << format_g12(dev) << "\n";
  return 0;
}

int cmd_modes(const CliOptions& o) {
  RunConfig c = build_config(o);
  const auto nm = normal_mode_frequencies(c.scenario.params);
  auto fmt_c = [](cx v) {
    if (std::abs(v.imag()) < 1e-14) return format_g12(v.real());
    return format_g12(v.real()) + (v.imag() < 0 ? "-" : "+") +
           format_g12(std::abs(v.imag())) + "i";
  };
  std::cout << "omega_plus=" << fmt_c(nm.omega_plus)
            << " omega_minus=" << fmt_c(nm.omega_minus) << " oscillatory="
            << (nm.oscillatory ? "true" : "false") << " strong_coupling="
            << (c.scenario.params.g > c.scenario.params.kappa ? "true"
                                                              : "false")
            << "\n";
  return 0;
}

int cmd_steady_state(const CliOptions& o) {
  RunConfig c = build_config(o);
  const auto ss = steady_state(c.scenario.params, c.scenario.nbar_init);
  std::cout << "n_a=" << format_g12(ss.c(1, 0).real())
            << " n_b=" << format_g12(ss.c(3, 2).real()) << "\n";
  static const char* names[4] = {"a", "ad", "b", "bd"};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      std::cout << "C[" << names[i] << "," << names[j]
                << "] = " << format_g12(ss.c(i, j).real()) << " "
                << (ss.c(i, j).imag() < 0 ? "-" : "+") << " "
                << format_g12(std::abs(ss.c(i, j).imag())) << "i\n";
    }
  }
  return 0;
}

struct SweepOptions {
  std::string axis;
  std::vector<double> values;
  double from = 0, to = 0;
  int points = 0;
  bool log_grid = false;
  int jobs = 0;
};

void apply_axis(Scenario& s, const std::string& axis, double v) {
  if (axis == "kappa") s.params.kappa = v;
  else if (axis == "gamma") s.params.gamma = v;
  else if (axis == "mu") s.params.mu = v;
  else if (axis == "nbar") { s.params.nbar = v; s.nbar_init = v; }
  else if (axis == "omega_m") s.params.omega_m = v;
  else if (axis == "delta") s.params.delta = v;
  else if (axis == "g") s.params.g = v;
  else throw ConfigError("malformed axis: unknown parameter '" + axis + "'");
}

int cmd_sweep(const CliOptions& o, const SweepOptions& so) {
  RunConfig base = build_config(o);

  std::vector<double> grid = so.values;
  if (grid.empty()) {
    if (so.points < 1) throw ConfigError("malformed axis: need points >= 1");
    if (so.points == 1) {
      grid.push_back(so.from);
    } else if (so.log_grid) {
      if (!(so.from > 0) || !(so.to > 0)) {
        throw ConfigError("malformed axis: log grid needs positive bounds");
      }
      for (int i = 0; i < so.points; ++i) {
        grid.push_back(so.from * std::pow(so.to / so.from,
                                          double(i) / (so.points - 1)));
      }
    } else {
      for (int i = 0; i < so.points; ++i) {
        grid.push_back(so.from + (so.to - so.from) * i / (so.points - 1));
      }
    }
  }
  if (grid.empty()) throw ConfigError("malformed axis: empty grid");
  {
    Scenario probe = base.scenario;  // reject bad axis names before running
    apply_axis(probe, so.axis, grid.front());
  }

  struct Row {
    double value, peak_na, t_first;
    int revivals;
  };
  std::vector<Row> rows(grid.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_msg;
  std::mutex err_mu;

  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t nworkers = std::min<std::size_t>(
      grid.size(), so.jobs > 0 ? so.jobs : (hw ? hw : 2));
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size() || failed.load()) return;
      try {
        Scenario s = base.scenario;
        apply_axis(s, so.axis, grid[i]);
        const TimeSeries ts = run_scenario(s, base.solver);
        const auto peaks = peak_census(ts);
        double pk = ts.n_a[0];
        std::size_t pk_i = 0;
        for (std::size_t k = 1; k < ts.n_a.size(); ++k) {
          if (ts.n_a[k] > pk) { pk = ts.n_a[k]; pk_i = k; }
        }
        rows[i] = Row{grid[i], pk,
                      peaks.empty() ? ts.times[pk_i] : peaks.front().first,
                      static_cast<int>(peaks.size())};
      } catch (const std::exception& e) {
        std::scoped_lock lk(err_mu);
        failed = true;
        error_msg = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < nworkers; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed) throw SolverError("sweep: " + error_msg);

  std::ostream* os = &std::cout;
  std::ofstream file;
  std::string csv;
  if (!base.csv_path.empty() && !o.out_path.empty()) {
    csv = resolve_out(base.csv_path);
    file.open(csv, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + csv + "'");
    os = &file;
  }
  *os << so.axis << ",peak_n_a,t_first_peak,revivals\n";
  for (const auto& r : rows) {
    *os << format_g12(r.value) << ',' << format_g12(r.peak_na) << ','
        << format_g12(r.t_first) << ',' << r.revivals << '\n';
  }
  if (!csv.empty()) std::cout << "wrote " << csv << "\n";
  return 0;
}

int cmd_reproduce(const std::string& fig, const std::string& out_dir) {
  static const std::map<std::string, std::vector<std::string>> figures = {
      {"fig2a", {"fig2a-g0.1", "fig2a-g0.5", "fig2a-g1.0", "fig2a-g1.5"}},
      {"fig2b", {"fig2b"}},
      {"fig3", {"fig3"}},
      {"fig4", {"fig4-fock5", "fig4-coh-real", "fig4-coh-imag"}},
      {"fig5", {"fig5", "fig5-nbar0"}},
  };
  const auto it = figures.find(fig);
  if (it == figures.end()) {
    throw ConfigError("unknown figure id '" + fig +
                      "' (fig2a|fig2b|fig3|fig4|fig5)");
  }
  if (!out_dir.empty()) fs::create_directories(out_dir);
  auto in_dir = [&](const std::string& f) {
    return out_dir.empty() ? f : (fs::path(out_dir) / f).string();
  };

  std::vector<TimeSeries> traces;
  std::vector<PlotSeries> series;
  for (const auto& name : it->second) {
    RunConfig c;
    c.scenario = preset(name);
    c.csv_path = in_dir(name + ".csv");
    const TimeSeries ts = run_scenario(c.scenario, c.solver);
    write_csv_file(resolve_out(c.csv_path), ts);
    write_meta_file(resolve_out(c.csv_path) + ".meta", c);
    std::cout << "wrote " << resolve_out(c.csv_path) << "\n";
    traces.push_back(ts);
  }
  for (std::size_t i = 0; i < traces.size(); ++i) {
    series.push_back({it->second[i] + " n_a", traces[i].times, traces[i].n_a});
    if (fig == "fig2b") {
      series.push_back({"fig2b n_b", traces[i].times, traces[i].n_b});
    }
  }
  try {
    const std::string svg = resolve_out(in_dir(fig + ".svg"));
    write_svg_file(svg, render_svg_plot(fig, "t [1/kappa]", "occupation",
                                        series));
    std::cout << "wrote " << svg << "\n";
  } catch (const std::exception& e) {
    std::cerr << "warning: plot emission failed: " << e.what() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cascaded opto-mechanical cavity simulator"};
  app.require_subcommand(1);

  CliOptions o;
  SweepOptions so;
  std::string fig_id, out_dir;

  auto* sim = app.add_subcommand("simulate", "integrate one configuration");
  add_common_options(sim, o);
  sim->add_option("--mode", o.mode, "moments|oracle|both");
  sim->add_option("--out", o.out_path, "CSV output path");
  sim->add_option("--svg", o.svg_path, "SVG plot path");
  sim->add_option("--name", o.name, "run label");

  auto* mo = app.add_subcommand("modes", "normal-mode frequencies");
  add_common_options(mo, o);

  auto* ss = app.add_subcommand("steady-state",
                                "pre-injection steady state (gamma=0)");
  add_common_options(ss, o);
  ss->add_option("--nbar-init", o.nbar, "occupation for the preparation");

  auto* orc = app.add_subcommand("oracle", "truncated Fock-space run");
  add_common_options(orc, o);
  orc->add_option("--out", o.out_path, "CSV output path");
  orc->add_option("--svg", o.svg_path, "SVG plot path");
  orc->add_option("--name", o.name, "run label");

  auto* sw = app.add_subcommand("sweep", "scan one parameter");
  add_common_options(sw, o);
  sw->add_option("--axis", so.axis, "parameter to sweep")->required();
  sw->add_option("--values", so.values, "explicit grid values");
  sw->add_option("--from", so.from, "grid start");
  sw->add_option("--to", so.to, "grid end");
  sw->add_option("--points", so.points, "grid size");
  sw->add_flag("--log", so.log_grid, "geometric grid");
  sw->add_option("--jobs", so.jobs, "worker threads");
  sw->add_option("--out", o.out_path, "CSV output path");

  auto* rep = app.add_subcommand("reproduce", "run a bundled figure scenario");
  rep->add_option("figure", fig_id, "fig2a|fig2b|fig3|fig4|fig5")->required();
  rep->add_option("--out-dir", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, false);
    if (mo->parsed()) return cmd_modes(o);
    if (ss->parsed()) return cmd_steady_state(o);
    if (orc->parsed()) return cmd_simulate(o, true);
    if (sw->parsed()) return cmd_sweep(o, so);
    if (rep->parsed()) return cmd_reproduce(fig_id, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
