#include "omcsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace omcsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + v + "' for key '" + key + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer '" + v + "' for key '" + key + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean '" + v + "' for key '" + key + "'");
}

}  // namespace

void RunConfig::validate() const {
  scenario.params.validate();
  scenario.source.validate();
  if (!(scenario.t_end > 0)) throw ConfigError("t_end must be > 0");
  if (scenario.samples < 2) throw ConfigError("samples must be >= 2");
  if (!(solver.rel_tol > 0) || !(solver.abs_tol > 0)) {
    throw ConfigError("tolerances must be > 0");
  }
  if (solver.fixed_dt < 0) throw ConfigError("fixed_dt must be >= 0");
  if (mode != RunMode::moments) cutoffs.validate();
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("malformed section header at line " +
                          std::to_string(lineno));
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "params" && section != "source" && section != "solver" &&
          section != "output") {
        throw ConfigError("unknown section '[" + section + "]'");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value at line " + std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("key '" + key + "' outside any section");
    }

    auto& sc = c.scenario;
    if (section == "params") {
      if (key == "kappa") sc.params.kappa = to_double(key, val);
      else if (key == "gamma") sc.params.gamma = to_double(key, val);
      else if (key == "mu") sc.params.mu = to_double(key, val);
      else if (key == "nbar") sc.params.nbar = to_double(key, val);
      else if (key == "omega_m") sc.params.omega_m = to_double(key, val);
      else if (key == "delta") sc.params.delta = to_double(key, val);
      else if (key == "g") sc.params.g = to_double(key, val);
      else if (key == "rwa") sc.params.rwa = to_bool(key, val);
      else if (key == "nbar_init") sc.nbar_init = to_double(key, val);
      else throw ConfigError("unknown key '" + key + "' in [params]");
    } else if (section == "source") {
      if (key == "kind") {
        if (val == "fock") sc.source.kind = SourceKind::Fock;
        else if (val == "coherent") sc.source.kind = SourceKind::Coherent;
        else throw ConfigError("unknown source kind '" + val + "'");
      } else if (key == "n") sc.source.n = to_int(key, val);
      else if (key == "beta_re") sc.source.beta.real(to_double(key, val));
      else if (key == "beta_im") sc.source.beta.imag(to_double(key, val));
      else throw ConfigError("unknown key '" + key + "' in [source]");
    } else if (section == "solver") {
      if (key == "rel_tol") c.solver.rel_tol = to_double(key, val);
      else if (key == "abs_tol") c.solver.abs_tol = to_double(key, val);
      else if (key == "fixed_dt") c.solver.fixed_dt = to_double(key, val);
      else if (key == "t_end") sc.t_end = to_double(key, val);
      else if (key == "samples") sc.samples = to_int(key, val);
      else if (key == "mode") c.mode = parse_run_mode(val);
      else if (key == "na_max") c.cutoffs.n_a_max = to_int(key, val);
      else if (key == "nb_max") c.cutoffs.n_b_max = to_int(key, val);
      else if (key == "nc_max") c.cutoffs.n_c_max = to_int(key, val);
      else throw ConfigError("unknown key '" + key + "' in [solver]");
    } else {  // output
      if (key == "name") sc.name = val;
      else if (key == "csv") c.csv_path = val;
      else if (key == "svg") c.svg_path = val;
      else throw ConfigError("unknown key '" + key + "' in [output]");
    }
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string format_g12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string serialize_config(const RunConfig& c) {
  const auto& s = c.scenario;
  std::ostringstream os;
  os << "[params]\n";
  os << "kappa = " << format_g12(s.params.kappa) << "\n";
  os << "gamma = " << format_g12(s.params.gamma) << "\n";
  os << "mu = " << format_g12(s.params.mu) << "\n";
  os << "nbar = " << format_g12(s.params.nbar) << "\n";
  os << "omega_m = " << format_g12(s.params.omega_m) << "\n";
  os << "delta = " << format_g12(s.params.delta) << "\n";
  os << "g = " << format_g12(s.params.g) << "\n";
  os << "rwa = " << (s.params.rwa ? "true" : "false") << "\n";
  os << "nbar_init = " << format_g12(s.nbar_init) << "\n";
  os << "\n[source]\n";
  os << "kind = " << (s.source.kind == SourceKind::Fock ? "fock" : "coherent")
     << "\n";
  if (s.source.kind == SourceKind::Fock) {
    os << "n = " << s.source.n << "\n";
  } else {
    os << "beta_re = " << format_g12(s.source.beta.real()) << "\n";
    os << "beta_im = " << format_g12(s.source.beta.imag()) << "\n";
  }
  os << "\n[solver]\n";
  os << "t_end = " << format_g12(s.t_end) << "\n";
  os << "samples = " << s.samples << "\n";
  os << "rel_tol = " << format_g12(c.solver.rel_tol) << "\n";
  os << "abs_tol = " << format_g12(c.solver.abs_tol) << "\n";
  os << "fixed_dt = " << format_g12(c.solver.fixed_dt) << "\n";
  os << "mode = " << run_mode_name(c.mode) << "\n";
  os << "na_max = " << c.cutoffs.n_a_max << "\n";
  os << "nb_max = " << c.cutoffs.n_b_max << "\n";
  os << "nc_max = " << c.cutoffs.n_c_max << "\n";
  os << "\n[output]\n";
  if (!s.name.empty()) os << "name = " << s.name << "\n";
  if (!c.csv_path.empty()) os << "csv = " << c.csv_path << "\n";
  if (!c.svg_path.empty()) os << "svg = " << c.svg_path << "\n";
  return os.str();
}

std::string serialize_scenario(const Scenario& s) {
  RunConfig c;
  c.scenario = s;
  return serialize_config(c);
}

Scenario scenario_from_text(const std::string& text) {
  return parse_config_text(text).scenario;
}

RunMode parse_run_mode(std::string_view s) {
  if (s == "moments") return RunMode::moments;
  if (s == "oracle") return RunMode::oracle;
  if (s == "both") return RunMode::both;
  throw ConfigError("unknown mode '" + std::string(s) +
                    "' (expected moments|oracle|both)");
}

const char* run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::moments: return "moments";
    case RunMode::oracle: return "oracle";
    case RunMode::both: return "both";
  }
  return "?";
}

void write_csv(std::ostream& os, const TimeSeries& ts) {
  os << "t,n_a,n_b,re_cross\n";
  for (std::size_t i = 0; i < ts.times.size(); ++i) {
    os << format_g12(ts.times[i]) << ',' << format_g12(ts.n_a[i]) << ','
       << format_g12(ts.n_b[i]) << ',' << format_g12(ts.cross[i]) << '\n';
  }
}

void write_csv_file(const std::string& path, const TimeSeries& ts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_csv(out, ts);
}

void write_meta_file(const std::string& path, const RunConfig& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "# run record\n" << serialize_config(c);
}

}  // namespace omcsim
