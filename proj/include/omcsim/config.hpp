#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "omcsim/fock.hpp"
#include "omcsim/scenarios.hpp"

namespace omcsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { moments, oracle, both };

// Everything one run needs, mirroring the flat config-file schema with
// sections [params] [source] [solver] [output]. Unknown keys are rejected.
struct RunConfig {
  Scenario scenario;  // params + source + nbar_init + grid + name
  RunMode mode = RunMode::moments;
  SolverOptions solver;
  TruncationSpec cutoffs{5, 5, 1};
  std::string csv_path;
  std::string svg_path;

  void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Round-trip serialization; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

std::string serialize_scenario(const Scenario& s);
Scenario scenario_from_text(const std::string& text);

RunMode parse_run_mode(std::string_view s);
const char* run_mode_name(RunMode m);

// CSV with header t,n_a,n_b,re_cross; 12 significant digits, '.' decimal
// point, '\n' row terminator.
void write_csv(std::ostream& os, const TimeSeries& ts);
void write_csv_file(const std::string& path, const TimeSeries& ts);

// Sidecar text record echoing the configuration next to a result file.
void write_meta_file(const std::string& path, const RunConfig& c);

// number formatting used for every emitted value
std::string format_g12(double v);

}  // namespace omcsim
