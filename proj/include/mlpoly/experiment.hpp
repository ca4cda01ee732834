#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlpoly/ldpc.hpp"
#include "mlpoly/restoration.hpp"

namespace mlpoly {

// Invalid configuration or input files; the CLI exits with code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A solve that did not reach an optimum, or an experiment record that breaks
// the relaxation ordering; the CLI exits with code 3.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Application : std::uint8_t { kRestore, kDecode };

// Flat key = value settings; see config_keys() for the documented keys.
struct ExperimentConfig {
  Application application = Application::kRestore;

  SyntheticKind image_kind = SyntheticKind::kTopLeft;
  int width = 15;
  int height = 15;
  std::string image;  // PBM ground truth, replaces the synthetic image when set
  double alpha = 25.0;
  PatternPotentials phi = {-10.0, -20.0, -30.0, -40.0};
  std::vector<std::string> phi_learn;  // PBM files; phi = -pattern frequencies

  int n = 60;
  int beta = 4;
  int gamma = 3;
  std::uint64_t code_seed = 1;
  std::string code;  // parity-check file, replaces the generated code when set

  std::vector<double> p_grid = {0.1};
  int trials = 1;
  std::uint64_t seed_base = 0;
  std::vector<std::string> methods;  // empty: the application's defaults
  std::string output;                // CSV path, empty for stdout
  std::string summary;               // summary CSV path, empty for none
  int workers = 1;
  long max_nodes = 1'000'000;
};

// "key: meaning" lines for every accepted key, in documentation order.
std::vector<std::string> config_keys();

// "[a:s:b]" (a, a+s, ..., up to b), a single value, or a comma list. Values
// are rounded to 12 decimals. Throws ConfigError.
std::vector<double> parse_p_grid(std::string_view text);

// Throws ConfigError for an unknown key or a bad value.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

// Lines "key = value"; blank lines and lines starting with '#' are skipped.
ExperimentConfig read_config(std::istream& is);

// Checks ranges and method names. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

// Methods of the run: cfg.methods or the defaults of the application.
std::vector<std::string> experiment_methods(const ExperimentConfig& cfg);

// Seed of trial t at p-grid position k; distinct within a run.
std::uint64_t experiment_seed(const ExperimentConfig& cfg, int k, int t);

// Ground truth image and potentials of a restore run (learned phi applied).
BitImage experiment_truth(const ExperimentConfig& cfg);
PatternPotentials experiment_phi(const ExperimentConfig& cfg);
// Code of a decode run.
LdpcCode experiment_code(const ExperimentConfig& cfg);

inline constexpr std::string_view kRestoreCsvHeader =
    "kind,p,seed,lp_value,ip_value,r_g,is_binary,partial_recovery,wall_time_s";
inline constexpr std::string_view kDecodeCsvHeader =
    "n,beta,gamma,method,p,seed,lp_value,is_binary,partial_recovery,wall_time_s";
inline constexpr std::string_view kSummaryCsvHeader =
    "method,p,trials,mean_r_g,mean_abs_gap,tightness,mean_recovery,mean_wall_time_s";

struct ExperimentOutput {
  std::string csv;      // one row per (method, p, trial), in that order
  std::string summary;  // one row per (method, p)
};

// Runs every (p, trial) instance on cfg.workers threads. Restore values
// include the model constant, so they are energies of the original problem;
// ip_value and r_g are filled when an IP method is in the run. Every record
// is checked against the relaxation ordering. Throws ConfigError or
// SolverError.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// SHA-256 (hex) of the CSV with every timing column (name ending in
// "wall_time_s") removed.
std::string csv_determinism_hash(std::string_view csv);

// Long-format "method,p,mean,stderr" table of a metric (r_g, tightness,
// recovery or time) over an experiment CSV of either application. Groups
// appear by first method occurrence, then ascending p. Throws ConfigError for
// an unknown metric or a CSV without data rows.
std::string plot_data(std::string_view csv, std::string_view metric);

}  // namespace mlpoly
