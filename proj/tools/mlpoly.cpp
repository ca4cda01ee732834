// Command-line front end: experiment runs, LP export, plot tables and
// instance generators. Exit codes: 0 success, 2 configuration error,
// 3 solver failure.

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "mlpoly/experiment.hpp"
#include "mlpoly/ldpc.hpp"
#include "mlpoly/lp_format.hpp"
#include "mlpoly/restoration.hpp"

namespace {

using namespace mlpoly;

constexpr int kConfigExit = 2;
constexpr int kSolverExit = 3;

// Options that mirror the flat config keys; "image_kind" becomes
// --image-kind and so on.
const char* const kKeys[] = {"image_kind", "width", "height",  "image",   "alpha",
                             "phi",        "phi_learn", "n",   "beta",    "gamma",
                             "code_seed",  "code",  "p",       "trials",  "seed_base",
                             "methods",    "output", "summary", "workers", "max_nodes"};

struct ConfigFlags {
  std::string config_path;
  std::string application;
  std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags, bool with_application) {
  cmd->add_option("--config", flags.config_path, "Flat key = value config file");
  if (with_application) {
    cmd->add_option("--application", flags.application, "restore or decode");
  }
  for (const char* key : kKeys) {
    std::string flag = key;
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    cmd->add_option("--" + flag, flags.values[key], std::string("Config key ") + key);
  }
}

ExperimentConfig load_config(const ConfigFlags& flags, std::optional<Application> app) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw ConfigError("cannot open config " + flags.config_path);
    cfg = read_config(in);
  }
  if (!flags.application.empty()) set_config_value(cfg, "application", flags.application);
  for (const auto& [key, value] : flags.values) {
    if (!value.empty()) set_config_value(cfg, key, value);
  }
  if (app) cfg.application = *app;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out || !(out << text) || !out.flush()) throw ConfigError("cannot write " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void run(const ConfigFlags& flags, Application app) {
  const ExperimentConfig cfg = load_config(flags, app);
  const ExperimentOutput out = run_experiment(cfg);
  write_text(cfg.output, out.csv);
  if (!cfg.summary.empty()) write_text(cfg.summary, out.summary);
  std::cerr << "csv sha256 (timing excluded): " << csv_determinism_hash(out.csv) << '\n';
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void export_lp(const ConfigFlags& flags, const std::string& method, std::uint64_t seed) {
  const ExperimentConfig cfg = load_config(flags, std::nullopt);
  if (cfg.p_grid.size() != 1) throw ConfigError("export-lp needs a single p");
  const double p = cfg.p_grid.front();
  std::ostringstream os;
  if (cfg.application == Application::kRestore) {
    const auto m = parse_restore_method(method);
    if (!m) throw ConfigError("unknown restore method '" + method + "'");
    if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
    const BitImage noisy = apply_bit_flip_noise(experiment_truth(cfg), p, seed);
    const RestorationModel model = build_restoration_objective(noisy, cfg.alpha, experiment_phi(cfg));
    const LinearProgram lp = build_relaxation(model.hypergraph, m->kind, model.objective);
    std::vector<int> binary;
    if (m->ip) {
      binary.resize(noisy.size());
      std::iota(binary.begin(), binary.end(), 0);
    }
    os << "\\ restore " << to_string(*m) << " p=" << p << " seed=" << seed
       << " objective constant " << shortest(model.objective.constant) << '\n';
    write_lp(os, lp, binary);
  } else {
    const auto m = parse_decode_method(method);
    if (!m) throw ConfigError("unknown decode method '" + method + "'");
    const LdpcCode code = experiment_code(cfg);
    const auto y = bit_flip_channel(code.n, p, seed);
    const DecoderModel model = build_decoder(code, y, *m);
    std::vector<int> binary;
    if (m->method == DecodeMethod::kIp) {
      binary.resize(code.n);
      std::iota(binary.begin(), binary.end(), 0);
    }
    os << "\\ decode " << to_string(*m) << " p=" << p << " seed=" << seed << '\n';
    write_lp(os, model.lp, binary);
  }
  write_text(cfg.output, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilinear polytope relaxations for image restoration and LDPC decoding"};
  app.require_subcommand(1);

  ConfigFlags restore_flags;
  auto* restore_cmd = app.add_subcommand("restore", "Run an image restoration experiment");
  add_config_flags(restore_cmd, restore_flags, false);

  ConfigFlags decode_flags;
  auto* decode_cmd = app.add_subcommand("decode", "Run an LDPC decoding experiment");
  add_config_flags(decode_cmd, decode_flags, false);

  ConfigFlags export_flags;
  std::string export_method = "Clique";
  std::uint64_t export_seed = 0;
  auto* export_cmd = app.add_subcommand("export-lp", "Write one instance's LP in LP text format");
  add_config_flags(export_cmd, export_flags, true);
  export_cmd->add_option("--method", export_method, "Method name")->capture_default_str();
  export_cmd->add_option("--seed", export_seed, "Trial seed (the CSV seed column)")
      ->capture_default_str();

  std::string plot_input;
  std::string plot_metric;
  std::string plot_output;
  auto* plot_cmd = app.add_subcommand("plot-data", "Aggregate a CSV into method,p,mean,stderr");
  plot_cmd->add_option("--input", plot_input, "Experiment CSV")->required();
  plot_cmd->add_option("--metric", plot_metric, "r_g, tightness, recovery or time")->required();
  plot_cmd->add_option("--output", plot_output, "Output path, stdout when omitted");

  int code_n = 60;
  int code_beta = 4;
  int code_gamma = 3;
  std::uint64_t code_seed = 1;
  std::string code_output;
  auto* code_cmd = app.add_subcommand("gen-code", "Generate a Gallager parity-check matrix");
  code_cmd->add_option("--n", code_n)->capture_default_str();
  code_cmd->add_option("--beta", code_beta)->capture_default_str();
  code_cmd->add_option("--gamma", code_gamma)->capture_default_str();
  code_cmd->add_option("--seed", code_seed)->capture_default_str();
  code_cmd->add_option("--output", code_output, "Output path, stdout when omitted");

  std::string image_kind = "TL";
  int image_width = 15;
  int image_height = 15;
  double image_p = 0.0;
  std::uint64_t image_seed = 0;
  std::string image_output;
  auto* image_cmd = app.add_subcommand("gen-image", "Write a synthetic image as PBM");
  image_cmd->add_option("--kind", image_kind, "TL, CEN or CROSS")->capture_default_str();
  image_cmd->add_option("--width", image_width)->capture_default_str();
  image_cmd->add_option("--height", image_height)->capture_default_str();
  image_cmd->add_option("--p", image_p, "Bit-flip probability applied to the image")
      ->capture_default_str();
  image_cmd->add_option("--seed", image_seed, "Noise seed")->capture_default_str();
  image_cmd->add_option("--output", image_output, "Output path, stdout when omitted");

  std::string hash_input;
  auto* hash_cmd = app.add_subcommand("hash", "Print a CSV's hash with timing columns removed");
  hash_cmd->add_option("--input", hash_input, "Experiment CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  try {
    if (restore_cmd->parsed()) {
      run(restore_flags, Application::kRestore);
    } else if (decode_cmd->parsed()) {
      run(decode_flags, Application::kDecode);
    } else if (export_cmd->parsed()) {
      export_lp(export_flags, export_method, export_seed);
    } else if (plot_cmd->parsed()) {
      write_text(plot_output, plot_data(read_text(plot_input), plot_metric));
    } else if (code_cmd->parsed()) {
      LdpcCode code;
      try {
        code = gallager_parity_check(code_n, code_beta, code_gamma, code_seed);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      std::ostringstream os;
      write_code(os, code);
      write_text(code_output, os.str());
    } else if (image_cmd->parsed()) {
      const auto kind = parse_synthetic_kind(image_kind);
      if (!kind) throw ConfigError("unknown image kind '" + image_kind + "'");
      BitImage img;
      try {
        img = generate_synthetic_image(*kind, image_width, image_height);
        if (image_p > 0.0) img = apply_bit_flip_noise(img, image_p, image_seed);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      std::ostringstream os;
      write_pbm(os, img);
      write_text(image_output, os.str());
    } else if (hash_cmd->parsed()) {
      std::cout << csv_determinism_hash(read_text(hash_input)) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverExit;
  }
  return 0;
}
