#include "mlpoly/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "mlpoly/rng.hpp"

namespace mlpoly {
namespace {

constexpr double kChainTol = 1e-6;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(key) + ": not a number: '" + s + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  Int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(std::string(key) + ": not an integer: '" + s + "'");
  }
  return v;
}

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string seconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Position of a method in the relaxation hierarchy it belongs to. Two
// methods are ordered when they share a chain; a smaller rank is weaker.
struct ChainRank {
  int rank = 0;
  bool general = false;  // on Standard > Flower > RI > Clique > MC > IP
  bool parity = false;   // on Parity > Clique > MC > IP
};

ChainRank restore_rank(const RestoreMethod& m) {
  if (m.ip) return {5, true, false};
  using K = RelaxationKind::Kind;
  switch (m.kind.kind) {
    case K::kStandard:
      return {0, true, false};
    case K::kFlower:
      return {1, true, false};
    case K::kRunningIntersection:
      return {2, true, false};
    case K::kClique:
      return {3, true, false};
    case K::kMultiClique:
      return {4, true, false};
  }
  return {};
}

ChainRank decode_rank(const DecodeMethodSpec& m) {
  switch (m.method) {
    case DecodeMethod::kParity:
      return {0, false, true};
    case DecodeMethod::kStandard:
      return {0, true, false};
    case DecodeMethod::kFlower:
      return {1, true, false};
    case DecodeMethod::kRunningIntersection:
      return {2, true, false};
    case DecodeMethod::kClique:
      return {3, true, true};
    case DecodeMethod::kMultiClique:
      return {4, true, true};
    case DecodeMethod::kIp:
      return {5, true, true};
  }
  return {};
}

// Weaker relaxations must not fall below stronger ones on one instance.
void check_chain(const std::vector<std::string>& names, const std::vector<ChainRank>& ranks,
                 const std::vector<double>& values, const std::string& where) {
  for (std::size_t a = 0; a < ranks.size(); ++a) {
    for (std::size_t b = 0; b < ranks.size(); ++b) {
      const bool shared = (ranks[a].general && ranks[b].general) ||
                          (ranks[a].parity && ranks[b].parity);
      if (!shared || ranks[a].rank >= ranks[b].rank) continue;
      // Different cycle lengths of MultiClique are not ordered here.
      if (ranks[a].rank == 4 && ranks[b].rank == 4) continue;
      const double tol = kChainTol * std::max(1.0, std::abs(values[b]));
      if (values[a] < values[b] - tol) {
        throw SolverError(where + ": " + names[a] + " value " + num(values[a]) + " below " +
                          names[b] + " value " + num(values[b]));
      }
    }
  }
}

struct Record {
  double value = 0.0;
  bool is_binary = false;
  double recovery = 0.0;
  double wall_time = 0.0;
};

struct InstanceResult {
  std::uint64_t seed = 0;
  std::vector<Record> records;  // per method
  std::optional<double> ip_value;
};

template <typename Fn>
std::vector<InstanceResult> run_pool(int count, int workers, Fn&& fn) {
  std::vector<InstanceResult> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(workers, count));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

struct Aggregate {
  int trials = 0;
  double gap = 0.0;
  double abs_gap = 0.0;
  int gap_count = 0;
  int binary = 0;
  double recovery = 0.0;
  double wall_time = 0.0;
};

std::string summary_row(const std::string& method, double p, const Aggregate& a) {
  std::string row = method + ',' + num(p) + ',' + std::to_string(a.trials) + ',';
  if (a.gap_count > 0) {
    row += num(a.gap / a.gap_count) + ',' + num(a.abs_gap / a.gap_count);
  } else {
    row += ',';
  }
  row += ',' + num(static_cast<double>(a.binary) / a.trials) + ',' +
         num(a.recovery / a.trials) + ',' + seconds(a.wall_time / a.trials) + '\n';
  return row;
}

ExperimentOutput run_restore(const ExperimentConfig& cfg) {
  const std::vector<std::string> names = experiment_methods(cfg);
  std::vector<RestoreMethod> methods;
  std::vector<ChainRank> ranks;
  int ip_index = -1;
  for (const std::string& name : names) {
    methods.push_back(*parse_restore_method(name));
    ranks.push_back(restore_rank(methods.back()));
    if (methods.back().ip && ip_index < 0) ip_index = static_cast<int>(methods.size()) - 1;
  }
  const BitImage truth = experiment_truth(cfg);
  const PatternPotentials phi = experiment_phi(cfg);
  BranchAndBoundOptions options;
  options.max_nodes = cfg.max_nodes;

  const int grid = static_cast<int>(cfg.p_grid.size());
  const auto results = run_pool(grid * cfg.trials, cfg.workers, [&](int i) {
    const int k = i / cfg.trials;
    const int t = i % cfg.trials;
    InstanceResult out;
    out.seed = experiment_seed(cfg, k, t);
    const BitImage noisy = apply_bit_flip_noise(truth, cfg.p_grid[k], out.seed);
    std::vector<double> values;
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const RestoreResult r = restore(noisy, cfg.alpha, phi, methods[m], options);
      const std::string where = "p=" + num(cfg.p_grid[k]) + " seed=" + std::to_string(out.seed);
      if (r.status != SolveStatus::kOptimal) {
        throw SolverError(where + ": " + names[m] + " ended " + std::string(to_string(r.status)));
      }
      Record rec;
      rec.value = r.value + r.constant;
      rec.is_binary = r.is_binary;
      rec.recovery = partial_recovery(truth, r.restored);
      rec.wall_time = r.wall_time;
      out.records.push_back(rec);
      values.push_back(rec.value);
      if (static_cast<int>(m) == ip_index) out.ip_value = rec.value;
    }
    check_chain(names, ranks, values, "p=" + num(cfg.p_grid[k]) + " seed=" + std::to_string(out.seed));
    return out;
  });

  ExperimentOutput out;
  out.csv = std::string(kRestoreCsvHeader) + '\n';
  out.summary = std::string(kSummaryCsvHeader) + '\n';
  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (int k = 0; k < grid; ++k) {
      Aggregate agg;
      for (int t = 0; t < cfg.trials; ++t) {
        const InstanceResult& inst = results[k * cfg.trials + t];
        const Record& rec = inst.records[m];
        std::string ip_text;
        std::string gap_text;
        if (inst.ip_value && *inst.ip_value != 0.0) {
          const RelativeGap gap = relative_gap(*inst.ip_value, rec.value);
          ip_text = num(*inst.ip_value);
          gap_text = num(gap.signed_percent);
          agg.gap += gap.signed_percent;
          agg.abs_gap += gap.absolute_percent;
          ++agg.gap_count;
        } else if (inst.ip_value) {
          ip_text = num(*inst.ip_value);
        }
        out.csv += names[m] + ',' + num(cfg.p_grid[k]) + ',' + std::to_string(inst.seed) + ',' +
                   num(rec.value) + ',' + ip_text + ',' + gap_text + ',' +
                   (rec.is_binary ? "1" : "0") + ',' + num(rec.recovery) + ',' +
                   seconds(rec.wall_time) + '\n';
        ++agg.trials;
        agg.binary += rec.is_binary ? 1 : 0;
        agg.recovery += rec.recovery;
        agg.wall_time += rec.wall_time;
      }
      out.summary += summary_row(names[m], cfg.p_grid[k], agg);
    }
  }
  return out;
}

ExperimentOutput run_decode(const ExperimentConfig& cfg) {
  const std::vector<std::string> names = experiment_methods(cfg);
  std::vector<DecodeMethodSpec> methods;
  std::vector<ChainRank> ranks;
  for (const std::string& name : names) {
    methods.push_back(*parse_decode_method(name));
    ranks.push_back(decode_rank(methods.back()));
  }
  const LdpcCode code = experiment_code(cfg);
  BranchAndBoundOptions options;
  options.max_nodes = cfg.max_nodes;

  const int grid = static_cast<int>(cfg.p_grid.size());
  const auto results = run_pool(grid * cfg.trials, cfg.workers, [&](int i) {
    const int k = i / cfg.trials;
    const int t = i % cfg.trials;
    InstanceResult out;
    out.seed = experiment_seed(cfg, k, t);
    const std::vector<std::uint8_t> y = bit_flip_channel(code.n, cfg.p_grid[k], out.seed);
    std::vector<double> values;
    const std::string where = "p=" + num(cfg.p_grid[k]) + " seed=" + std::to_string(out.seed);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const DecodeReport r = decode(code, y, methods[m], options);
      if (r.status != SolveStatus::kOptimal) {
        throw SolverError(where + ": " + names[m] + " ended " + std::string(to_string(r.status)));
      }
      out.records.push_back({r.lp_value, r.is_binary, r.partial_recovery, r.wall_time});
      values.push_back(r.lp_value);
    }
    check_chain(names, ranks, values, where);
    return out;
  });

  ExperimentOutput out;
  out.csv = std::string(kDecodeCsvHeader) + '\n';
  out.summary = std::string(kSummaryCsvHeader) + '\n';
  const std::string prefix = std::to_string(code.n) + ',' + std::to_string(code.beta) + ',' +
                             std::to_string(code.gamma) + ',';
  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (int k = 0; k < grid; ++k) {
      Aggregate agg;
      for (int t = 0; t < cfg.trials; ++t) {
        const InstanceResult& inst = results[k * cfg.trials + t];
        const Record& rec = inst.records[m];
        out.csv += prefix + names[m] + ',' + num(cfg.p_grid[k]) + ',' +
                   std::to_string(inst.seed) + ',' + num(rec.value) + ',' +
                   (rec.is_binary ? "1" : "0") + ',' + num(rec.recovery) + ',' +
                   seconds(rec.wall_time) + '\n';
        ++agg.trials;
        agg.binary += rec.is_binary ? 1 : 0;
        agg.recovery += rec.recovery;
        agg.wall_time += rec.wall_time;
      }
      out.summary += summary_row(names[m], cfg.p_grid[k], agg);
    }
  }
  return out;
}

BitImage load_pbm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open image " + path);
  try {
    return read_pbm(in);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> config_keys() {
  return {
      "application: restore or decode",
      "image_kind: TL, CEN or CROSS (restore)",
      "width, height: synthetic image size (restore, at least 4)",
      "image: PBM ground truth replacing the synthetic image (restore)",
      "alpha: data-term weight, positive (restore)",
      "phi: four comma-separated pattern potentials phi_1..phi_4 (restore)",
      "phi_learn: comma-separated PBM files; phi becomes minus their pattern frequencies",
      "n, beta, gamma: code parameters (decode)",
      "code_seed: seed of the generated code (decode)",
      "code: parity-check file replacing the generated code (decode)",
      "p: flip probabilities, [a:s:b], a single value or a comma list, within [0, 0.5]",
      "trials: trials per p, at least 1",
      "seed_base: trial seeds are seed_base xor (p index * trials + trial)",
      "methods: comma-separated method names",
      "output: CSV path, stdout when empty",
      "summary: summary CSV path, none when empty",
      "workers: worker threads",
      "max_nodes: branch-and-bound node budget of IP methods",
  };
}

std::vector<double> parse_p_grid(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("p: empty");
  auto round12 = [](double v) { return std::round(v * 1e12) / 1e12; };
  std::vector<double> out;
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError("p: missing ']' in '" + s + "'");
    const auto parts = split(std::string_view(s).substr(1, s.size() - 2), ':');
    if (parts.size() != 3) throw ConfigError("p: expected [start:step:stop], got '" + s + "'");
    const double a = parse_double("p", parts[0]);
    const double step = parse_double("p", parts[1]);
    const double b = parse_double("p", parts[2]);
    if (b < a) throw ConfigError("p: stop below start in '" + s + "'");
    if (step <= 0.0) {
      if (a != b) throw ConfigError("p: step must be positive in '" + s + "'");
      out.push_back(round12(a));
    } else {
      const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
      if (count > 100000) throw ConfigError("p: grid too long");
      for (long k = 0; k < count; ++k) out.push_back(round12(a + k * step));
    }
  } else {
    for (const std::string& part : split(s, ',')) out.push_back(round12(parse_double("p", part)));
  }
  for (double p : out) {
    if (p < 0.0 || p > 0.5) throw ConfigError("p: " + num(p) + " outside [0, 0.5]");
  }
  return out;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key_text, std::string_view value) {
  const std::string key = trim(key_text);
  const std::string v = trim(value);
  if (key == "application") {
    if (v == "restore") {
      cfg.application = Application::kRestore;
    } else if (v == "decode") {
      cfg.application = Application::kDecode;
    } else {
      throw ConfigError("application: expected restore or decode, got '" + v + "'");
    }
  } else if (key == "image_kind") {
    const auto kind = parse_synthetic_kind(v);
    if (!kind) throw ConfigError("image_kind: expected TL, CEN or CROSS, got '" + v + "'");
    cfg.image_kind = *kind;
  } else if (key == "width") {
    cfg.width = parse_int<int>(key, v);
  } else if (key == "height") {
    cfg.height = parse_int<int>(key, v);
  } else if (key == "image") {
    cfg.image = v;
  } else if (key == "alpha") {
    cfg.alpha = parse_double(key, v);
  } else if (key == "phi") {
    const auto parts = split(v, ',');
    if (parts.size() != 4) throw ConfigError("phi: expected four values");
    for (int i = 0; i < 4; ++i) cfg.phi[i] = parse_double(key, parts[i]);
  } else if (key == "phi_learn") {
    cfg.phi_learn.clear();
    if (!v.empty()) cfg.phi_learn = split(v, ',');
  } else if (key == "n") {
    cfg.n = parse_int<int>(key, v);
  } else if (key == "beta") {
    cfg.beta = parse_int<int>(key, v);
  } else if (key == "gamma") {
    cfg.gamma = parse_int<int>(key, v);
  } else if (key == "code_seed") {
    cfg.code_seed = parse_int<std::uint64_t>(key, v);
  } else if (key == "code") {
    cfg.code = v;
  } else if (key == "p") {
    cfg.p_grid = parse_p_grid(v);
  } else if (key == "trials") {
    cfg.trials = parse_int<int>(key, v);
  } else if (key == "seed_base") {
    cfg.seed_base = parse_int<std::uint64_t>(key, v);
  } else if (key == "methods") {
    cfg.methods.clear();
    if (!v.empty()) cfg.methods = split(v, ',');
  } else if (key == "output") {
    cfg.output = v;
  } else if (key == "summary") {
    cfg.summary = v;
  } else if (key == "workers") {
    cfg.workers = parse_int<int>(key, v);
  } else if (key == "max_nodes") {
    cfg.max_nodes = parse_int<long>(key, v);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

ExperimentConfig read_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    }
    try {
      set_config_value(cfg, t.substr(0, eq), t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  if (cfg.max_nodes < 1) throw ConfigError("max_nodes must be at least 1");
  if (cfg.p_grid.empty()) throw ConfigError("p grid is empty");
  for (double p : cfg.p_grid) {
    if (!(p >= 0.0 && p <= 0.5)) throw ConfigError("p outside [0, 0.5]");
  }
  const auto index_limit = static_cast<std::uint64_t>(cfg.p_grid.size()) * cfg.trials;
  if (index_limit > (std::uint64_t{1} << 40)) throw ConfigError("too many trials");
  if (cfg.application == Application::kRestore) {
    if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (cfg.image.empty() && (cfg.width < 4 || cfg.height < 4)) {
      throw ConfigError("synthetic images need width and height of at least 4");
    }
    for (const std::string& m : experiment_methods(cfg)) {
      if (!parse_restore_method(m)) throw ConfigError("unknown restore method '" + m + "'");
    }
  } else {
    if (cfg.code.empty()) {
      if (cfg.beta <= 0 || cfg.n <= 0 || cfg.n % cfg.beta != 0) {
        throw ConfigError("beta must divide n");
      }
      if (!(cfg.beta > cfg.gamma && cfg.gamma >= 2)) {
        throw ConfigError("code needs beta > gamma >= 2");
      }
    }
    for (const std::string& m : experiment_methods(cfg)) {
      if (!parse_decode_method(m)) throw ConfigError("unknown decode method '" + m + "'");
    }
  }
  std::vector<std::string> methods = experiment_methods(cfg);
  std::sort(methods.begin(), methods.end());
  if (std::adjacent_find(methods.begin(), methods.end()) != methods.end()) {
    throw ConfigError("a method is listed twice");
  }
}

std::vector<std::string> experiment_methods(const ExperimentConfig& cfg) {
  if (!cfg.methods.empty()) return cfg.methods;
  if (cfg.application == Application::kRestore) {
    return {"Standard", "Flower", "RunningIntersection", "Clique", "MultiClique", "IP"};
  }
  return {"Parity", "Clique"};
}

std::uint64_t experiment_seed(const ExperimentConfig& cfg, int k, int t) {
  return trial_seed(cfg.seed_base, static_cast<std::uint64_t>(k) * cfg.trials + t);
}

BitImage experiment_truth(const ExperimentConfig& cfg) {
  if (!cfg.image.empty()) {
    BitImage img = load_pbm(cfg.image);
    if (img.width < 2 || img.height < 2) throw ConfigError(cfg.image + ": below 2 x 2");
    return img;
  }
  return generate_synthetic_image(cfg.image_kind, cfg.width, cfg.height);
}

PatternPotentials experiment_phi(const ExperimentConfig& cfg) {
  if (cfg.phi_learn.empty()) return cfg.phi;
  std::vector<BitImage> images;
  for (const std::string& path : cfg.phi_learn) images.push_back(load_pbm(path));
  try {
    return learn_phi_from_frequencies(images);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("phi_learn: ") + e.what());
  }
}

LdpcCode experiment_code(const ExperimentConfig& cfg) {
  if (!cfg.code.empty()) {
    std::ifstream in(cfg.code);
    if (!in) throw ConfigError("cannot open code " + cfg.code);
    try {
      return read_code(in);
    } catch (const std::exception& e) {
      throw ConfigError(cfg.code + ": " + e.what());
    }
  }
  try {
    return gallager_parity_check(cfg.n, cfg.beta, cfg.gamma, cfg.code_seed);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("code: ") + e.what());
  }
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  return cfg.application == Application::kRestore ? run_restore(cfg) : run_decode(cfg);
}

std::string csv_determinism_hash(std::string_view csv) {
  std::string kept;
  std::vector<bool> drop;
  bool header = true;
  std::istringstream in{std::string(csv)};
  std::string line;
  while (std::getline(in, line)) {
    const auto cells = split(line, ',');
    if (header) {
      for (const std::string& c : cells) drop.push_back(c.ends_with("wall_time_s"));
      header = false;
    }
    bool first = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i < drop.size() && drop[i]) continue;
      if (!first) kept += ',';
      kept += cells[i];
      first = false;
    }
    kept += '\n';
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(kept.data(), kept.size(), digest, &length, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string plot_data(std::string_view csv, std::string_view metric) {
  std::string column;
  if (metric == "r_g") {
    column = "r_g";
  } else if (metric == "tightness") {
    column = "is_binary";
  } else if (metric == "recovery") {
    column = "partial_recovery";
  } else if (metric == "time") {
    column = "wall_time_s";
  } else {
    throw ConfigError("unknown metric '" + std::string(metric) +
                      "' (expected r_g, tightness, recovery or time)");
  }
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  const auto header = split(line, ',');
  auto find = [&](const std::string& name) -> int {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  int method_col = find("method");
  if (method_col < 0) method_col = find("kind");
  const int p_col = find("p");
  const int value_col = find(column);
  if (method_col < 0 || p_col < 0 || value_col < 0) {
    throw ConfigError("CSV lacks a method/kind, p or " + column + " column");
  }

  std::vector<std::string> method_order;
  std::map<std::pair<int, double>, std::vector<double>> groups;
  int rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw ConfigError("CSV row with wrong column count");
    ++rows;
    const std::string& method = cells[method_col];
    auto it = std::find(method_order.begin(), method_order.end(), method);
    if (it == method_order.end()) {
      method_order.push_back(method);
      it = method_order.end() - 1;
    }
    const int m = static_cast<int>(it - method_order.begin());
    const double p = parse_double("p", cells[p_col]);
    auto& values = groups[{m, p}];
    if (!cells[value_col].empty()) values.push_back(parse_double(column, cells[value_col]));
  }
  if (rows == 0) throw ConfigError("CSV has no data rows");

  std::string out = "method,p,mean,stderr\n";
  for (const auto& [key, values] : groups) {
    if (values.empty()) continue;
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double se = 0.0;
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      se = std::sqrt(ss / (n - 1.0) / n);
    }
    out += method_order[key.first] + ',' + num(key.second) + ',' + num(mean) + ',' + num(se) + '\n';
  }
  return out;
}

}  // namespace mlpoly
