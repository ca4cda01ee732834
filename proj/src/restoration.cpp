#include "mlpoly/restoration.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "mlpoly/rng.hpp"
#include "mlpoly/simplex.hpp"

namespace mlpoly {
namespace {

std::uint32_t patch_mask(const BitImage& img, int r, int c) {
  return std::uint32_t{img.at(r, c)} | std::uint32_t{img.at(r, c + 1)} << 1 |
         std::uint32_t{img.at(r + 1, c)} << 2 | std::uint32_t{img.at(r + 1, c + 1)} << 3;
}

void fill_block(BitImage& img, int r0, int c0, int rows, int cols) {
  for (int r = r0; r < r0 + rows; ++r) {
    for (int c = c0; c < c0 + cols; ++c) img.at(r, c) = 1;
  }
}

}  // namespace

BitImage BitImage::zeros(int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("image sides must be positive");
  BitImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<std::size_t>(width) * height, 0);
  return img;
}

void write_pbm(std::ostream& os, const BitImage& img) {
  os << "P1\n" << img.width << ' ' << img.height << '\n';
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      if (c > 0) os << ' ';
      os << int(img.at(r, c));
    }
    os << '\n';
  }
}

BitImage read_pbm(std::istream& is) {
  // Tokenizer that skips whitespace and '#' comments.
  auto skip = [&] {
    for (;;) {
      const int ch = is.peek();
      if (ch == '#') {
        std::string ignored;
        std::getline(is, ignored);
      } else if (ch != EOF && std::isspace(ch)) {
        is.get();
      } else {
        return;
      }
    }
  };
  auto read_int = [&] {
    skip();
    int value = 0;
    if (!(is >> value)) throw std::runtime_error("malformed PBM header");
    return value;
  };
  skip();
  char magic[2] = {0, 0};
  if (!is.get(magic[0]) || !is.get(magic[1]) || magic[0] != 'P' || magic[1] != '1') {
    throw std::runtime_error("not a plain PBM (P1) file");
  }
  const int width = read_int();
  const int height = read_int();
  if (width <= 0 || height <= 0 || width > 100000 || height > 100000) {
    throw std::runtime_error("bad PBM dimensions");
  }
  BitImage img = BitImage::zeros(width, height);
  for (auto& px : img.pixels) {
    skip();
    const int ch = is.get();
    if (ch == '0' || ch == '1') {
      px = static_cast<std::uint8_t>(ch - '0');
    } else {
      throw std::runtime_error("PBM pixel data truncated or invalid");
    }
  }
  return img;
}

std::vector<Clique> grid_cliques(int width, int height) {
  if (width < 2 || height < 2) throw std::invalid_argument("grid needs both sides >= 2");
  std::vector<Clique> out;
  out.reserve(static_cast<std::size_t>(width - 1) * (height - 1));
  for (int r = 0; r + 1 < height; ++r) {
    for (int c = 0; c + 1 < width; ++c) {
      const int v = r * width + c;
      out.push_back({v, v + 1, v + width, v + width + 1});
    }
  }
  return out;
}

int pattern_group(std::uint32_t patch) {
  patch &= 0xFu;
  switch (std::popcount(patch)) {
    case 0:
    case 4:
      return 1;
    case 1:
    case 3:
      return 2;
    default:
      // Positions 0,3 or 1,2 are the diagonals.
      return (patch == 0b1001u || patch == 0b0110u) ? 4 : 3;
  }
}

RestorationModel build_restoration_objective(const BitImage& noisy, double alpha,
                                             const PatternPotentials& phi) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  RestorationModel model;
  model.hypergraph =
      build_ugm_hypergraph(grid_cliques(noisy.width, noisy.height), noisy.size());
  const Hypergraph& h = model.hypergraph;
  MultilinearObjective obj = MultilinearObjective::zero(h);
  obj.alpha = alpha;
  for (int v = 0; v < noisy.size(); ++v) {
    obj.node_coeffs[v] = noisy.pixels[v] ? alpha : -alpha;
  }
  const std::array<double, 16> coeffs = potentials_to_coefficients(phi);
  NodeSet subset;
  for (const Clique& c : h.cliques()) {
    obj.constant += coeffs[0];
    for (std::uint32_t s = 1; s < 16; ++s) {
      subset.clear();
      for (int b = 0; b < 4; ++b) {
        if (s >> b & 1u) subset.push_back(c[b]);
      }
      obj.add_to_slot(h, h.require_slot(subset), coeffs[s]);
    }
  }
  model.objective = std::move(obj);
  return model;
}

double restoration_energy(const BitImage& noisy, double alpha, const PatternPotentials& phi,
                          const BitImage& x) {
  if (noisy.width != x.width || noisy.height != x.height) {
    throw std::invalid_argument("image sizes differ");
  }
  double data = 0.0;
  for (int v = 0; v < x.size(); ++v) {
    if (x.pixels[v]) data += noisy.pixels[v] ? 1.0 : -1.0;
  }
  double smooth = 0.0;
  for (int r = 0; r + 1 < x.height; ++r) {
    for (int c = 0; c + 1 < x.width; ++c) smooth += phi[pattern_group(patch_mask(x, r, c)) - 1];
  }
  return alpha * data + smooth;
}

BitImage apply_bit_flip_noise(const BitImage& img, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 0.5)) throw std::invalid_argument("noise level must be in [0, 0.5]");
  Rng rng(seed);
  BitImage out = img;
  for (auto& px : out.pixels) {
    if (rng.uniform01() < p) px ^= 1u;
  }
  return out;
}

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kTopLeft:
      return "TL";
    case SyntheticKind::kCenter:
      return "CEN";
    case SyntheticKind::kCross:
      return "CROSS";
  }
  return "?";
}

std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name) {
  if (name == "TL") return SyntheticKind::kTopLeft;
  if (name == "CEN") return SyntheticKind::kCenter;
  if (name == "CROSS") return SyntheticKind::kCross;
  return std::nullopt;
}

BitImage generate_synthetic_image(SyntheticKind kind, int width, int height) {
  if (width < 4 || height < 4) throw std::invalid_argument("synthetic images need 4 x 4 or more");
  BitImage img = BitImage::zeros(width, height);
  const int bw = width / 2;
  const int bh = height / 2;
  switch (kind) {
    case SyntheticKind::kTopLeft:
      fill_block(img, 0, 0, bh, bw);
      break;
    case SyntheticKind::kCenter:
      fill_block(img, (height - bh) / 2, (width - bw) / 2, bh, bw);
      break;
    case SyntheticKind::kCross: {
      const int th = (height + 4) / 5;
      const int tw = (width + 4) / 5;
      fill_block(img, (height - th) / 2, 0, th, width);
      fill_block(img, 0, (width - tw) / 2, height, tw);
      break;
    }
  }
  return img;
}

double partial_recovery(const BitImage& truth, const BitImage& restored) {
  if (truth.width != restored.width || truth.height != restored.height) {
    throw std::invalid_argument("image sizes differ");
  }
  int equal = 0;
  for (int v = 0; v < truth.size(); ++v) equal += truth.pixels[v] == restored.pixels[v];
  return static_cast<double>(equal) / truth.size();
}

RelativeGap relative_gap(double f_star, double g_star) {
  if (f_star == 0.0) throw std::invalid_argument("relative gap undefined for f* = 0");
  return {(f_star - g_star) / f_star * 100.0, std::abs(g_star - f_star) / std::abs(f_star) * 100.0};
}

PatternPotentials learn_phi_from_frequencies(const std::vector<BitImage>& images) {
  if (images.empty()) throw std::invalid_argument("no images to learn from");
  std::array<double, 4> f{};
  for (const BitImage& img : images) {
    if (img.width < 2 || img.height < 2) throw std::invalid_argument("image below 2 x 2");
    std::array<long, 4> counts{};
    for (int r = 0; r + 1 < img.height; ++r) {
      for (int c = 0; c + 1 < img.width; ++c) ++counts[pattern_group(patch_mask(img, r, c)) - 1];
    }
    const double patches = static_cast<double>(img.width - 1) * (img.height - 1);
    for (int i = 0; i < 4; ++i) f[i] += counts[i] / patches;
  }
  PatternPotentials phi;
  for (int i = 0; i < 4; ++i) phi[i] = -f[i] / images.size();
  return phi;
}

std::string to_string(const RestoreMethod& method) {
  if (!method.ip) return to_string(method.kind);
  if (method.kind == RelaxationKind::clique()) return "IP";
  return "IP/" + to_string(method.kind);
}

std::optional<RestoreMethod> parse_restore_method(std::string_view name) {
  if (name == "IP") return RestoreMethod::exact();
  if (name.starts_with("IP/")) {
    if (auto kind = parse_relaxation_kind(name.substr(3))) return RestoreMethod::exact(*kind);
    return std::nullopt;
  }
  if (auto kind = parse_relaxation_kind(name)) return RestoreMethod::relaxation(*kind);
  return std::nullopt;
}

RestoreResult restore(const BitImage& noisy, double alpha, const PatternPotentials& phi,
                      const RestoreMethod& method, const BranchAndBoundOptions& options) {
  const RestorationModel model = build_restoration_objective(noisy, alpha, phi);
  RestoreResult out;
  out.constant = model.objective.constant;
  out.restored = BitImage::zeros(noisy.width, noisy.height);

  LinearProgram lp;
  std::vector<int> nodes;
  if (method.ip) {
    lp = build_relaxation(model.hypergraph, method.kind, model.objective);
    nodes.resize(noisy.size());
    std::iota(nodes.begin(), nodes.end(), 0);
  }
  SolveReport report;
  if (method.ip) {
    IpReport ip = solve_binary_ip(lp, nodes, options);
    out.nodes = ip.nodes_explored;
    report = std::move(ip);
  } else {
    report = solve_relaxation(model.hypergraph, method.kind, model.objective, options.lp);
  }
  out.wall_time = report.wall_time;
  out.status = report.status;
  out.iterations = report.iterations;
  if (report.status != SolveStatus::kOptimal) return out;
  out.value = report.objective_value;
  const Rounding rounding = classify_and_round(report, options.lp.integrality_tol);
  out.is_binary = rounding.is_binary;
  for (int v = 0; v < noisy.size(); ++v) {
    out.restored.pixels[v] = rounding.rounded[v] > 0.5 ? 1 : 0;
  }
  return out;
}

}  // namespace mlpoly
