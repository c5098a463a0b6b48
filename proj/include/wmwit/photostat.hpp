// Copyright 2026 The wmwit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Raman photodetection layer. Stokes and anti-Stokes fields relate to the
// material modes by a_S,i = G_S b_i^dag and a_AS,i = G_AS b_i. Contains
// linear optical networks, translation of oscillator correlators into
// photocount correlators, the count-based witness, gain calibration,
// amplitude estimation and finite-shot Monte Carlo estimators.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "wmwit/entanglement.hpp"
#include "wmwit/hilbert.hpp"
#include "wmwit/nonlocality.hpp"
#include "wmwit/observables.hpp"
#include "wmwit/report.hpp"

namespace wmwit {

// ---------------------------------------------------------------- networks

/// Splitter with reflectivity r (t = 1 - r) acting on modes a, b:
/// out_a = sqrt(r) in_a + sqrt(t) in_b, out_b = sqrt(t) in_a - sqrt(r) in_b.
struct BeamSplitter {
  double reflectivity = 0.5;
  int a = 1;
  int b = 2;
};

/// out_a = exp(i phi) in_a
struct PhaseShift {
  double phi = 0.0;
  int a = 1;
};

using NetworkElement = std::variant<BeamSplitter, PhaseShift>;

inline constexpr double kUnitarityTolerance = 1e-10;

class OpticalNetwork {
 public:
  OpticalNetwork() = default;
  OpticalNetwork(int n_modes, std::vector<NetworkElement> elements) : n_modes_(n_modes), elements_(std::move(elements)) {
    if (n_modes_ < 1) throw DomainError("network needs at least one mode");
  }

  int n_modes() const { return n_modes_; }
  const std::vector<NetworkElement>& elements() const { return elements_; }

  /// T = E_k ... E_1; output mode a carries sum_i T(a, i) in_i.
  Eigen::MatrixXcd transfer() const {
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(n_modes_, n_modes_);
    for (const auto& el : elements_) t = element_matrix(el) * t;
    const double dev = (t * t.adjoint() - Eigen::MatrixXcd::Identity(n_modes_, n_modes_)).cwiseAbs().maxCoeff();
    if (!(dev <= kUnitarityTolerance))
      throw NonUnitaryError("network transfer deviates from unitarity by " + std::to_string(dev));
    return t;
  }

 private:
  void check_mode(int m) const {
    if (m < 1 || m > n_modes_) throw DomainError("network element references mode " + std::to_string(m));
  }

  Eigen::MatrixXcd element_matrix(const NetworkElement& el) const {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(n_modes_, n_modes_);
    if (const auto* bs = std::get_if<BeamSplitter>(&el)) {
      check_mode(bs->a);
      check_mode(bs->b);
      if (bs->a == bs->b) throw DomainError("beam splitter needs two distinct modes");
      const double r = bs->reflectivity, t = 1.0 - r;
      // NaN or out-of-range values fall through to the unitarity check
      const double sr = std::sqrt(r), st = std::sqrt(t);
      const int a = bs->a - 1, b = bs->b - 1;
      e(a, a) = sr;
      e(a, b) = st;
      e(b, a) = st;
      e(b, b) = -sr;
    } else {
      const auto& ph = std::get<PhaseShift>(el);
      check_mode(ph.a);
      e(ph.a - 1, ph.a - 1) = std::polar(1.0, ph.phi);
    }
    return e;
  }

  int n_modes_ = 0;
  std::vector<NetworkElement> elements_;
};

inline Eigen::MatrixXcd network_transfer(const OpticalNetwork& net) { return net.transfer(); }

/// Three inputs combined on output 1 with equal weights.
inline OpticalNetwork tripartite_w_network() {
  return OpticalNetwork(3, {BeamSplitter{0.5, 2, 3}, BeamSplitter{1.0 / 3.0, 1, 2}});
}

/// Coefficients of the collective mode seen on output `row` (1-based).
inline ModeCoefficients coefficients_from_network(const OpticalNetwork& net, int row = 1) {
  const Eigen::MatrixXcd t = net.transfer();
  if (row < 1 || row > net.n_modes()) throw DomainError("network output out of range");
  std::vector<cplx> c(net.n_modes());
  for (int i = 0; i < net.n_modes(); ++i) c[i] = t(row - 1, i);
  return ModeCoefficients(std::move(c));
}

// ---------------------------------------------------------------- sidebands

enum class Sideband { stokes, anti_stokes };

struct OpticalLadder {
  Sideband band = Sideband::anti_stokes;
  int mode = 1;
  bool dagger = false;
  friend bool operator==(const OpticalLadder&, const OpticalLadder&) = default;
};

/// <oscillator word> = <optical> / (G_S^gain_s_power * G_AS^gain_as_power)
struct OpticalCorrelator {
  std::vector<OpticalLadder> word;
  int gain_s_power = 0;
  int gain_as_power = 0;

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < word.size(); ++k) {
      const auto& l = word[k];
      os << (k ? " " : "") << (l.band == Sideband::stokes ? "a_S" : "a_AS") << l.mode << (l.dagger ? "^dag" : "");
    }
    os << " / (G_S^" << gain_s_power << " G_AS^" << gain_as_power << ")";
    return os.str();
  }
};

inline std::string word_to_string(const LadderWord& w) {
  std::ostringstream os;
  for (std::size_t k = 0; k < w.size(); ++k) os << (k ? " " : "") << "b" << w[k].mode << (w[k].dagger ? "^dag" : "");
  return os.str();
}

/// Rewrites <w> as a normally ordered photocount correlator <B_opt^dag B_opt>.
/// Requires the restriction of w to each mode to read s^dag s for some s.
inline OpticalCorrelator sideband_translate(const LadderWord& w) {
  int creators = 0;
  for (const auto& l : w) creators += l.dagger ? 1 : 0;
  if (2 * creators != static_cast<int>(w.size()))
    throw NotMeasurableError("'" + word_to_string(w) + "' has unequal numbers of creation and annihilation operators");

  std::vector<int> order;
  std::map<int, LadderWord> per_mode;
  for (const auto& l : w) {
    if (!per_mode.count(l.mode)) order.push_back(l.mode);
    per_mode[l.mode].push_back(l);
  }
  LadderWord b;  // B, with [B^dag B] = w up to commuting distinct modes
  for (int m : order) {
    const auto& sub = per_mode[m];
    const std::size_t len = sub.size();
    bool ok = len % 2 == 0;
    for (std::size_t k = 0; ok && k < len / 2; ++k) {
      const Ladder& front = sub[k];
      const Ladder& back = sub[len - 1 - k];
      ok = front.dagger != back.dagger;
    }
    if (!ok)
      throw NotMeasurableError("'" + word_to_string(w) + "' is not of the form <B^dag B> on mode " + std::to_string(m) +
                               "; not measurable by photon counting");
    b.insert(b.end(), sub.begin() + static_cast<std::ptrdiff_t>(len / 2), sub.end());
  }

  OpticalCorrelator out;
  std::vector<OpticalLadder> bopt;
  for (const auto& l : b) {
    if (l.dagger) {
      bopt.push_back({Sideband::stokes, l.mode, false});
      out.gain_s_power += 2;
    } else {
      bopt.push_back({Sideband::anti_stokes, l.mode, false});
      out.gain_as_power += 2;
    }
  }
  for (auto it = bopt.rbegin(); it != bopt.rend(); ++it) out.word.push_back({it->band, it->mode, true});
  out.word.insert(out.word.end(), bopt.begin(), bopt.end());
  return out;
}

struct SidebandGains {
  double g_s_sq = 1.0;
  double g_as_sq = 1.0;
  double lambda() const { return g_as_sq / g_s_sq; }
};

/// Exact value of an optical correlator on rho (gains included).
inline double optical_expectation(const DensityOperator& rho, const OpticalCorrelator& oc, const SidebandGains& g) {
  LadderWord w;
  double scale = 1.0;
  for (const auto& l : oc.word) {
    // a_S = G_S b^dag, a_AS = G_AS b
    const bool osc_dagger = (l.band == Sideband::stokes) != l.dagger;
    w.push_back({l.mode, osc_dagger});
    scale *= std::sqrt(l.band == Sideband::stokes ? g.g_s_sq : g.g_as_sq);
  }
  return scale * rho.expectation(w).real();
}

/// Oscillator value recovered from the optical one by dividing out the gains.
inline double oscillator_from_optical(double optical, const OpticalCorrelator& oc, const SidebandGains& g) {
  return optical / (std::pow(g.g_s_sq, oc.gain_s_power / 2.0) * std::pow(g.g_as_sq, oc.gain_as_power / 2.0));
}

// ------------------------------------------------------- phase maximization

enum class PhaseMode { grid, analytic };

struct PhaseSearchConfig {
  PhaseMode mode = PhaseMode::grid;
  int grid_points = 64;
  int min_sweeps = 3;
  int max_sweeps = 50;
  double tolerance = 1e-13;  // sweep-to-sweep improvement considered converged
};

struct PhaseSearchResult {
  double cross_sum = 0.0;  // (N max<n_W> - sum_j <n_j>) / 2
  double max_nw = 0.0;
  std::vector<double> phases;
  int sweeps = 0;
  bool converged = true;
};

namespace detail {

/// <n_W> for c_k = exp(i phi_k)/sqrt(N).
inline double nw_value(const Eigen::MatrixXcd& x, const std::vector<double>& phi) {
  const int n = static_cast<int>(phi.size());
  cplx s = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) s += std::polar(1.0, phi[l] - phi[k]) * x(k, l);
  return s.real() / n;
}

}  // namespace detail

/// Maximizes <n_W> over relative phases of uniform-magnitude coefficients for
/// the correlator table x and returns the implied cross-correlator sum.
inline PhaseSearchResult maximize_nw(const Eigen::MatrixXcd& x, const PhaseSearchConfig& cfg = {}) {
  const int n = static_cast<int>(x.rows());
  PhaseSearchResult out;
  out.phases.assign(n, 0.0);
  if (cfg.mode == PhaseMode::analytic) {
    for (int l = 1; l < n; ++l) out.phases[l] = x(0, l) == 0.0 ? 0.0 : -std::arg(x(0, l));
  } else {
    if (cfg.grid_points < 3) throw DomainError("phase grid needs at least 3 points");
    double best = detail::nw_value(x, out.phases);
    out.converged = false;
    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
      const double before = best;
      for (int l = 1; l < n; ++l) {
        // grid scan, then a least-squares sinusoid a + b cos + c sin through the samples
        std::vector<double> phi = out.phases;
        double bc = 0.0, bs = 0.0;
        double grid_best = best, grid_arg = out.phases[l];
        for (int g = 0; g < cfg.grid_points; ++g) {
          const double p = 2.0 * std::numbers::pi * g / cfg.grid_points;
          phi[l] = p;
          const double v = detail::nw_value(x, phi);
          bc += v * std::cos(p);
          bs += v * std::sin(p);
          if (v > grid_best) {
            grid_best = v;
            grid_arg = p;
          }
        }
        phi[l] = std::atan2(bs, bc);
        const double fit = detail::nw_value(x, phi);
        if (fit >= grid_best) {
          grid_best = fit;
          grid_arg = phi[l];
        }
        if (grid_best > best) {
          best = grid_best;
          out.phases[l] = grid_arg;
        }
      }
      out.sweeps = sweep;
      if (sweep >= cfg.min_sweeps && best - before <= cfg.tolerance) {
        out.converged = true;
        break;
      }
    }
  }
  out.max_nw = detail::nw_value(x, out.phases);
  out.cross_sum = (n * out.max_nw - x.diagonal().real().sum()) / 2.0;
  return out;
}

/// Cross-correlator sum of rho recovered from maximized <n_W>.
inline PhaseSearchResult cross_sum_from_nw(const DensityOperator& rho, const PhaseSearchConfig& cfg = {}) {
  return maximize_nw(observables(rho).cross, cfg);
}

/// Differenced variant: sum_{i<j} |X_c - X_0| from <n_W>_c - <n_W>_0.
inline PhaseSearchResult cross_difference_from_nw(const DensityOperator& rho_c, const DensityOperator& rho0,
                                                  const PhaseSearchConfig& cfg = {}) {
  return maximize_nw(observables(rho_c).cross - observables(rho0).cross, cfg);
}

inline std::vector<double> uniform_phase_grid(int points) {
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k) g[k] = 2.0 * std::numbers::pi * k / points;
  return g;
}

/// max over the grid of (<n_A> - <n_B>)/2 with b_A,B = (b_i +- e^{i phi} b_j)/sqrt(2).
inline double cross_from_interference(const DensityOperator& rho, int i, int j, const std::vector<double>& grid) {
  if (i == j || i < 1 || j < 1 || i > rho.n_modes() || j > rho.n_modes()) throw DomainError("need two distinct modes");
  if (grid.empty()) throw DomainError("phase grid is empty");
  const auto obs = observables(rho);
  double best = -std::numeric_limits<double>::infinity();
  for (double phi : grid) {
    std::vector<cplx> ua(rho.n_modes(), 0.0), ub(rho.n_modes(), 0.0);
    ua[i - 1] = ub[i - 1] = 1.0 / std::sqrt(2.0);
    ua[j - 1] = std::polar(1.0 / std::sqrt(2.0), phi);
    ub[j - 1] = -ua[j - 1];
    auto mean = [&](const std::vector<cplx>& u) {
      cplx s = 0.0;
      for (int k = 0; k < rho.n_modes(); ++k)
        for (int l = 0; l < rho.n_modes(); ++l) s += std::conj(u[k]) * u[l] * obs.cross(k, l);
      return s.real();
    };
    best = std::max(best, (mean(ua) - mean(ub)) / 2.0);
  }
  return best;
}

// ----------------------------------------------------------- count witness

/// Photocount expectation values keyed by id:
///   "AS:W"    <a_AS,W^dag a_AS,W> at the maximizing phases
///   "AS:i"    <a_AS,i^dag a_AS,i>
///   "AS:i,j"  <a_AS,j^dag a_AS,i^dag a_AS,i a_AS,j>   (i < j)
///   "S:i"     <a_S,i^dag a_S,i>
using CountSet = std::map<std::string, double>;

inline std::string single_id(const std::string& band, int i) { return band + ":" + std::to_string(i); }
inline std::string pair_id(int i, int j) { return "AS:" + std::to_string(std::min(i, j)) + "," + std::to_string(std::max(i, j)); }

inline std::vector<std::string> optical_witness_ids(int n_modes) {
  std::vector<std::string> ids{"AS:W"};
  for (int i = 1; i <= n_modes; ++i) ids.push_back(single_id("AS", i));
  for (int i = 1; i <= n_modes; ++i)
    for (int j = i + 1; j <= n_modes; ++j) ids.push_back(pair_id(i, j));
  return ids;
}

/// Number of anti-Stokes operators in a count id.
inline int anti_stokes_order(const std::string& id) {
  if (id.rfind("AS:", 0) != 0) return 0;
  return id.find(',') != std::string::npos ? 4 : 2;
}

/// Effect of G_AS^2 -> factor * G_AS^2 on a count set.
inline CountSet rescale_anti_stokes(const CountSet& counts, double factor) {
  CountSet out;
  for (const auto& [id, v] : counts) out[id] = v * std::pow(factor, anti_stokes_order(id) / 2.0);
  return out;
}

/// Exact counts generated from rho with the given gains.
inline CountSet exact_counts(const DensityOperator& rho, const SidebandGains& g, const PhaseSearchConfig& cfg = {}) {
  const auto obs = observables(rho);
  CountSet c;
  c["AS:W"] = g.g_as_sq * maximize_nw(obs.cross, cfg).max_nw;
  for (int i = 1; i <= rho.n_modes(); ++i) {
    c[single_id("AS", i)] = g.g_as_sq * obs.numbers(i - 1);
    // <b b^dag> = <n> + 1 for oscillators, 1 - <n> for two-level systems
    const double anti = rho.spec().is_two_level() ? 1.0 - obs.numbers(i - 1) : obs.numbers(i - 1) + 1.0;
    c[single_id("S", i)] = g.g_s_sq * anti;
    for (int j = i + 1; j <= rho.n_modes(); ++j) c[pair_id(i, j)] = g.g_as_sq * g.g_as_sq * obs.pair_numbers(i - 1, j - 1);
  }
  return c;
}

/// Entanglement witness from photocounts alone. All terms scale with G_AS^2,
/// so relative_margin = margin / number_sum is gain independent.
inline WitnessReport optical_witness(const CountSet& counts, int n_modes, int max_entangled) {
  detail::check_witness_range(n_modes, max_entangled);
  std::vector<std::string> missing;
  for (const auto& id : optical_witness_ids(n_modes))
    if (!counts.count(id)) missing.push_back(id);
  if (!missing.empty()) {
    std::string msg = "missing counts:";
    for (const auto& m : missing) msg += " " + m;
    throw MissingCountsError(msg);
  }
  const auto nsep = n_sep_max(n_modes, max_entangled);
  const std::int64_t n_pairs = std::int64_t{n_modes} * (n_modes - 1) / 2;
  double singles = 0.0, pair = 0.0;
  for (int i = 1; i <= n_modes; ++i) {
    singles += counts.at(single_id("AS", i));
    for (int j = i + 1; j <= n_modes; ++j) pair = std::max(pair, std::sqrt(std::max(0.0, counts.at(pair_id(i, j)))));
  }
  WitnessReport r;
  r.witness = "entanglement";
  r.n_modes = n_modes;
  r.max_entangled = max_entangled;
  r.lhs = (n_modes * counts.at("AS:W") - singles) / 2.0;
  r.rhs = pair * std::sqrt(static_cast<double>(n_pairs * nsep.value)) + 0.5 * (max_entangled - 1) * singles;
  r.finalize();
  r.terms = {{"cross_sum", r.lhs},
             {"max_pair_root", pair},
             {"number_sum", singles},
             {"n_pairs", static_cast<double>(n_pairs)},
             {"n_sep_max", static_cast<double>(nsep.value)},
             {"relative_margin", singles > 0.0 ? r.margin / singles : 0.0}};
  r.structure = nsep.argmax.to_string();
  return r;
}

// -------------------------------------------------------------- calibration

struct GainCalibration {
  SidebandGains gains;
  std::optional<double> commutator_residual;  // <b b^dag> - <b^dag b> - 1 on the check mode
  bool flagged = false;
};

/// G_S^2 = S - AS/lambda, G_AS^2 = lambda S - AS from counts on one mode.
/// An optional second mode checks the commutator identity.
inline GainCalibration gain_calibrate(double stokes, double anti_stokes, double lambda,
                                      std::optional<std::pair<double, double>> check = std::nullopt,
                                      double check_tolerance = 1e-9) {
  if (!(lambda > 0.0)) throw CalibrationError("gain ratio lambda must be positive");
  GainCalibration out;
  out.gains.g_s_sq = stokes - anti_stokes / lambda;
  out.gains.g_as_sq = lambda * stokes - anti_stokes;
  if (!(out.gains.g_s_sq > 0.0) || !(out.gains.g_as_sq > 0.0)) {
    std::ostringstream os;
    os << "inferred gains are not positive (G_S^2 = " << out.gains.g_s_sq << ", G_AS^2 = " << out.gains.g_as_sq
       << "); lambda or counts are inconsistent";
    throw CalibrationError(os.str());
  }
  if (check) {
    const double res = check->first / out.gains.g_s_sq - check->second / out.gains.g_as_sq - 1.0;
    out.commutator_residual = res;
    out.flagged = std::abs(res) > check_tolerance;
  }
  return out;
}

/// |c_i|^2 from thermal counts on the W output with only mode i enabled.
inline std::vector<double> amplitude_estimate(const std::vector<double>& single_mode_counts) {
  double total = 0.0;
  for (double v : single_mode_counts) {
    if (v < 0.0) throw DomainError("counts must be non-negative");
    total += v;
  }
  if (!(total > 0.0)) throw DegenerateProjectionError("amplitude estimate: all counts vanish");
  std::vector<double> out;
  for (double v : single_mode_counts) out.push_back(v / total);
  return out;
}

// ------------------------------------------------------------- Monte Carlo

struct ShotEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
};

/// Aggregated outcomes of one observable.
struct CountRecord {
  std::string id;
  std::int64_t shots = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t seed = 0;

  ShotEstimate estimate() const {
    if (shots < 1) throw DomainError("count record '" + id + "' has no shots");
    const double n = static_cast<double>(shots);
    const double mean = sum / n;
    const double var = shots > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n), shots, seed};
  }
};

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Per-observable stream seed.
inline std::uint64_t derive_seed(std::uint64_t master, const std::string& id) { return splitmix64(master ^ fnv1a(id)); }

/// Spectral distribution of a Hermitian observable under rho.
struct SpectralDistribution {
  std::vector<double> values;
  std::vector<double> probabilities;

  double mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) m += values[k] * probabilities[k];
    return m;
  }
};

inline SpectralDistribution spectral_distribution(const DensityOperator& rho, const Eigen::MatrixXcd& op) {
  if (op.rows() != static_cast<Eigen::Index>(rho.dimension()) || op.cols() != op.rows())
    throw DomainError("observable dimension does not match the state");
  if ((op - op.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance * std::max(1.0, op.cwiseAbs().maxCoeff()))
    throw DomainError("observable is not Hermitian");
  // split into blocks connected by nonzero entries of op; eigenvectors never
  // leave a block, so coherences between blocks do not enter
  const Eigen::Index dim = op.rows();
  std::vector<Eigen::Index> parent(dim);
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = c + 1; r < dim; ++r)
      if (op(r, c) != cplx(0.0)) parent[find(r)] = find(c);
  std::map<Eigen::Index, std::vector<Eigen::Index>> blocks;
  for (Eigen::Index i = 0; i < dim; ++i) blocks[find(i)].push_back(i);

  std::vector<std::pair<double, double>> outcomes;  // (eigenvalue, probability)
  for (const auto& [root, idx] : blocks) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    if (k == 1) {
      outcomes.emplace_back(op(idx[0], idx[0]).real(), std::max(0.0, rho(idx[0], idx[0]).real()));
      continue;
    }
    Eigen::MatrixXcd sub(k, k), rsub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) {
        sub(a, b) = op(idx[a], idx[b]);
        rsub(a, b) = rho(idx[a], idx[b]);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
    const Eigen::MatrixXcd& v = es.eigenvectors();
    const Eigen::VectorXcd diag = (v.adjoint() * rsub * v).diagonal();
    for (Eigen::Index e = 0; e < k; ++e) outcomes.emplace_back(es.eigenvalues()(e), std::max(0.0, diag(e).real()));
  }
  std::sort(outcomes.begin(), outcomes.end());
  // merge numerically equal eigenvalues
  SpectralDistribution d;
  for (const auto& [val, p] : outcomes) {
    if (!d.values.empty() && std::abs(val - d.values.back()) <= 1e-9 * std::max(1.0, std::abs(val)))
      d.probabilities.back() += p;
    else {
      d.values.push_back(val);
      d.probabilities.push_back(p);
    }
  }
  double tot = 0.0;
  for (double p : d.probabilities) tot += p;
  for (auto& p : d.probabilities) p /= tot;
  return d;
}

inline CountRecord sample_distribution(const SpectralDistribution& d, std::int64_t shots, std::uint64_t seed,
                                       const std::string& id = "") {
  if (shots < 1) throw DomainError("shots must be >= 1");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(d.probabilities.begin(), d.probabilities.end());
  // Welford accumulation; sum/sum_sq rebuilt from it for the record
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t s = 1; s <= shots; ++s) {
    const double x = d.values[pick(rng)];
    const double delta = x - mean;
    mean += delta / static_cast<double>(s);
    m2 += delta * (x - mean);
  }
  const double n = static_cast<double>(shots);
  return CountRecord{id, shots, mean * n, m2 + n * mean * mean, seed};
}

/// i.i.d. outcomes of `op` measured on rho. The observable is taken on the
/// truncated space; exact when it preserves that space.
inline ShotEstimate sample_observable(const DensityOperator& rho, const Eigen::MatrixXcd& op, std::int64_t shots,
                                      std::uint64_t seed) {
  return sample_distribution(spectral_distribution(rho, op), shots, seed).estimate();
}

struct McOptions {
  std::int64_t shots = 1000000;
  std::uint64_t seed = 1;
  double z = 3.0;
  PhaseSearchConfig phases{PhaseMode::analytic};
};

struct McResult {
  WitnessReport report;
  std::vector<CountRecord> records;
};

namespace detail {

/// Propagates per-estimate errors into the margin: each estimate is moved by
/// +-1 standard error and the half-differences are summed in quadrature.
inline double propagate_margin_error(const std::function<Sides(const std::vector<double>&)>& f,
                                     const std::vector<ShotEstimate>& est) {
  std::vector<double> x;
  for (const auto& e : est) x.push_back(e.mean);
  double var = 0.0;
  for (std::size_t k = 0; k < est.size(); ++k) {
    if (est[k].std_error == 0.0) continue;
    auto up = x, dn = x;
    up[k] += est[k].std_error;
    dn[k] -= est[k].std_error;
    const double d = (f(up).margin() - f(dn).margin()) / 2.0;
    var += d * d;
  }
  return std::sqrt(var);
}

struct PlannedObservable {
  std::string id;
  const DensityOperator* state;
  Eigen::MatrixXcd op;
};

inline std::vector<CountRecord> run_plan(const std::vector<PlannedObservable>& plan, const McOptions& opt) {
  std::vector<CountRecord> out;
  for (const auto& p : plan) {
    const auto seed = derive_seed(opt.seed, p.id);
    out.push_back(sample_distribution(spectral_distribution(*p.state, p.op), opt.shots, seed, p.id));
  }
  return out;
}

inline Eigen::MatrixXcd number_product(const SystemSpec& spec, int i, int j) {
  return word_matrix(spec, LadderWord{raise(i), lower(i), raise(j), lower(j)});
}

inline std::vector<cplx> phased_uniform(const std::vector<double>& phases) {
  return ModeCoefficients::from_phases(phases).values();
}

inline void attach_confidence(WitnessReport& r, double se, const McOptions& opt) {
  Confidence c;
  c.margin_stderr = se;
  c.z = opt.z;
  c.shots = opt.shots;
  c.seed = opt.seed;
  c.claimed = r.margin + opt.z * se < 0.0;
  r.confidence = c;
}

}  // namespace detail

/// Finite-shot entanglement witness: <n_W> at pre-calibrated phases, singles
/// and pair coincidences each sampled in their own runs.
inline McResult estimate_witness_mc(const DensityOperator& rho, int max_entangled, const McOptions& opt = {}) {
  const int n = rho.n_modes();
  detail::check_witness_range(n, max_entangled);
  const auto& spec = rho.spec();
  const auto phases = maximize_nw(observables(rho).cross, opt.phases).phases;
  std::vector<detail::PlannedObservable> plan;
  plan.push_back({"AS:W", &rho, collective_number_matrix(spec, detail::phased_uniform(phases))});
  for (int i = 1; i <= n; ++i) plan.push_back({single_id("AS", i), &rho, word_matrix(spec, {raise(i), lower(i)})});
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) plan.push_back({pair_id(i, j), &rho, detail::number_product(spec, i, j)});
  McResult res;
  res.records = detail::run_plan(plan, opt);
  std::vector<ShotEstimate> est;
  for (const auto& r : res.records) est.push_back(r.estimate());

  auto sides = [&](const std::vector<double>& x) {
    CountSet c;
    for (std::size_t k = 0; k < plan.size(); ++k) c[plan[k].id] = x[k];
    const auto r = optical_witness(c, n, max_entangled);
    return Sides{r.lhs, r.rhs};
  };
  std::vector<double> x;
  for (const auto& e : est) x.push_back(e.mean);
  CountSet c;
  for (std::size_t k = 0; k < plan.size(); ++k) c[plan[k].id] = x[k];
  res.report = optical_witness(c, n, max_entangled);
  detail::attach_confidence(res.report, detail::propagate_margin_error(sides, est), opt);
  return res;
}

/// Finite-shot nonlocality witness (bosonic). The cross-difference sum comes
/// from <n_W> on both states at phases maximizing the difference; the bound
/// uses sampled singles, pair coincidences and <n_C>, <n_C^2> per block.
inline McResult estimate_nonlocality_mc(const DensityOperator& rho_c, const DensityOperator& rho0, int max_entangled,
                                        const ModeCoefficients& coeffs, const McOptions& opt = {}) {
  if (rho0.spec().is_two_level())
    throw UnsupportedError("the general nonlocality bound is only available for bosonic modes");
  const int n = rho0.n_modes();
  detail::check_witness_range(n, max_entangled);
  detail::require_normalized(coeffs, n);
  if (rho_c.n_modes() != n) throw DomainError("conditioned and initial states must share N");
  const auto phases = maximize_nw(observables(rho_c).cross - observables(rho0).cross, opt.phases).phases;
  const auto u = detail::phased_uniform(phases);
  std::vector<detail::PlannedObservable> plan;
  plan.push_back({"c:W", &rho_c, collective_number_matrix(rho_c.spec(), u)});
  plan.push_back({"0:W", &rho0, collective_number_matrix(rho0.spec(), u)});
  for (int i = 1; i <= n; ++i) plan.push_back({"c:" + std::to_string(i), &rho_c, word_matrix(rho_c.spec(), {raise(i), lower(i)})});
  for (int i = 1; i <= n; ++i) plan.push_back({"0:" + std::to_string(i), &rho0, word_matrix(rho0.spec(), {raise(i), lower(i)})});
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      plan.push_back({"0:" + std::to_string(i) + "," + std::to_string(j), &rho0, detail::number_product(rho0.spec(), i, j)});
  std::vector<Combination> blocks;
  for (auto& c : all_combinations(n, max_entangled))
    if (coeffs.weight(c) > 0.0) blocks.push_back(std::move(c));
  for (const auto& b : blocks) {
    const Eigen::MatrixXcd nc = collective_number_matrix(rho0.spec(), *coeffs.truncated(b));
    plan.push_back({"0:C" + b.to_string(), &rho0, nc});
    plan.push_back({"0:C2" + b.to_string(), &rho0, nc * nc});
  }
  McResult res;
  res.records = detail::run_plan(plan, opt);
  std::vector<ShotEstimate> est;
  for (const auto& r : res.records) est.push_back(r.estimate());

  StructureBound last;
  auto sides = [&](const std::vector<double>& x) {
    std::size_t k = 0;
    const double wc = x[k++], w0 = x[k++];
    double sc = 0.0, s0 = 0.0;
    ObservableSet o;
    o.n_modes = n;
    o.kind = StatisticsKind::bosonic;
    o.numbers = Eigen::VectorXd::Zero(n);
    o.pair_numbers = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) sc += x[k++];
    for (int i = 0; i < n; ++i) s0 += (o.numbers(i) = x[k++]);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) o.pair_numbers(i, j) = o.pair_numbers(j, i) = x[k++];
    o.cross = o.numbers.cast<cplx>().asDiagonal();
    for (const auto& b : blocks) {
      const double mean = x[k++], sq = x[k++];
      o.collective[b.mask()] = CollectiveStats{mean, std::max(0.0, sq - mean * mean), mean + 1.0};
    }
    last = bound(o, max_entangled, coeffs);
    return Sides{(n * (wc - w0) - (sc - s0)) / 2.0, last.total};
  };
  std::vector<double> x;
  for (const auto& e : est) x.push_back(e.mean);
  const Sides s = sides(x);
  const StructureBound central = last;
  res.report = assemble_nonlocality(s.lhs, central, n, max_entangled);
  detail::attach_confidence(res.report, detail::propagate_margin_error(sides, est), opt);
  return res;
}

}  // namespace wmwit
