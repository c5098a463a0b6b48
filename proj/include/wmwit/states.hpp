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

// State construction: thermal products, single-excitation addition (fully
// collective or confined to the blocks of a structure), W states, white
// noise, and fidelity with the W state.

#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "wmwit/hilbert.hpp"

namespace wmwit {

inline constexpr double kDefaultTailTolerance = 1e-9;
inline constexpr double kProjectionFloor = 1e-14;

/// Single-mode occupation distribution of a (truncated, renormalized) thermal state.
inline std::vector<double> thermal_populations(StatisticsKind kind, double n_th, int cutoff) {
  if (!(n_th >= 0.0)) throw DomainError("thermal occupation must be >= 0");
  if (kind == StatisticsKind::two_level) {
    if (n_th > 1.0) throw DomainError("two-level thermal occupation must be <= 1");
    return {1.0 - n_th, n_th};
  }
  std::vector<double> p(cutoff);
  const double q = n_th / (n_th + 1.0);
  double sum = 0.0;
  for (int k = 0; k < cutoff; ++k) {
    p[k] = std::pow(q, k) / (n_th + 1.0);
    sum += p[k];
  }
  for (auto& x : p) x /= sum;
  return p;
}

/// Product of identical single-mode thermal states.
inline DensityOperator build_thermal(const SystemSpec& spec, double n_th,
                                     double tail_tolerance = kDefaultTailTolerance) {
  spec.validate();
  const auto p = thermal_populations(spec.kind, n_th, spec.cutoff);
  FockBasis basis(spec);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  std::vector<int> occ;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    basis.decode(i, occ);
    double v = 1.0;
    for (int k : occ) v *= p[k];
    m(i, i) = v;
  }
  StateDiagnostics diag;
  if (!spec.is_two_level()) {
    diag.truncation_tail = thermal_tail(n_th, spec.cutoff);
    if (diag.truncation_tail > tail_tolerance) {
      diag.tail_warning = true;
      std::ostringstream os;
      os << "thermal truncation tail " << diag.truncation_tail << " exceeds tolerance " << tail_tolerance;
      diag.warnings.push_back(os.str());
    }
  }
  return DensityOperator(spec, std::move(m), std::move(diag));
}

/// Thermal state with the smallest cutoff meeting `tail` (bosonic) or d = 2.
inline DensityOperator build_thermal_adaptive(int n_modes, StatisticsKind kind, double n_th,
                                              double tail = kDefaultTailTolerance) {
  const SystemSpec spec = kind == StatisticsKind::two_level ? SystemSpec::two_level(n_modes)
                                                            : SystemSpec::bosonic(n_modes, adaptive_cutoff(n_th, tail));
  return build_thermal(spec, n_th, tail);
}

/// Normalized pure state |psi><psi|.
inline DensityOperator pure_state(const SystemSpec& spec, const Eigen::VectorXcd& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw InvalidStateError("pure_state: zero vector");
  const Eigen::VectorXcd v = psi / norm;
  return DensityOperator(spec, v * v.adjoint());
}

/// b_W^dag |0>, i.e. sum_i conj(c_i) |1_i>.
inline Eigen::VectorXcd w_vector(const SystemSpec& spec, const ModeCoefficients& coeffs) {
  if (static_cast<int>(coeffs.size()) != spec.n_modes) throw DomainError("coefficient count must equal N");
  FockBasis basis(spec);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.size());
  for (int m = 0; m < spec.n_modes; ++m) v(basis.single_excitation(m)) = std::conj(coeffs[m]);
  return v;
}

inline DensityOperator w_state(const SystemSpec& spec, const ModeCoefficients& coeffs) {
  return pure_state(spec, w_vector(spec, coeffs.normalized()));
}

/// (1-p)|W><W| + p I/2^N on N qubits with uniform coefficients.
inline DensityOperator white_noise_state(int n_modes, double p) {
  if (p < 0.0 || p > 1.0) throw DomainError("white-noise weight must lie in [0, 1]");
  const SystemSpec spec = SystemSpec::two_level(n_modes);
  const Eigen::VectorXcd w = w_vector(spec, ModeCoefficients::uniform(n_modes));
  const auto dim = static_cast<Eigen::Index>(spec.dimension());
  Eigen::MatrixXcd m = (1.0 - p) * (w * w.adjoint());
  m.diagonal().array() += p / static_cast<double>(dim);
  return DensityOperator(spec, std::move(m));
}

namespace detail {

/// Sparse matrix of sum_k conj(u_k) b_k^dag from `from` into `to`.
inline Eigen::SparseMatrix<cplx> raising_map(const SystemSpec& from, const SystemSpec& to,
                                             const std::vector<cplx>& u) {
  FockBasis src(from), dst(to);
  std::vector<Eigen::Triplet<cplx>> trip;
  std::vector<int> occ;
  for (std::size_t c = 0; c < src.size(); ++c) {
    src.decode(c, occ);
    for (int k = 0; k < from.n_modes; ++k) {
      if (u[k] == 0.0) continue;
      if (from.is_two_level() && occ[k] == 1) continue;
      const double amp = from.is_two_level() ? 1.0 : std::sqrt(static_cast<double>(occ[k] + 1));
      ++occ[k];
      if (auto r = dst.encode(occ)) trip.emplace_back(static_cast<int>(*r), static_cast<int>(c), std::conj(u[k]) * amp);
      --occ[k];
    }
  }
  Eigen::SparseMatrix<cplx> a(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(src.size()));
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

/// Cutoff used for the state after one excitation is added.
inline SystemSpec addition_spec(const SystemSpec& spec) {
  if (spec.is_two_level()) return spec;
  SystemSpec out = SystemSpec::bosonic(spec.n_modes, spec.cutoff + 1);
  out.dimension();  // enforce the limit before allocating
  return out;
}

/// Population on occupation level `level` of any mode.
inline double population_at_level(const SystemSpec& spec, const Eigen::MatrixXcd& m, int level) {
  FockBasis basis(spec);
  double s = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (int k = 0; k < spec.n_modes; ++k)
      if (basis.occupation(i, k) == level) {
        s += m(i, i).real();
        break;
      }
  return s;
}

struct UnnormalizedAddition {
  Eigen::MatrixXcd sigma;  // b^dag rho b
  double weight = 0.0;     // its trace
};

inline UnnormalizedAddition raise_state(const DensityOperator& rho, const SystemSpec& out,
                                        const std::vector<cplx>& u) {
  const auto a = raising_map(rho.spec(), out, u);
  Eigen::MatrixXcd left = a * rho.matrix();
  Eigen::MatrixXcd sigma = left * a.adjoint();
  const double w = sigma.trace().real();
  return {std::move(sigma), w};
}

inline void require_normalized(const ModeCoefficients& coeffs, int n_modes) {
  if (static_cast<int>(coeffs.size()) != n_modes) throw DomainError("coefficient count must equal N");
  if (!coeffs.is_normalized()) throw DomainError("mode coefficients must be normalized");
}

}  // namespace detail

/// b_W^dag rho b_W / Tr(.). Bosonic results carry cutoff d+1 so the addition
/// is exact on the truncated input; addition_leakage records the weight on
/// the new top level.
inline DensityOperator add_particle_nonlocal(const DensityOperator& rho0, const ModeCoefficients& coeffs) {
  detail::require_normalized(coeffs, rho0.n_modes());
  const SystemSpec out = detail::addition_spec(rho0.spec());
  auto add = detail::raise_state(rho0, out, coeffs.values());
  if (!(add.weight > kProjectionFloor))
    throw DegenerateProjectionError("particle addition has vanishing norm " + std::to_string(add.weight));
  add.sigma /= add.weight;
  StateDiagnostics diag = rho0.diagnostics();
  if (!out.is_two_level()) diag.addition_leakage = detail::population_at_level(out, add.sigma, out.cutoff - 1);
  return DensityOperator(out, std::move(add.sigma), std::move(diag));
}

/// Per-block weights of a semilocal addition.
struct SemilocalWeights {
  std::vector<Combination> blocks;   // blocks that received weight
  std::vector<double> probabilities;  // P_C, summing to 1
  std::vector<std::string> warnings;
};

/// sum_C P_C b_C^dag rho b_C / Tr(b_C^dag rho b_C), P_C proportional to
/// Tr(b_C^dag rho b_C) * sum_{i in C} |c_i|^2. Blocks with zero weight are dropped.
inline DensityOperator add_particle_semilocal(const DensityOperator& rho0, const Structure& structure,
                                              const ModeCoefficients& coeffs,
                                              SemilocalWeights* weights_out = nullptr) {
  detail::require_normalized(coeffs, rho0.n_modes());
  if (structure.n_modes() != rho0.n_modes()) throw DomainError("structure and state disagree on N");
  const SystemSpec out = detail::addition_spec(rho0.spec());
  SemilocalWeights weights;
  std::vector<Eigen::MatrixXcd> parts;
  std::vector<double> raw;
  for (const auto& block : structure.blocks()) {
    const auto u = coeffs.truncated(block);
    if (!u) {
      weights.warnings.push_back("block " + block.to_string() + " dropped: all coefficients vanish");
      continue;
    }
    auto add = detail::raise_state(rho0, out, *u);
    const double p = add.weight * coeffs.weight(block);
    if (!(add.weight > kProjectionFloor) || p <= 0.0) {
      weights.warnings.push_back("block " + block.to_string() + " dropped: vanishing addition weight");
      continue;
    }
    add.sigma /= add.weight;
    parts.push_back(std::move(add.sigma));
    raw.push_back(p);
    weights.blocks.push_back(block);
  }
  if (parts.empty()) throw DegenerateProjectionError("semilocal addition: every block has zero weight");
  double total = 0.0;
  for (double p : raw) total += p;
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(parts[0].rows(), parts[0].cols());
  for (std::size_t b = 0; b < parts.size(); ++b) {
    weights.probabilities.push_back(raw[b] / total);
    sum += weights.probabilities.back() * parts[b];
  }
  StateDiagnostics diag = rho0.diagnostics();
  for (const auto& w : weights.warnings) diag.warnings.push_back(w);
  if (!out.is_two_level()) diag.addition_leakage = detail::population_at_level(out, sum, out.cutoff - 1);
  if (weights_out) *weights_out = weights;
  return DensityOperator(out, std::move(sum), std::move(diag));
}

/// <W|rho|W> with |W> = b_W^dag |0>.
inline double fidelity_w(const DensityOperator& rho, const ModeCoefficients& coeffs) {
  detail::require_normalized(coeffs, rho.n_modes());
  FockBasis basis(rho.spec());
  cplx f = 0.0;
  for (int i = 0; i < rho.n_modes(); ++i)
    for (int j = 0; j < rho.n_modes(); ++j)
      f += coeffs[i] * rho(basis.single_excitation(i), basis.single_excitation(j)) * std::conj(coeffs[j]);
  return std::clamp(f.real(), 0.0, 1.0);
}

/// U rho U^dag with U = exp(i sum_k theta_k n_k).
inline DensityOperator rotate_phases(const DensityOperator& rho, const std::vector<double>& theta) {
  if (static_cast<int>(theta.size()) != rho.n_modes()) throw DomainError("need one phase per mode");
  FockBasis basis(rho.spec());
  Eigen::VectorXcd u(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double ph = 0.0;
    for (int k = 0; k < rho.n_modes(); ++k) ph += theta[k] * basis.occupation(i, k);
    u(i) = std::polar(1.0, ph);
  }
  Eigen::MatrixXcd m = u.asDiagonal() * rho.matrix() * u.conjugate().asDiagonal();
  return DensityOperator(rho.spec(), std::move(m), rho.diagnostics());
}

}  // namespace wmwit
