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

// Genuine (M+1)-partite entanglement witness built from cross correlators,
// pair number moments and the separable-pair count.

#pragma once

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "wmwit/observables.hpp"
#include "wmwit/partitions.hpp"
#include "wmwit/report.hpp"
#include "wmwit/roots.hpp"
#include "wmwit/states.hpp"

namespace wmwit {

namespace detail {

inline void check_witness_range(int n_modes, int max_entangled) {
  if (n_modes < 2) throw DomainError("witness needs N >= 2");
  if (max_entangled < 1 || max_entangled >= n_modes) throw DomainError("witness needs 1 <= M < N");
}

inline double occupation_gap(StatisticsKind kind, double n_th) {
  return kind == StatisticsKind::two_level ? 1.0 - n_th : n_th + 1.0;
}

inline RootOptions threshold_options(StatisticsKind kind, double tol, double two_level_cap = 1.0) {
  RootOptions opt;
  opt.tol = tol;
  if (kind == StatisticsKind::two_level) opt.initial_upper = opt.max_upper = two_level_cap;
  return opt;
}

}  // namespace detail

/// Witness from precomputed moments.
inline WitnessReport evaluate(const ObservableSet& obs, int max_entangled) {
  detail::check_witness_range(obs.n_modes, max_entangled);
  const auto nsep = n_sep_max(obs.n_modes, max_entangled);
  const std::int64_t n_pairs = std::int64_t{obs.n_modes} * (obs.n_modes - 1) / 2;
  WitnessReport r;
  r.witness = "entanglement";
  r.n_modes = obs.n_modes;
  r.max_entangled = max_entangled;
  const double cross = obs.cross_abs_sum();
  const double pair = obs.max_pair_root();
  const double numbers = obs.number_sum();
  r.lhs = cross;
  r.rhs = pair * std::sqrt(static_cast<double>(n_pairs * nsep.value)) + 0.5 * (max_entangled - 1) * numbers;
  r.terms = {{"cross_sum", cross},
             {"max_pair_root", pair},
             {"number_sum", numbers},
             {"n_pairs", static_cast<double>(n_pairs)},
             {"n_sep_max", static_cast<double>(nsep.value)}};
  r.structure = nsep.argmax.to_string();
  r.finalize();
  return r;
}

inline WitnessReport evaluate(const DensityOperator& rho, int max_entangled) {
  auto r = evaluate(observables(rho), max_entangled);
  r.warnings = rho.diagnostics().warnings;
  return r;
}

struct Sides {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
};

namespace detail {

inline Sides thermal_sides_given(int n_modes, int max_entangled, double n_th, StatisticsKind kind, double nsep) {
  if (n_th < 0.0 || (kind == StatisticsKind::two_level && n_th > 1.0))
    throw DomainError("thermal occupation outside the allowed range");
  const double N = n_modes, n = n_th, g = occupation_gap(kind, n_th);
  Sides s;
  s.lhs = (N - 1) * g / 2;
  s.rhs = std::sqrt((N - 1) / 2 * n * (N * n + 2 * g) * nsep) + 0.5 * (max_entangled - 1) * (N * n + g);
  return s;
}

}  // namespace detail

/// Closed-form witness sides for the thermal W-like state.
inline Sides thermal_sides(int n_modes, int max_entangled, double n_th, StatisticsKind kind) {
  detail::check_witness_range(n_modes, max_entangled);
  const double nsep = static_cast<double>(n_sep_max(n_modes, max_entangled).value);
  return detail::thermal_sides_given(n_modes, max_entangled, n_th, kind, nsep);
}

/// Smallest n_th at which the thermal W-like state stops violating the witness.
inline ThresholdResult threshold_nth(int n_modes, int max_entangled, StatisticsKind kind, double tol = 1e-9) {
  detail::check_witness_range(n_modes, max_entangled);
  const double nsep = static_cast<double>(n_sep_max(n_modes, max_entangled).value);
  return smallest_root(
      [&](double n) { return detail::thermal_sides_given(n_modes, max_entangled, n, kind, nsep).margin(); },
                       detail::threshold_options(kind, tol));
}

/// Largest N <= n_cap whose M = N-1 threshold exceeds n_th; 0 if none.
inline int max_genuine_N(double n_th, StatisticsKind kind, int n_cap) {
  if (n_cap < 2) throw DomainError("max_genuine_N: N_cap must be >= 2");
  int best = 0;
  for (int n = 2; n <= n_cap; ++n) {
    const auto t = threshold_nth(n, n - 1, kind);
    if (!t.found || t.value > n_th) best = n;
  }
  return best;
}

/// Root in p of the M = N-1 margin for (1-p)|W><W| + p I/2^N.
inline ThresholdResult white_noise_threshold(int n_modes = 3, double tol = 1e-9) {
  RootOptions opt;
  opt.tol = tol;
  opt.initial_upper = opt.max_upper = 1.0;
  opt.scan_points = 256;
  return smallest_root([&](double p) { return evaluate(white_noise_state(n_modes, p), n_modes - 1).margin; }, opt);
}

/// Convex mixture of product-over-blocks pure states; every block has at most
/// max_entangled modes and carries a Haar-random state.
inline DensityOperator random_constrained_state(const SystemSpec& spec, int max_entangled, int n_terms,
                                                std::uint64_t seed) {
  spec.validate();
  if (max_entangled < 1 || max_entangled > spec.n_modes) throw DomainError("need 1 <= M <= N");
  if (n_terms < 1) throw DomainError("need at least one mixture term");
  const auto structures = enumerate_structures(spec.n_modes, max_entangled);
  FockBasis basis(spec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::exponential_distribution<double> expo(1.0);
  std::uniform_int_distribution<std::size_t> pick(0, structures.size() - 1);

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  std::vector<double> weights(n_terms);
  double wsum = 0.0;
  for (auto& w : weights) wsum += (w = expo(rng));
  std::vector<int> occ;
  for (int t = 0; t < n_terms; ++t) {
    const Structure& s = structures[pick(rng)];
    std::vector<Eigen::VectorXcd> local;
    for (const auto& block : s.blocks()) {
      std::size_t dim = 1;
      for (std::size_t k = 0; k < block.size(); ++k) dim *= static_cast<std::size_t>(spec.cutoff);
      Eigen::VectorXcd v(dim);
      for (std::size_t k = 0; k < dim; ++k) v(k) = cplx(gauss(rng), gauss(rng));
      local.push_back(v / v.norm());
    }
    Eigen::VectorXcd psi(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      basis.decode(i, occ);
      cplx amp = 1.0;
      for (std::size_t b = 0; b < s.blocks().size(); ++b) {
        std::size_t li = 0;
        for (int m : s.blocks()[b].members()) li = li * spec.cutoff + occ[m - 1];
        amp *= local[b](li);
      }
      psi(i) = amp;
    }
    rho += (weights[t] / wsum) * (psi * psi.adjoint());
  }
  return DensityOperator(spec, std::move(rho));
}

}  // namespace wmwit
