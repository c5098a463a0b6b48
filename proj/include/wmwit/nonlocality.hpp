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

// Witness for nonlocal single-excitation addition: the conditioned-minus-
// initial cross-correlator sum against the best semilocal bound over all
// structures with blocks of at most M modes.

#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include "wmwit/entanglement.hpp"
#include "wmwit/observables.hpp"
#include "wmwit/partitions.hpp"
#include "wmwit/report.hpp"
#include "wmwit/roots.hpp"
#include "wmwit/states.hpp"

namespace wmwit {

struct BlockBound {
  Combination block;
  double probability = 0.0;  // P_C
  double bound = 0.0;        // B_C
};

struct StructureBound {
  Structure structure;
  std::vector<BlockBound> per_block;
  double total = 0.0;
  bool enumerated = true;  // false: enumeration cap hit, only the symmetric structure was scored
  std::vector<std::string> warnings;
};

/// Per-block bound B_C from moments of the initial state. obs0 must hold the
/// collective moments of C.
inline double b_c_bound(const ObservableSet& obs0, const Combination& c) {
  const int n = obs0.n_modes;
  if (!c.within(n)) throw DomainError("block " + c.to_string() + " references a mode beyond N");
  const auto& st = obs0.at(c);
  const double denom = 2.0 * (st.mean + 1.0);
  double pair_sum = 0.0;
  for (int j = 1; j <= n; ++j)
    for (int i = 1; i <= n; ++i) {
      if (i == j) continue;
      const double nn = obs0.pair_numbers(i - 1, j - 1);
      pair_sum += c.contains(i) ? std::sqrt(std::max(0.0, nn + obs0.numbers(j - 1)))
                                : std::sqrt(std::max(0.0, nn + obs0.numbers(i - 1)));
    }
  double in_sum = 0.0;
  for (int i : c.members()) in_sum += obs0.numbers(i - 1);
  const double commutator =
      (static_cast<double>(c.size()) - 1.0) / denom * (std::sqrt(std::max(0.0, in_sum * st.mean)) + 1.0);
  return std::sqrt(st.variance) / denom * pair_sum + commutator;
}

inline double b_c_bound(const DensityOperator& rho0, const Combination& c, const ModeCoefficients& coeffs) {
  if (rho0.spec().is_two_level()) throw UnsupportedError("B_C is only available for bosonic modes");
  return b_c_bound(observables(rho0, {c}, coeffs), c);
}

/// P_C proportional to <b_C b_C^dag>_0 * sum_{i in C} |c_i|^2.
inline std::vector<double> locality_probabilities(const ObservableSet& obs0, const Structure& s,
                                                  const ModeCoefficients& coeffs) {
  std::vector<double> p;
  double total = 0.0;
  for (const auto& b : s.blocks()) {
    const double w = coeffs.weight(b);
    p.push_back(w > 0.0 ? w * obs0.at(b).anti : 0.0);
    total += p.back();
  }
  if (!(total > 0.0)) throw DegenerateProjectionError("every block of " + s.to_string() + " has zero weight");
  for (auto& x : p) x /= total;
  return p;
}

inline std::vector<double> locality_probabilities(const DensityOperator& rho0, const Structure& s,
                                                  const ModeCoefficients& coeffs) {
  std::vector<Combination> blocks;
  for (const auto& b : s.blocks())
    if (coeffs.weight(b) > 0.0) blocks.push_back(b);
  return locality_probabilities(observables(rho0, blocks, coeffs), s, coeffs);
}

/// k blocks of M consecutive modes plus the remainder.
inline Structure symmetric_structure(int n_modes, int max_entangled) {
  std::vector<Combination> blocks;
  for (int start = 1; start <= n_modes; start += max_entangled) {
    std::vector<int> m;
    for (int i = start; i < start + max_entangled && i <= n_modes; ++i) m.push_back(i);
    blocks.emplace_back(std::move(m));
  }
  return Structure(n_modes, std::move(blocks));
}

namespace detail {

inline StructureBound score_structure(const ObservableSet& obs0, const Structure& s, const ModeCoefficients& coeffs,
                                      std::unordered_map<ModeMask, double>& memo) {
  StructureBound out;
  out.structure = s;
  const auto p = locality_probabilities(obs0, s, coeffs);
  for (std::size_t b = 0; b < s.blocks().size(); ++b) {
    const auto& block = s.blocks()[b];
    double bc = 0.0;
    if (p[b] > 0.0) {
      auto it = memo.find(block.mask());
      bc = it != memo.end() ? it->second : (memo[block.mask()] = b_c_bound(obs0, block));
    }
    out.per_block.push_back({block, p[b], bc});
    out.total += p[b] * bc;
  }
  return out;
}

}  // namespace detail

/// Maximum of sum_C P_C B_C over structures with blocks <= M, from moments
/// holding every needed collective entry.
inline StructureBound bound(const ObservableSet& obs0, int max_entangled, const ModeCoefficients& coeffs,
                            int cap = kDefaultEnumerationCap) {
  detail::check_witness_range(obs0.n_modes, max_entangled);
  std::unordered_map<ModeMask, double> memo;
  if (obs0.n_modes > cap) {
    auto out = detail::score_structure(obs0, symmetric_structure(obs0.n_modes, max_entangled), coeffs, memo);
    out.enumerated = false;
    out.warnings.push_back("N exceeds the enumeration cap; only the symmetric structure was scored");
    return out;
  }
  StructureBound best;
  bool first = true;
  for (const auto& s : enumerate_structures(obs0.n_modes, max_entangled, cap)) {
    auto cand = detail::score_structure(obs0, s, coeffs, memo);
    if (first || cand.total > best.total) {
      best = std::move(cand);
      first = false;
    }
  }
  return best;
}

/// Same, computing the moments from rho0 (bosonic only).
inline StructureBound bound(const DensityOperator& rho0, int max_entangled, const ModeCoefficients& coeffs,
                            int cap = kDefaultEnumerationCap) {
  if (rho0.spec().is_two_level())
    throw UnsupportedError("the general nonlocality bound is only available for bosonic modes");
  detail::check_witness_range(rho0.n_modes(), max_entangled);
  detail::require_normalized(coeffs, rho0.n_modes());
  std::vector<Combination> needed;
  if (rho0.n_modes() > cap) {
    for (const auto& b : symmetric_structure(rho0.n_modes(), max_entangled).blocks())
      if (coeffs.weight(b) > 0.0) needed.push_back(b);
  } else {
    for (auto& c : all_combinations(rho0.n_modes(), max_entangled))
      if (coeffs.weight(c) > 0.0) needed.push_back(std::move(c));
  }
  return bound(observables(rho0, needed, coeffs), max_entangled, coeffs, cap);
}

/// sum_{i<j} |<b_i^dag b_j>_c - <b_i^dag b_j>_0|
inline double lhs_difference(const ObservableSet& obs_c, const ObservableSet& obs0) {
  if (obs_c.n_modes != obs0.n_modes || obs_c.kind != obs0.kind)
    throw DomainError("conditioned and initial states must share N and statistics kind");
  double s = 0.0;
  for (int i = 0; i < obs0.n_modes; ++i)
    for (int j = i + 1; j < obs0.n_modes; ++j) s += std::abs(obs_c.cross(i, j) - obs0.cross(i, j));
  return s;
}

inline double lhs_difference(const DensityOperator& rho_c, const DensityOperator& rho0) {
  return lhs_difference(observables(rho_c), observables(rho0));
}

inline WitnessReport assemble_nonlocality(double lhs, const StructureBound& b, int n_modes, int max_entangled) {
  WitnessReport r;
  r.witness = "nonlocality";
  r.n_modes = n_modes;
  r.max_entangled = max_entangled;
  r.lhs = lhs;
  r.rhs = b.total;
  r.structure = b.structure.to_string();
  for (const auto& pb : b.per_block) r.per_block.push_back({pb.block.to_string(), pb.probability, pb.bound});
  r.terms = {{"cross_difference_sum", lhs}, {"structure_bound", b.total}, {"enumerated", b.enumerated ? 1.0 : 0.0}};
  r.warnings = b.warnings;
  r.finalize();
  return r;
}

/// Full nonlocality witness on a conditioned/initial state pair.
inline WitnessReport evaluate_nonlocality(const DensityOperator& rho_c, const DensityOperator& rho0, int max_entangled,
                                          const ModeCoefficients& coeffs, int cap = kDefaultEnumerationCap) {
  const auto b = bound(rho0, max_entangled, coeffs, cap);
  auto r = assemble_nonlocality(lhs_difference(rho_c, rho0), b, rho0.n_modes(), max_entangled);
  for (const auto& w : rho_c.diagnostics().warnings) r.warnings.push_back(w);
  return r;
}

/// Closed-form sides for a thermal initial state and fully nonlocal addition.
inline Sides thermal_sides_nonloc(int n_modes, int max_entangled, double n_th, StatisticsKind kind) {
  detail::check_witness_range(n_modes, max_entangled);
  if (n_th < 0.0 || (kind == StatisticsKind::two_level && n_th >= 1.0))
    throw DomainError("thermal occupation outside the allowed range");
  const double N = n_modes, M = max_entangled, n = n_th, g = detail::occupation_gap(kind, n_th);
  const int k = n_modes / max_entangled;
  const int rem = n_modes - k * max_entangled;
  Sides s;
  s.lhs = N * (N - 1) / 2 * g / N;
  s.rhs = N * (N - 1) / 2 * n + k * std::pow(M, 1.5) * (M - 1) / (2 * N * g) * (n + 1 / std::sqrt(M));
  if (rem >= 2) {
    const double r = rem;
    s.rhs += std::pow(r, 1.5) * (r - 1) / (2 * N * g) * (n + 1 / std::sqrt(r));
  }
  return s;
}

inline constexpr double kTwoLevelNonlocCap = 1.0 - 1e-12;

inline ThresholdResult threshold_nth_nonloc(int n_modes, int max_entangled, StatisticsKind kind, double tol = 1e-9) {
  detail::check_witness_range(n_modes, max_entangled);
  return smallest_root([&](double n) { return thermal_sides_nonloc(n_modes, max_entangled, n, kind).margin(); },
                       detail::threshold_options(kind, tol, kTwoLevelNonlocCap));
}

/// Largest N <= n_cap whose M = N-1 nonlocality threshold exceeds n_th; 0 if none.
inline int max_nonlocal_N(double n_th, StatisticsKind kind, int n_cap) {
  if (n_cap < 2) throw DomainError("max_nonlocal_N: N_cap must be >= 2");
  int best = 0;
  for (int n = 2; n <= n_cap; ++n) {
    const auto t = threshold_nth_nonloc(n, n - 1, kind);
    if (!t.found || t.value > n_th) best = n;
  }
  return best;
}

}  // namespace wmwit
