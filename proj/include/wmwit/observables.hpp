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

// Second- and fourth-order moments used by both witnesses, computed exactly
// from a density operator or from the closed forms for thermal and
// thermal W-like states.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "wmwit/hilbert.hpp"
#include "wmwit/partitions.hpp"

namespace wmwit {

/// Moments of the normalized truncated mode b_C.
struct CollectiveStats {
  double mean = 0.0;      // <b_C^dag b_C>
  double variance = 0.0;  // <n_C^2> - <n_C>^2
  double anti = 0.0;      // <b_C b_C^dag>
};

struct ObservableSet {
  int n_modes = 0;
  StatisticsKind kind = StatisticsKind::bosonic;
  Eigen::MatrixXcd cross;        // (i, j) -> <b_i^dag b_j>, 0-based
  Eigen::VectorXd numbers;       // <n_i>
  Eigen::MatrixXd pair_numbers;  // <n_i n_j>; diagonal holds <n_i^2>
  std::map<ModeMask, CollectiveStats> collective;

  const CollectiveStats& at(const Combination& c) const {
    auto it = collective.find(c.mask());
    if (it == collective.end()) throw DomainError("collective moments of " + c.to_string() + " were not computed");
    return it->second;
  }

  /// sum_{i<j} |<b_i^dag b_j>|
  double cross_abs_sum() const {
    double s = 0.0;
    for (int i = 0; i < n_modes; ++i)
      for (int j = i + 1; j < n_modes; ++j) s += std::abs(cross(i, j));
    return s;
  }

  double number_sum() const { return numbers.sum(); }

  /// max_{i != j} sqrt(<n_i n_j>)
  double max_pair_root() const {
    double m = 0.0;
    for (int i = 0; i < n_modes; ++i)
      for (int j = 0; j < n_modes; ++j)
        if (i != j) m = std::max(m, std::sqrt(std::max(0.0, pair_numbers(i, j))));
    return m;
  }
};

/// Exact moments of rho. `subsets` selects the collective modes whose
/// mean/variance are needed; each uses the normalized truncation of coeffs.
inline ObservableSet observables(const DensityOperator& rho, const std::vector<Combination>& subsets = {},
                                 const ModeCoefficients& coeffs = {}) {
  const int n = rho.n_modes();
  FockBasis basis(rho.spec());
  ObservableSet out;
  out.n_modes = n;
  out.kind = rho.spec().kind;
  out.cross = Eigen::MatrixXcd::Zero(n, n);
  out.numbers = Eigen::VectorXd::Zero(n);
  out.pair_numbers = Eigen::MatrixXd::Zero(n, n);

  // number-diagonal moments
  std::vector<int> occ;
  for (std::size_t l = 0; l < basis.size(); ++l) {
    const double p = rho(l, l).real();
    if (p == 0.0) continue;
    basis.decode(l, occ);
    for (int i = 0; i < n; ++i) {
      out.numbers(i) += occ[i] * p;
      for (int j = 0; j < n; ++j) out.pair_numbers(i, j) += static_cast<double>(occ[i]) * occ[j] * p;
    }
  }
  for (int i = 0; i < n; ++i) {
    out.cross(i, i) = out.numbers(i);
    for (int j = i + 1; j < n; ++j) {
      out.cross(i, j) = rho.expectation(LadderWord{raise(i + 1), lower(j + 1)});
      out.cross(j, i) = std::conj(out.cross(i, j));
    }
  }
  if (subsets.empty()) return out;
  if (static_cast<int>(coeffs.size()) != n) throw DomainError("collective moments need one coefficient per mode");

  // fourth-order tensor over the modes touched by any subset
  ModeMask touched = 0;
  for (const auto& c : subsets) {
    if (!c.within(n)) throw DomainError("subset " + c.to_string() + " references a mode beyond N");
    touched |= c.mask();
  }
  std::vector<int> modes = Combination::from_mask(touched).members();
  const int u = static_cast<int>(modes.size());
  std::vector<int> pos(n + 1, -1);
  for (int a = 0; a < u; ++a) pos[modes[a]] = a;
  std::vector<cplx> anti(u * u), quartic(u * u * u * u);
  for (int a = 0; a < u; ++a)
    for (int b = 0; b < u; ++b) anti[a * u + b] = rho.expectation(LadderWord{lower(modes[a]), raise(modes[b])});
  for (int a = 0; a < u; ++a)
    for (int b = 0; b < u; ++b)
      for (int c = 0; c < u; ++c)
        for (int d = 0; d < u; ++d)
          quartic[((a * u + b) * u + c) * u + d] =
              rho.expectation(LadderWord{raise(modes[a]), lower(modes[b]), raise(modes[c]), lower(modes[d])});

  for (const auto& c : subsets) {
    const auto t = coeffs.truncated(c);
    if (!t) throw DegenerateProjectionError("collective mode over " + c.to_string() + " has zero weight");
    const auto& w = *t;
    cplx mean = 0.0, am = 0.0, sq = 0.0;
    for (int k : c.members())
      for (int l : c.members()) {
        const cplx f = std::conj(w[k - 1]) * w[l - 1];
        mean += f * out.cross(k - 1, l - 1);
        am += w[k - 1] * std::conj(w[l - 1]) * anti[pos[k] * u + pos[l]];
        for (int p : c.members())
          for (int q : c.members())
            sq += f * std::conj(w[p - 1]) * w[q - 1] * quartic[((pos[k] * u + pos[l]) * u + pos[p]) * u + pos[q]];
      }
    CollectiveStats s;
    s.mean = mean.real();
    s.anti = am.real();
    s.variance = std::max(0.0, sq.real() - s.mean * s.mean);
    out.collective[c.mask()] = s;
  }
  return out;
}

/// Every combination of {1..N} with at most max_size members, by mask.
inline std::vector<Combination> all_combinations(int n_modes, int max_size) {
  std::vector<Combination> out;
  for (ModeMask m = 1; m < (ModeMask{1} << n_modes); ++m)
    if (std::popcount(m) <= max_size) out.push_back(Combination::from_mask(m));
  return out;
}

/// Closed-form moments of the product thermal state; collective moments are
/// filled for every combination in `subsets`.
inline ObservableSet thermal_analytic(int n_modes, double n_th, StatisticsKind kind,
                                      const std::vector<Combination>& subsets = {}) {
  if (n_th < 0.0 || (kind == StatisticsKind::two_level && n_th > 1.0))
    throw DomainError("thermal occupation outside the allowed range");
  const bool tl = kind == StatisticsKind::two_level;
  ObservableSet o;
  o.n_modes = n_modes;
  o.kind = kind;
  o.cross = Eigen::MatrixXcd::Identity(n_modes, n_modes) * n_th;
  o.numbers = Eigen::VectorXd::Constant(n_modes, n_th);
  o.pair_numbers = Eigen::MatrixXd::Constant(n_modes, n_modes, n_th * n_th);
  o.pair_numbers.diagonal().setConstant(tl ? n_th : 2 * n_th * n_th + n_th);
  const double g = tl ? 1.0 - n_th : n_th + 1.0;
  for (const auto& c : subsets) o.collective[c.mask()] = CollectiveStats{n_th, n_th * g, g};
  return o;
}

/// Closed-form moments of the thermal W-like state (uniform real coefficients).
inline ObservableSet wlike_analytic(int n_modes, double n_th, StatisticsKind kind) {
  if (n_modes < 1) throw DomainError("wlike_analytic: N must be >= 1");
  if (n_th < 0.0 || (kind == StatisticsKind::two_level && n_th > 1.0))
    throw DomainError("thermal occupation outside the allowed range");
  const bool tl = kind == StatisticsKind::two_level;
  const double n = n_th, N = n_modes;
  const double g = tl ? 1.0 - n : n + 1.0;
  ObservableSet o;
  o.n_modes = n_modes;
  o.kind = kind;
  const double number = (N * n + g) / N;
  o.cross = Eigen::MatrixXcd::Constant(n_modes, n_modes, g / N);
  o.cross.diagonal().setConstant(number);
  o.numbers = Eigen::VectorXd::Constant(n_modes, number);
  o.pair_numbers = Eigen::MatrixXd::Constant(n_modes, n_modes, n * (N * n + 2 * g) / N);
  if (tl) {
    o.pair_numbers.diagonal().setConstant(number);
  } else {
    const double own = 6 * n * n * n + 12 * n * n + 7 * n + 1;  // <(m+1)^3> for thermal m
    o.pair_numbers.diagonal().setConstant(((N - 1) * (2 * n * n + n) * (n + 1) + own) / (N * (n + 1)));
  }
  return o;
}

}  // namespace wmwit
