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

// Product number basis for N identical modes, ladder-operator words and
// the dense density operator they act on.
//
// Basis ordering: index = sum_k n_k * d^(N-1-k), so mode 1 varies slowest.
// Every dense export and file format uses this ordering.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wmwit/error.hpp"
#include "wmwit/partitions.hpp"

namespace wmwit {

using cplx = std::complex<double>;

enum class StatisticsKind { bosonic, two_level };

inline std::string to_string(StatisticsKind kind) {
  return kind == StatisticsKind::bosonic ? "bosonic" : "two_level";
}

inline StatisticsKind parse_kind(std::string_view text) {
  if (text == "bosonic") return StatisticsKind::bosonic;
  if (text == "two_level") return StatisticsKind::two_level;
  throw DomainError("unknown statistics kind '" + std::string(text) + "' (expected bosonic or two_level)");
}

inline constexpr std::size_t kDefaultDimensionLimit = 20000;

/// Hilbert dimension cap. WMWIT_DIM_LIMIT overrides the default.
inline std::size_t dimension_limit() {
  if (const char* env = std::getenv("WMWIT_DIM_LIMIT")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultDimensionLimit;
}

struct SystemSpec {
  int n_modes = 0;
  StatisticsKind kind = StatisticsKind::bosonic;
  int cutoff = 2;  // levels per mode, d

  static SystemSpec bosonic(int n_modes, int cutoff) { return {n_modes, StatisticsKind::bosonic, cutoff}; }
  static SystemSpec two_level(int n_modes) { return {n_modes, StatisticsKind::two_level, 2}; }

  bool is_two_level() const { return kind == StatisticsKind::two_level; }

  void validate() const {
    if (n_modes < 1) throw DomainError("SystemSpec: n_modes must be >= 1");
    if (cutoff < 2) throw DomainError("SystemSpec: cutoff must be >= 2");
    if (is_two_level() && cutoff != 2) throw DomainError("SystemSpec: two_level systems have cutoff 2");
  }

  /// d^N; refuses anything above dimension_limit().
  std::size_t dimension() const {
    validate();
    const std::size_t limit = dimension_limit();
    std::size_t dim = 1;
    for (int i = 0; i < n_modes; ++i) {
      dim *= static_cast<std::size_t>(cutoff);
      if (dim > limit) {
        std::ostringstream os;
        os << "Hilbert dimension " << cutoff << "^" << n_modes << " exceeds the safety limit " << limit
           << " (set WMWIT_DIM_LIMIT to raise it)";
        throw LimitError(os.str());
      }
    }
    return dim;
  }

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

/// Mass of a single-mode thermal distribution at levels >= cutoff.
inline double thermal_tail(double n_th, int cutoff) {
  if (n_th <= 0.0) return 0.0;
  return std::pow(n_th / (n_th + 1.0), cutoff);
}

/// Smallest cutoff whose thermal tail is below `tail`.
inline int adaptive_cutoff(double n_th, double tail = 1e-9) {
  if (n_th < 0.0) throw DomainError("adaptive_cutoff: n_th must be >= 0");
  int d = 2;
  while (thermal_tail(n_th, d) >= tail) ++d;
  return d;
}

/// b_mode (dagger = false) or b_mode^dag; modes are 1-based.
struct Ladder {
  int mode = 1;
  bool dagger = false;
  friend bool operator==(const Ladder&, const Ladder&) = default;
};

inline Ladder lower(int mode) { return {mode, false}; }
inline Ladder raise(int mode) { return {mode, true}; }

/// Operator product as written: the rightmost factor acts first.
using LadderWord = std::vector<Ladder>;

/// Basis bookkeeping for one SystemSpec.
class FockBasis {
 public:
  explicit FockBasis(const SystemSpec& spec) : spec_(spec), size_(spec.dimension()), stride_(spec.n_modes) {
    std::size_t s = 1;
    for (int m = spec.n_modes - 1; m >= 0; --m) {
      stride_[m] = s;
      s *= static_cast<std::size_t>(spec.cutoff);
    }
  }

  const SystemSpec& spec() const { return spec_; }
  std::size_t size() const { return size_; }
  int n_modes() const { return spec_.n_modes; }
  int cutoff() const { return spec_.cutoff; }

  /// Occupation of 0-based mode m in basis state `index`.
  int occupation(std::size_t index, int m) const {
    return static_cast<int>((index / stride_[m]) % static_cast<std::size_t>(spec_.cutoff));
  }

  void decode(std::size_t index, std::vector<int>& occ) const {
    occ.resize(spec_.n_modes);
    for (int m = 0; m < spec_.n_modes; ++m) occ[m] = occupation(index, m);
  }

  /// nullopt if any occupation is outside 0..d-1.
  std::optional<std::size_t> encode(const std::vector<int>& occ) const {
    std::size_t idx = 0;
    for (int m = 0; m < spec_.n_modes; ++m) {
      if (occ[m] < 0 || occ[m] >= spec_.cutoff) return std::nullopt;
      idx += static_cast<std::size_t>(occ[m]) * stride_[m];
    }
    return idx;
  }

  /// Basis index of the state with one excitation in 0-based mode m.
  std::size_t single_excitation(int m) const { return stride_[m]; }

  /// Applies `word` to basis state `index`. Bosonic intermediate states may
  /// exceed the cutoff (operators act as on the untruncated oscillator);
  /// two-level raising annihilates |1>. Returns the image index and amplitude,
  /// or nullopt when the image vanishes or leaves the truncated space.
  std::optional<std::pair<std::size_t, double>> apply(std::size_t index, const LadderWord& word,
                                                      std::vector<int>& scratch) const {
    decode(index, scratch);
    double amp = 1.0;
    const bool hard_core = spec_.is_two_level();
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      int& n = scratch[it->mode - 1];
      if (it->dagger) {
        if (hard_core && n >= 1) return std::nullopt;
        amp *= hard_core ? 1.0 : std::sqrt(static_cast<double>(n + 1));
        ++n;
      } else {
        if (n == 0) return std::nullopt;
        amp *= hard_core ? 1.0 : std::sqrt(static_cast<double>(n));
        --n;
      }
    }
    auto out = encode(scratch);
    if (!out) return std::nullopt;
    return std::make_pair(*out, amp);
  }

 private:
  SystemSpec spec_;
  std::size_t size_;
  std::vector<std::size_t> stride_;
};

/// Dense matrix of `word` restricted to the truncated space.
inline Eigen::MatrixXcd word_matrix(const SystemSpec& spec, const LadderWord& word) {
  FockBasis basis(spec);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  std::vector<int> scratch;
  for (std::size_t l = 0; l < basis.size(); ++l)
    if (auto img = basis.apply(l, word, scratch)) out(img->first, l) += img->second;
  return out;
}

/// Diagnostics carried alongside a density operator.
struct StateDiagnostics {
  double truncation_tail = 0.0;   // thermal mass discarded per mode
  bool tail_warning = false;      // truncation_tail above the configured tolerance
  double addition_leakage = 0.0;  // population on the level added by the cutoff extension
  std::vector<std::string> warnings;
};

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPositivityTolerance = 1e-10;

/// Hermitian, unit-trace operator in the product number basis. Immutable;
/// copies share storage.
class DensityOperator {
 public:
  DensityOperator(SystemSpec spec, Eigen::MatrixXcd entries, StateDiagnostics diag = {})
      : spec_(spec), diag_(std::move(diag)) {
    const std::size_t dim = spec_.dimension();
    if (static_cast<std::size_t>(entries.rows()) != dim || static_cast<std::size_t>(entries.cols()) != dim) {
      std::ostringstream os;
      os << "DensityOperator: expected " << dim << "x" << dim << " entries, got " << entries.rows() << "x"
         << entries.cols();
      throw InvalidStateError(os.str());
    }
    const double herm = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm <= kHermitianTolerance))
      throw InvalidStateError("DensityOperator: not Hermitian (max deviation " + std::to_string(herm) + ")");
    const cplx tr = entries.trace();
    if (!(std::abs(tr - 1.0) <= kTraceTolerance))
      throw InvalidStateError("DensityOperator: trace " + std::to_string(tr.real()) + " != 1");
    entries = 0.5 * (entries + entries.adjoint()).eval();
    matrix_ = std::make_shared<const Eigen::MatrixXcd>(std::move(entries));
  }

  const SystemSpec& spec() const { return spec_; }
  int n_modes() const { return spec_.n_modes; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_->rows()); }
  const Eigen::MatrixXcd& matrix() const { return *matrix_; }
  cplx operator()(std::size_t row, std::size_t col) const { return (*matrix_)(row, col); }
  const StateDiagnostics& diagnostics() const { return diag_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(*matrix_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Throws InvalidStateError if an eigenvalue is below -tol.
  void check_positive(double tol = kPositivityTolerance) const {
    const double lo = min_eigenvalue();
    if (lo < -tol) throw InvalidStateError("DensityOperator: negative eigenvalue " + std::to_string(lo));
  }

  /// Tr(word * rho).
  cplx expectation(const LadderWord& word) const {
    FockBasis basis(spec_);
    std::vector<int> scratch;
    cplx sum = 0.0;
    for (std::size_t l = 0; l < basis.size(); ++l)
      if (auto img = basis.apply(l, word, scratch)) sum += img->second * (*matrix_)(l, img->first);
    return sum;
  }

  /// Tr(op * rho) for a dense operator on the same space.
  cplx expectation(const Eigen::MatrixXcd& op) const {
    return (op.transpose().cwiseProduct(*matrix_)).sum();
  }

 private:
  SystemSpec spec_;
  std::shared_ptr<const Eigen::MatrixXcd> matrix_;
  StateDiagnostics diag_;
};

/// Zero-pads a bosonic state into a larger cutoff.
inline DensityOperator embed(const DensityOperator& rho, int new_cutoff) {
  const SystemSpec& from = rho.spec();
  if (from.is_two_level()) throw UnsupportedError("embed: two-level systems have a fixed cutoff");
  if (new_cutoff < from.cutoff) throw DomainError("embed: cutoff can only grow");
  if (new_cutoff == from.cutoff) return rho;
  SystemSpec to = SystemSpec::bosonic(from.n_modes, new_cutoff);
  FockBasis small(from), big(to);
  std::vector<std::size_t> map(small.size());
  std::vector<int> occ;
  for (std::size_t i = 0; i < small.size(); ++i) {
    small.decode(i, occ);
    map[i] = *big.encode(occ);
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(big.size(), big.size());
  for (std::size_t c = 0; c < small.size(); ++c)
    for (std::size_t r = 0; r < small.size(); ++r) out(map[r], map[c]) = rho(r, c);
  return DensityOperator(to, std::move(out), rho.diagnostics());
}

inline constexpr double kNormalizationTolerance = 1e-12;

/// Coefficients c_i of the collective mode b_W = sum_i c_i b_i.
class ModeCoefficients {
 public:
  ModeCoefficients() = default;
  explicit ModeCoefficients(std::vector<cplx> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("ModeCoefficients: need at least one coefficient");
  }

  /// c_i = 1/sqrt(N).
  static ModeCoefficients uniform(int n_modes) {
    return ModeCoefficients(std::vector<cplx>(n_modes, cplx(1.0 / std::sqrt(static_cast<double>(n_modes)))));
  }

  /// c_i = exp(i theta_i)/sqrt(N).
  static ModeCoefficients from_phases(const std::vector<double>& theta) {
    std::vector<cplx> v;
    const double s = 1.0 / std::sqrt(static_cast<double>(theta.size()));
    for (double t : theta) v.push_back(std::polar(s, t));
    return ModeCoefficients(std::move(v));
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  /// 0-based access.
  cplx operator[](std::size_t i) const { return values_[i]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& c : values_) s += std::norm(c);
    return s;
  }

  bool is_normalized() const { return std::abs(norm_squared() - 1.0) <= kNormalizationTolerance; }

  ModeCoefficients normalized() const {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw DegenerateProjectionError("ModeCoefficients: cannot normalize the zero vector");
    std::vector<cplx> v = values_;
    for (auto& c : v) c /= n;
    return ModeCoefficients(std::move(v));
  }

  /// sum over i in C of |c_i|^2.
  double weight(const Combination& block) const {
    double s = 0.0;
    for (int i : block.members()) s += std::norm(values_.at(i - 1));
    return s;
  }

  /// Coefficients of the normalized truncation b_C (zero outside C), or
  /// nullopt when every c_i in C vanishes.
  std::optional<std::vector<cplx>> truncated(const Combination& block) const {
    const double w = weight(block);
    if (w <= 0.0) return std::nullopt;
    std::vector<cplx> u(values_.size(), 0.0);
    const double s = 1.0 / std::sqrt(w);
    for (int i : block.members()) u[i - 1] = values_[i - 1] * s;
    return u;
  }

 private:
  std::vector<cplx> values_;
};

/// b_u^dag b_u for b_u = sum_k u_k b_k, as a dense matrix on the truncated space.
inline Eigen::MatrixXcd collective_number_matrix(const SystemSpec& spec, const std::vector<cplx>& u) {
  FockBasis basis(spec);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  std::vector<int> scratch;
  for (int k = 1; k <= spec.n_modes; ++k) {
    if (u[k - 1] == 0.0) continue;
    for (int l = 1; l <= spec.n_modes; ++l) {
      if (u[l - 1] == 0.0) continue;
      const cplx f = std::conj(u[k - 1]) * u[l - 1];
      const LadderWord w{raise(k), lower(l)};
      for (std::size_t c = 0; c < basis.size(); ++c)
        if (auto img = basis.apply(c, w, scratch)) out(img->first, c) += f * img->second;
    }
  }
  return out;
}

}  // namespace wmwit
