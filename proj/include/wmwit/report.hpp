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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wmwit/error.hpp"

namespace wmwit {

/// Margins below -kViolationEpsilon count as violations.
inline constexpr double kViolationEpsilon = 1e-10;

struct ReportTerm {
  std::string name;
  double value = 0.0;
};

/// Finite-statistics summary attached to Monte Carlo reports.
struct Confidence {
  double margin_stderr = 0.0;
  double z = 3.0;
  bool claimed = false;  // margin + z * stderr < 0
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
};

struct BlockTerm {
  std::string block;  // "[1 2]"
  double probability = 0.0;
  double bound = 0.0;
};

struct WitnessReport {
  std::string witness;  // "entanglement" or "nonlocality"
  int n_modes = 0;
  int max_entangled = 0;  // M
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool violated = false;
  std::vector<ReportTerm> terms;
  std::string structure;            // argmax structure (nonlocality)
  std::vector<BlockTerm> per_block;  // P_C, B_C (nonlocality)
  std::optional<Confidence> confidence;
  std::vector<std::string> warnings;

  void finalize() {
    margin = rhs - lhs;
    violated = margin < -kViolationEpsilon;
  }

  double term(std::string_view name) const {
    for (const auto& t : terms)
      if (t.name == name) return t.value;
    throw DomainError("report has no term '" + std::string(name) + "'");
  }
};

}  // namespace wmwit
