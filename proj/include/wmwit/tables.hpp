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

// Separable-pair and threshold tables, threshold curves versus N, and the
// largest certifiable N as a function of thermal occupation. Emitted as CSV
// (rounded and raw columns) or aligned markdown.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "wmwit/entanglement.hpp"
#include "wmwit/nonlocality.hpp"
#include "wmwit/partitions.hpp"

namespace wmwit {

/// Thermal occupations of reference platforms.
struct PlatformConstant {
  const char* name;
  double n_th;
};

inline constexpr PlatformConstant kPlatformConstants[] = {
    {"diamond optical phonons (40 THz, 300 K)", 0.002},
    {"optomechanical crystal", 0.021},
    {"optomechanical crystal (pulsed)", 0.14},
    {"membrane flexural mode", 0.23},
    {"superfluid helium acoustic mode", 0.83},
};

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

enum class TableId { separable_pairs, entanglement_thresholds, nonlocality_thresholds };

inline TableId parse_table_id(const std::string& s) {
  if (s == "I" || s == "1") return TableId::separable_pairs;
  if (s == "II" || s == "2") return TableId::entanglement_thresholds;
  if (s == "III" || s == "3") return TableId::nonlocality_thresholds;
  throw DomainError("unknown table '" + s + "' (expected I, II or III)");
}

struct TableCell {
  int n_modes = 0;
  int max_entangled = 0;
  double value = 0.0;
  bool found = true;
  std::string note;  // argmax signature for separable pairs
};

inline std::vector<TableCell> compute_table(TableId id, int n_max = 7, double tol = 1e-9) {
  std::vector<TableCell> out;
  for (int n = 2; n <= n_max; ++n)
    for (int m = 1; m < n; ++m) {
      TableCell c;
      c.n_modes = n;
      c.max_entangled = m;
      switch (id) {
        case TableId::separable_pairs: {
          const auto r = n_sep_max(n, m);
          c.value = static_cast<double>(r.value);
          c.note = r.argmax.to_string();
          break;
        }
        case TableId::entanglement_thresholds: {
          const auto t = threshold_nth(n, m, StatisticsKind::bosonic, tol);
          c.value = t.value;
          c.found = t.found;
          break;
        }
        case TableId::nonlocality_thresholds: {
          const auto t = threshold_nth_nonloc(n, m, StatisticsKind::bosonic, tol);
          c.value = t.value;
          c.found = t.found;
          break;
        }
      }
      out.push_back(c);
    }
  return out;
}

inline std::string table_csv(TableId id, const std::vector<TableCell>& cells) {
  std::string s = id == TableId::separable_pairs ? "N,M,n_sep_max,argmax\n" : "N,M,threshold,threshold_raw\n";
  for (const auto& c : cells) {
    s += std::to_string(c.n_modes) + "," + std::to_string(c.max_entangled) + ",";
    if (id == TableId::separable_pairs)
      s += std::to_string(static_cast<long long>(c.value)) + ",\"" + c.note + "\"\n";
    else if (!c.found)
      s += "none,none\n";
    else
      s += fixed(c.value, 3) + "," + fixed(c.value, 6) + "\n";
  }
  return s;
}

/// N down the rows, M across the columns.
inline std::string table_markdown(TableId id, const std::vector<TableCell>& cells) {
  int n_max = 2;
  for (const auto& c : cells) n_max = std::max(n_max, c.n_modes);
  const int width = id == TableId::separable_pairs ? 3 : 5;
  auto pad = [&](std::string v) {
    if (static_cast<int>(v.size()) < width) v = std::string(width - v.size(), ' ') + v;
    return v;
  };
  std::string s = "| N \\ M |";
  for (int m = 1; m < n_max; ++m) s += " " + pad(std::to_string(m)) + " |";
  s += "\n|-------|";
  for (int m = 1; m < n_max; ++m) s += std::string(width + 1, '-') + ":|";
  s += "\n";
  for (int n = 2; n <= n_max; ++n) {
    const std::string label = std::to_string(n);
    s += "| " + std::string(label.size() < 5 ? 5 - label.size() : 0, ' ') + label + " |";
    for (int m = 1; m < n_max; ++m) {
      std::string v;
      for (const auto& c : cells)
        if (c.n_modes == n && c.max_entangled == m) {
          if (id == TableId::separable_pairs)
            v = std::to_string(static_cast<long long>(c.value));
          else
            v = c.found ? fixed(c.value, 3) : "none";
        }
      s += " " + pad(v) + " |";
    }
    s += "\n";
  }
  return s;
}

enum class FigureId { entanglement_curves, nonlocality_curves, max_n };

inline FigureId parse_figure_id(const std::string& s) {
  if (s == "3") return FigureId::entanglement_curves;
  if (s == "4") return FigureId::nonlocality_curves;
  if (s == "5") return FigureId::max_n;
  throw DomainError("unknown figure '" + s + "' (expected 3, 4 or 5)");
}

/// M = N-1 thresholds for both statistics kinds.
struct CurvePoint {
  int n_modes = 0;
  ThresholdResult bosonic;
  ThresholdResult two_level;
};

inline std::vector<CurvePoint> threshold_curve(bool nonlocality, int n_min = 2, int n_max = 10, double tol = 1e-9) {
  std::vector<CurvePoint> out;
  for (int n = n_min; n <= n_max; ++n) {
    CurvePoint p;
    p.n_modes = n;
    if (nonlocality) {
      p.bosonic = threshold_nth_nonloc(n, n - 1, StatisticsKind::bosonic, tol);
      p.two_level = threshold_nth_nonloc(n, n - 1, StatisticsKind::two_level, tol);
    } else {
      p.bosonic = threshold_nth(n, n - 1, StatisticsKind::bosonic, tol);
      p.two_level = threshold_nth(n, n - 1, StatisticsKind::two_level, tol);
    }
    out.push_back(p);
  }
  return out;
}

inline std::string curve_csv(const std::vector<CurvePoint>& pts) {
  auto cell = [](const ThresholdResult& t) { return t.found ? fixed(t.value, 3) + "," + fixed(t.value, 6) : "none,none"; };
  std::string s = "N,bosonic,bosonic_raw,two_level,two_level_raw\n";
  for (const auto& p : pts) s += std::to_string(p.n_modes) + "," + cell(p.bosonic) + "," + cell(p.two_level) + "\n";
  return s;
}

inline std::string curve_markdown(const std::vector<CurvePoint>& pts) {
  auto cell = [](const ThresholdResult& t) { return t.found ? fixed(t.value, 3) : " none"; };
  std::string s = "|  N | bosonic | two_level |\n|---:|--------:|----------:|\n";
  for (const auto& p : pts) {
    std::string n = std::to_string(p.n_modes);
    s += "| " + std::string(2 - std::min<std::size_t>(2, n.size()), ' ') + n + " |   " + cell(p.bosonic) + " |     " +
         cell(p.two_level) + " |\n";
  }
  return s;
}

inline constexpr int kDefaultMaxNCap = 64;

/// Log-spaced occupations from 1e-3 to 1 plus the platform constants.
inline std::vector<double> default_occupation_grid(int points = 61) {
  std::vector<double> g;
  for (int k = 0; k < points; ++k) g.push_back(std::pow(10.0, -3.0 + 3.0 * k / (points - 1)));
  for (const auto& p : kPlatformConstants) g.push_back(p.n_th);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), g.end());
  return g;
}

struct MaxNRow {
  double n_th = 0.0;
  int entanglement_bosonic = 0;
  int entanglement_two_level = 0;
  int nonlocality_bosonic = 0;
  int nonlocality_two_level = 0;
};

/// Largest N per curve at each grid occupation; thresholds are computed once.
inline std::vector<MaxNRow> max_n_curves(const std::vector<double>& grid, int n_cap = kDefaultMaxNCap,
                                         double tol = 1e-9) {
  if (n_cap < 2) throw DomainError("N cap must be >= 2");
  std::vector<double> th[4];
  for (int n = 2; n <= n_cap; ++n) {
    const ThresholdResult r[4] = {threshold_nth(n, n - 1, StatisticsKind::bosonic, tol),
                                  threshold_nth(n, n - 1, StatisticsKind::two_level, tol),
                                  threshold_nth_nonloc(n, n - 1, StatisticsKind::bosonic, tol),
                                  threshold_nth_nonloc(n, n - 1, StatisticsKind::two_level, tol)};
    for (int c = 0; c < 4; ++c) th[c].push_back(r[c].found ? r[c].value : std::numeric_limits<double>::infinity());
  }
  auto largest = [&](int c, double n_th) {
    int best = 0;
    for (int n = 2; n <= n_cap; ++n)
      if (th[c][n - 2] > n_th) best = n;
    return best;
  };
  std::vector<MaxNRow> out;
  for (double x : grid) out.push_back({x, largest(0, x), largest(1, x), largest(2, x), largest(3, x)});
  return out;
}

inline std::string max_n_csv(const std::vector<MaxNRow>& rows) {
  std::string s = "n_th,entanglement_bosonic,entanglement_two_level,nonlocality_bosonic,nonlocality_two_level\n";
  for (const auto& r : rows)
    s += fixed(r.n_th, 6) + "," + std::to_string(r.entanglement_bosonic) + "," + std::to_string(r.entanglement_two_level) +
         "," + std::to_string(r.nonlocality_bosonic) + "," + std::to_string(r.nonlocality_two_level) + "\n";
  return s;
}

inline std::string max_n_markdown(const std::vector<MaxNRow>& rows) {
  std::string s =
      "|     n_th | ent. bosonic | ent. two-level | nonloc. bosonic | nonloc. two-level |\n"
      "|---------:|-------------:|---------------:|----------------:|------------------:|\n";
  auto pad = [](std::string v, std::size_t w) { return std::string(w > v.size() ? w - v.size() : 0, ' ') + v; };
  for (const auto& r : rows)
    s += "| " + pad(fixed(r.n_th, 6), 8) + " | " + pad(std::to_string(r.entanglement_bosonic), 12) + " | " +
         pad(std::to_string(r.entanglement_two_level), 14) + " | " + pad(std::to_string(r.nonlocality_bosonic), 15) +
         " | " + pad(std::to_string(r.nonlocality_two_level), 17) + " |\n";
  return s;
}

}  // namespace wmwit
