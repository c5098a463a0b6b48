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

// Scan-then-bisect search for the smallest sign change of a margin function.

#pragma once

#include <cmath>
#include <functional>

namespace wmwit {

struct ThresholdResult {
  bool found = false;
  double value = 0.0;     // root location (valid when found)
  double residual = 0.0;  // f(value)
  double upper = 0.0;     // last bracket end examined
};

struct RootOptions {
  double tol = 1e-9;          // bracket width at termination
  double initial_upper = 1.0;
  double max_upper = 64.0;    // doubling stops here
  int scan_points = 2048;     // per bracket, to catch the first crossing
};

/// Smallest x in (0, upper] where f changes sign, starting from f(0).
/// The bracket [0, initial_upper] is doubled up to max_upper.
inline ThresholdResult smallest_root(const std::function<double(double)>& f, const RootOptions& opt = {}) {
  ThresholdResult out;
  const double f0 = f(0.0);
  if (f0 == 0.0) {
    out.found = true;
    return out;
  }
  double lo_edge = 0.0, f_lo_edge = f0;
  for (double upper = std::min(opt.initial_upper, opt.max_upper);; upper = std::min(2.0 * upper, opt.max_upper)) {
    out.upper = upper;
    const double step = (upper - lo_edge) / opt.scan_points;
    double a = lo_edge, fa = f_lo_edge;
    for (int k = 1; k <= opt.scan_points; ++k) {
      double b = k == opt.scan_points ? upper : lo_edge + k * step;
      const double fb = f(b);
      if (fb == 0.0) return {true, b, 0.0, upper};
      if ((fa < 0.0) != (fb < 0.0)) {
        while (b - a > opt.tol) {
          const double m = 0.5 * (a + b);
          const double fm = f(m);
          if (fm == 0.0) return {true, m, 0.0, upper};
          if ((fa < 0.0) != (fm < 0.0)) {
            b = m;
          } else {
            a = m;
            fa = fm;
          }
        }
        const double x = 0.5 * (a + b);
        return {true, x, f(x), upper};
      }
      a = b;
      fa = fb;
    }
    if (upper >= opt.max_upper) break;
    lo_edge = upper;
    f_lo_edge = fa;
  }
  return out;
}

}  // namespace wmwit
