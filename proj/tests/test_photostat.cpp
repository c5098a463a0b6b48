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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wmwit/photostat.hpp"

namespace wmwit {
namespace {

constexpr double kOracleTail = 1e-11;

DensityOperator thermal(int n, double nth) { return build_thermal_adaptive(n, StatisticsKind::bosonic, nth, kOracleTail); }
DensityOperator wlike(int n, double nth) { return add_particle_nonlocal(thermal(n, nth), ModeCoefficients::uniform(n)); }

TEST(Network, EmptyIsIdentity) {
  const OpticalNetwork net(3, {});
  EXPECT_EQ((net.transfer() - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Network, FiftyFiftyRows) {
  const auto t = network_transfer(OpticalNetwork(2, {BeamSplitter{0.5, 1, 2}}));
  const double h = 1 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(t(0, 0) - h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t(0, 1) - h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t(1, 0) - h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t(1, 1) + h), 0.0, 1e-15);
}

TEST(Network, TripartiteRowIsUniform) {
  const auto c = coefficients_from_network(tripartite_w_network());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(c[i]), 1 / std::sqrt(3.0), 1e-14);
  EXPECT_TRUE(c.is_normalized());
}

TEST(Network, PhaseShiftAndErrors) {
  const auto t = OpticalNetwork(2, {PhaseShift{0.3, 2}}).transfer();
  EXPECT_NEAR(std::arg(t(1, 1)), 0.3, 1e-15);
  EXPECT_THROW(OpticalNetwork(2, {BeamSplitter{1.5, 1, 2}}).transfer(), NonUnitaryError);
  EXPECT_THROW(OpticalNetwork(2, {BeamSplitter{0.5, 1, 1}}).transfer(), DomainError);
  EXPECT_THROW(OpticalNetwork(2, {PhaseShift{0.1, 3}}).transfer(), DomainError);
  EXPECT_THROW(coefficients_from_network(OpticalNetwork(2, {}), 3), DomainError);
}

TEST(Sideband, NumberProduct) {
  const auto oc = sideband_translate({raise(1), lower(1), raise(2), lower(2)});
  EXPECT_EQ(oc.gain_s_power, 0);
  EXPECT_EQ(oc.gain_as_power, 4);
  EXPECT_EQ(oc.to_string(), "a_AS2^dag a_AS1^dag a_AS1 a_AS2 / (G_S^0 G_AS^4)");
}

TEST(Sideband, MixedStokesAntiStokes) {
  const auto oc = sideband_translate({lower(2), raise(1), lower(1), raise(2)});
  EXPECT_EQ(oc.gain_s_power, 2);
  EXPECT_EQ(oc.gain_as_power, 2);
  EXPECT_EQ(oc.to_string(), "a_AS1^dag a_S2^dag a_S2 a_AS1 / (G_S^2 G_AS^2)");
}

TEST(Sideband, NotMeasurable) {
  EXPECT_THROW(sideband_translate({raise(1), lower(2)}), NotMeasurableError);
  EXPECT_THROW(sideband_translate({raise(1), raise(1), lower(1)}), NotMeasurableError);
  EXPECT_THROW(sideband_translate({raise(1), raise(1), lower(1), lower(2)}), NotMeasurableError);
}

TEST(Sideband, TranslationRoundTrip) {
  const std::vector<LadderWord> words = {
      {raise(1), lower(1)},
      {lower(2), raise(2)},
      {raise(1), lower(1), raise(3), lower(3)},
      {lower(2), raise(1), lower(1), raise(2)},
      {raise(2), raise(2), lower(2), lower(2)},
      {raise(1), lower(1), raise(1), lower(1)},
  };
  const auto rho = wlike(3, 0.1);
  for (const auto& g : {SidebandGains{1, 1}, SidebandGains{2, 0.5}, SidebandGains{0.03, 17}})
    for (const auto& w : words) {
      const auto oc = sideband_translate(w);
      const double exact = rho.expectation(w).real();
      const double back = oscillator_from_optical(optical_expectation(rho, oc, g), oc, g);
      EXPECT_NEAR(back, exact, 1e-12 * std::max(1.0, std::abs(exact))) << word_to_string(w);
    }
}

TEST(Interference, ThermalIsZero) {
  const auto rho = thermal(2, 0.3);
  EXPECT_NEAR(cross_from_interference(rho, 1, 2, uniform_phase_grid(64)), 0.0, 1e-14);
}

TEST(Interference, WLikeBipartite) {
  const auto rho = wlike(2, 0.1);
  EXPECT_NEAR(cross_from_interference(rho, 1, 2, uniform_phase_grid(64)), 0.55, 1e-9);
  EXPECT_THROW(cross_from_interference(rho, 1, 1, uniform_phase_grid(8)), DomainError);
}

TEST(Interference, GridRefinementWithinCosineBound) {
  const auto rho = rotate_phases(wlike(2, 0.1), {0.0, 0.77});
  const double exact = std::abs(observables(rho).cross(0, 1));
  const double a = cross_from_interference(rho, 1, 2, uniform_phase_grid(64));
  const double b = cross_from_interference(rho, 1, 2, uniform_phase_grid(256));
  EXPECT_LE(a, exact + 1e-12);
  EXPECT_LE(b, exact + 1e-12);
  EXPECT_GE(a, exact * std::cos(std::numbers::pi / 64) - 1e-12);
  EXPECT_GE(b, exact * std::cos(std::numbers::pi / 256) - 1e-12);
  EXPECT_LE(std::abs(a - b), exact * (1 - std::cos(std::numbers::pi / 64)) + 1e-12);
}

TEST(PhaseSearch, MatchedWLike) {
  for (int n = 2; n <= 4; ++n) {
    const double nth = 0.05;
    const auto r = cross_sum_from_nw(wlike(n, nth));
    EXPECT_NEAR(r.cross_sum, n * (n - 1) / 2.0 * (nth + 1) / n, 1e-8);
    EXPECT_TRUE(r.converged);
  }
  EXPECT_NEAR(cross_sum_from_nw(thermal(3, 0.2)).cross_sum, 0.0, 1e-12);
}

TEST(PhaseSearch, RandomPhasesRecovered) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
  const auto base = wlike(3, 0.1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rho = rotate_phases(base, {u(rng), u(rng), u(rng)});
    const double target = observables(rho).cross_abs_sum();
    const auto g = cross_sum_from_nw(rho);
    EXPECT_NEAR(g.cross_sum, target, 1e-6);
    EXPECT_TRUE(g.converged);
    const auto a = cross_sum_from_nw(rho, PhaseSearchConfig{PhaseMode::analytic});
    EXPECT_NEAR(a.cross_sum, target, 1e-12);
  }
}

TEST(PhaseSearch, DifferencedVariant) {
  const auto r0 = thermal(3, 0.1);
  const auto rc = rotate_phases(add_particle_nonlocal(r0, ModeCoefficients::uniform(3)), {0.0, 1.0, -2.0});
  EXPECT_NEAR(cross_difference_from_nw(rc, r0).cross_sum, lhs_difference(rc, r0), 1e-6);
}

TEST(OpticalWitness, UnitGainsReproduceEvaluate) {
  for (int m = 1; m <= 2; ++m) {
    const auto rho = wlike(3, 0.02);
    const auto e = evaluate(rho, m);
    const auto o = optical_witness(exact_counts(rho, SidebandGains{1, 1}), 3, m);
    EXPECT_NEAR(o.lhs, e.lhs, 1e-10);
    EXPECT_NEAR(o.rhs, e.rhs, 1e-10);
    EXPECT_EQ(o.violated, e.violated);
    EXPECT_EQ(o.structure, e.structure);
  }
}

TEST(OpticalWitness, ArbitraryGainsGiveSameRelativeMargin) {
  const auto rho = wlike(3, 0.02);
  const auto e = evaluate(rho, 2);
  const auto o = optical_witness(exact_counts(rho, SidebandGains{2, 0.5}), 3, 2);
  EXPECT_NEAR(o.term("relative_margin"), e.margin / e.term("number_sum"), 1e-10);
  EXPECT_NEAR(o.margin, 0.5 * e.margin, 1e-10);
}

TEST(OpticalWitness, GainIndependence) {
  const auto rho = wlike(3, 0.02);
  const auto counts = exact_counts(rho, SidebandGains{2, 0.5});
  const auto ref = optical_witness(counts, 3, 2);
  for (double f : {0.1, 1.0, 7.3, 100.0}) {
    const auto r = optical_witness(rescale_anti_stokes(counts, f), 3, 2);
    EXPECT_EQ(r.violated, ref.violated);
    EXPECT_LE(std::abs(r.term("relative_margin") - ref.term("relative_margin")),
              1e-12 * std::abs(ref.term("relative_margin")));
    EXPECT_LE(std::abs(r.margin / f - ref.margin), 1e-12 * std::abs(ref.margin));
  }
}

TEST(OpticalWitness, ThermalNotViolatedAndMissingCounts) {
  const auto counts = exact_counts(thermal(3, 0.1), SidebandGains{1.5, 0.7});
  EXPECT_FALSE(optical_witness(counts, 3, 2).violated);
  auto partial = counts;
  partial.erase("AS:1,3");
  partial.erase("AS:W");
  try {
    optical_witness(partial, 3, 2);
    FAIL() << "expected MissingCountsError";
  } catch (const MissingCountsError& e) {
    EXPECT_NE(std::string(e.what()).find("AS:1,3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("AS:W"), std::string::npos);
  }
}

TEST(GainCalibration, RecoversThermalGains) {
  const double n = 0.3;
  const auto c = exact_counts(thermal(2, n), SidebandGains{2, 1});
  const auto g = gain_calibrate(c.at("S:1"), c.at("AS:1"), 0.5, std::make_pair(c.at("S:2"), c.at("AS:2")));
  EXPECT_NEAR(g.gains.g_s_sq, 2.0, 1e-10);
  EXPECT_NEAR(g.gains.g_as_sq, 1.0, 1e-10);
  EXPECT_FALSE(g.flagged);
}

TEST(GainCalibration, GroundState) {
  const auto c = exact_counts(build_thermal(SystemSpec::bosonic(1, 2), 0.0), SidebandGains{3.5, 1.25});
  EXPECT_EQ(c.at("AS:1"), 0.0);
  const auto g = gain_calibrate(c.at("S:1"), c.at("AS:1"), 1.25 / 3.5);
  EXPECT_DOUBLE_EQ(g.gains.g_s_sq, c.at("S:1"));
  EXPECT_NEAR(g.gains.g_as_sq, 1.25, 1e-12);
}

TEST(GainCalibration, MisSpecifiedLambda) {
  // calibration mode n = 0.3, check mode with a different occupation
  const double s1 = 2 * 1.3, as1 = 0.3, s2 = 2 * 1.8, as2 = 0.8;
  const auto ok = gain_calibrate(s1, as1, 0.5, std::make_pair(s2, as2));
  EXPECT_FALSE(ok.flagged);
  const auto bad = gain_calibrate(s1, as1, 1.0, std::make_pair(s2, as2));
  EXPECT_TRUE(bad.flagged);
  EXPECT_GT(std::abs(*bad.commutator_residual), 1e-3);
  EXPECT_THROW(gain_calibrate(1.0, 5.0, 1.0), CalibrationError);
  EXPECT_THROW(gain_calibrate(1.0, 0.1, 0.0), CalibrationError);
}

TEST(Amplitude, UniformAndSplitter) {
  for (double x : amplitude_estimate({0.4, 0.4, 0.4, 0.4})) EXPECT_DOUBLE_EQ(x, 0.25);
  const auto c = coefficients_from_network(OpticalNetwork(2, {BeamSplitter{0.7, 1, 2}}));
  const double n = 0.2;
  // single-mode-enabled thermal counts on output 1: |c_i|^2 n
  const auto a = amplitude_estimate({std::norm(c[0]) * n, std::norm(c[1]) * n});
  EXPECT_NEAR(a[0], 0.7, 1e-14);
  EXPECT_NEAR(a[1], 0.3, 1e-14);
  EXPECT_THROW(amplitude_estimate({0.0, 0.0}), DegenerateProjectionError);
  EXPECT_THROW(amplitude_estimate({1.0, -0.1}), DomainError);
}

TEST(Amplitude, FiniteShots) {
  const auto rho = thermal(2, 0.2);
  const auto n1 = word_matrix(rho.spec(), {raise(1), lower(1)});
  const auto n2 = word_matrix(rho.spec(), {raise(2), lower(2)});
  const auto a = sample_observable(rho, 0.7 * n1, 100000, 17);
  const auto b = sample_observable(rho, 0.3 * n2, 100000, 18);
  const auto est = amplitude_estimate({a.mean, b.mean});
  const double tot = a.mean + b.mean;
  const double se = std::hypot(b.mean * a.std_error, a.mean * b.std_error) / (tot * tot);
  EXPECT_LT(std::abs(est[0] - 0.7), 4 * se);
}

TEST(Sampling, ProjectorLawOfLargeNumbers) {
  const auto rho = thermal(2, 0.2);
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(rho.dimension(), rho.dimension());
  p(0, 0) = 1.0;
  const double exact = rho(0, 0).real();
  const auto e = sample_observable(rho, p, 1000000, 3);
  EXPECT_LT(std::abs(e.mean - exact), 4 * std::sqrt(exact * (1 - exact) / 1e6));
  EXPECT_NEAR(e.std_error, std::sqrt(exact * (1 - exact) / 1e6), 1e-5);
}

TEST(Sampling, NWOnWLike) {
  const auto rho = wlike(3, 0.05);
  const auto nw = collective_number_matrix(rho.spec(), ModeCoefficients::uniform(3).values());
  const double exact = rho.expectation(nw).real();
  const auto e = sample_observable(rho, nw, 100000, 9);
  EXPECT_LT(std::abs(e.mean - exact), 4 * e.std_error);
}

TEST(Sampling, DeterministicObservableAndErrors) {
  const auto rho = thermal(2, 0.2);
  const auto id = Eigen::MatrixXcd::Identity(rho.dimension(), rho.dimension());
  const auto e = sample_observable(rho, id, 1000, 1);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_NEAR(e.mean, 1.0, 1e-12);
  EXPECT_THROW(sample_observable(rho, id, 0, 1), DomainError);
  Eigen::MatrixXcd bad = id;
  bad(0, 1) = 1.0;
  EXPECT_THROW(sample_observable(rho, bad, 10, 1), DomainError);
}

TEST(Sampling, ShotNoiseScaling) {
  const auto rho = thermal(1, 0.5);
  const auto n = word_matrix(rho.spec(), {raise(1), lower(1)});
  const double s3 = sample_observable(rho, n, 1000, 100).std_error;
  const double s4 = sample_observable(rho, n, 10000, 101).std_error;
  const double s5 = sample_observable(rho, n, 100000, 102).std_error;
  EXPECT_NEAR(s3 / s4, std::sqrt(10.0), 0.2 * std::sqrt(10.0));
  EXPECT_NEAR(s4 / s5, std::sqrt(10.0), 0.2 * std::sqrt(10.0));
}

TEST(Sampling, SeedReproducibility) {
  const auto rho = thermal(1, 0.5);
  const auto n = word_matrix(rho.spec(), {raise(1), lower(1)});
  const auto a = sample_observable(rho, n, 5000, 77);
  const auto b = sample_observable(rho, n, 5000, 77);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NE(derive_seed(1, "AS:1"), derive_seed(1, "AS:2"));
}

TEST(MonteCarlo, PureWStateClaimed) {
  McOptions o;
  o.shots = 1000000;
  const auto r = estimate_witness_mc(wlike(3, 0.0), 2, o);
  ASSERT_TRUE(r.report.confidence.has_value());
  EXPECT_TRUE(r.report.confidence->claimed);
  EXPECT_NEAR(r.report.margin, -0.5, 5 * r.report.confidence->margin_stderr);
  EXPECT_EQ(r.records.size(), 1u + 3u + 3u);
}

TEST(MonteCarlo, ThermalNeverClaimed) {
  for (std::int64_t shots : {100, 10000, 1000000}) {
    McOptions o;
    o.shots = shots;
    EXPECT_FALSE(estimate_witness_mc(thermal(3, 0.1), 2, o).report.confidence->claimed) << shots;
  }
}

TEST(MonteCarlo, TenShotsNoClaim) {
  McOptions o;
  o.shots = 10;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    o.seed = seed;
    const auto r = estimate_witness_mc(wlike(3, 0.1), 2, o);
    EXPECT_FALSE(r.report.confidence->claimed) << seed;
  }
}

TEST(MonteCarlo, NonlocalityGroundState) {
  const auto r0 = thermal(3, 0.0);
  const auto u = ModeCoefficients::uniform(3);
  McOptions o;
  o.shots = 100000;
  const auto r = estimate_nonlocality_mc(add_particle_nonlocal(r0, u), r0, 2, u, o);
  EXPECT_TRUE(r.report.confidence->claimed);
  const auto s = thermal_sides_nonloc(3, 2, 0.0, StatisticsKind::bosonic);
  EXPECT_NEAR(r.report.lhs, s.lhs, 5 * r.report.confidence->margin_stderr + 1e-12);
  EXPECT_THROW(estimate_nonlocality_mc(build_thermal(SystemSpec::two_level(3), 0.1),
                                       build_thermal(SystemSpec::two_level(3), 0.1), 2, u, o),
               UnsupportedError);
}

TEST(MonteCarlo, SameSeedSameRecords) {
  McOptions o;
  o.shots = 2000;
  o.seed = 99;
  const auto a = estimate_witness_mc(wlike(2, 0.1), 1, o);
  const auto b = estimate_witness_mc(wlike(2, 0.1), 1, o);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) EXPECT_EQ(a.records[k].sum, b.records[k].sum);
  EXPECT_EQ(a.report.margin, b.report.margin);
}

}  // namespace
}  // namespace wmwit
