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

#include <cstdio>
#include <filesystem>

#include "wmwit/io.hpp"

namespace wmwit {
namespace {

std::string schema_message(const std::string& text) {
  try {
    parse_state(text);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

TEST(StateFile, ThermalWithPreparation) {
  const auto st = parse_state(R"({"n_modes": 3, "kind": "bosonic", "n_th": 0.02, "preparation": "nonlocal_add"})");
  EXPECT_EQ(st.spec.n_modes, 3);
  EXPECT_EQ(st.spec.cutoff, adaptive_cutoff(0.02));
  EXPECT_EQ(st.preparation.to_string(), "nonlocal_add");
  ASSERT_TRUE(st.prepared.has_value());
  EXPECT_EQ(st.prepared->spec().cutoff, st.spec.cutoff + 1);
  EXPECT_NEAR(lhs_difference(*st.prepared, *st.initial), 1.02, 1e-8);
  EXPECT_FALSE(st.notes.empty());
}

TEST(StateFile, ExplicitCutoffAndCoefficients) {
  const auto st = parse_state(R"({
    "n_modes": 2, "kind": "bosonic", "n_th": 0.1, "cutoff": 6,
    "coefficients": [{"re": 1, "im": 0}, [0, 1]],
    "preparation": "nonlocal_add"
  })");
  EXPECT_EQ(st.spec.cutoff, 6);
  EXPECT_TRUE(st.coeffs.is_normalized());
  EXPECT_NEAR(std::abs(st.coeffs[1] - cplx(0, 1 / std::sqrt(2.0))), 0.0, 1e-15);
  EXPECT_EQ(st.notes, std::vector<std::string>{"coefficients were normalized"});
}

TEST(StateFile, SemilocalAndTwoLevel) {
  const auto s = parse_state(R"({"n_modes": 3, "kind": "bosonic", "n_th": 0.1,
                                 "preparation": {"semilocal_add": [[3], [1, 2]]}})");
  EXPECT_EQ(s.preparation.to_string(), "semilocal_add [3][1 2]");
  EXPECT_TRUE(s.prepared.has_value());
  const auto q = parse_state(R"({"n_modes": 3, "kind": "two_level", "n_th": 0.2, "preparation": "nonlocal_add"})");
  EXPECT_TRUE(q.spec.is_two_level());
  EXPECT_EQ(q.prepared->dimension(), 8u);
}

TEST(StateFile, ExplicitEntries) {
  // |0><0| on a single mode with cutoff 2
  const auto st = parse_state(R"({"n_modes": 1, "kind": "bosonic", "cutoff": 2,
                                  "entries": [1, 0, 0, [0, 0]]})");
  EXPECT_TRUE(st.explicit_entries);
  EXPECT_EQ((*st.initial)(0, 0), cplx(1.0));
  EXPECT_NE(schema_message(R"({"n_modes": 1, "kind": "bosonic", "cutoff": 2, "entries": [0.5, 0, 0, 0]})")
                .find("'entries'"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"n_modes": 1, "kind": "bosonic", "entries": [1, 0, 0, 0]})").find("'cutoff'"),
            std::string::npos);
}

TEST(StateFile, SchemaErrorsNameFieldAndLine) {
  const std::string bad_kind = "{\n  \"n_modes\": 2,\n  \"kind\": \"fermion\",\n  \"n_th\": 0.1\n}";
  const auto m = schema_message(bad_kind);
  EXPECT_NE(m.find("'kind'"), std::string::npos) << m;
  EXPECT_NE(m.find("line 3"), std::string::npos) << m;

  EXPECT_NE(schema_message(R"({"kind": "bosonic", "n_th": 0.1})").find("'n_modes'"), std::string::npos);
  EXPECT_NE(schema_message(R"({"n_modes": 2.5, "kind": "bosonic", "n_th": 0.1})").find("integer"), std::string::npos);
  EXPECT_NE(schema_message(R"({"n_modes": 2, "kind": "bosonic"})").find("'n_th'"), std::string::npos);
  EXPECT_NE(schema_message(R"({"n_modes": 2, "kind": "bosonic", "n_th": -1})").find("'n_th'"), std::string::npos);
  EXPECT_NE(schema_message(R"({"n_modes": 2, "kind": "two_level", "n_th": 1.5})").find("'n_th'"), std::string::npos);
  EXPECT_NE(schema_message(R"({"n_modes": 2, "kind": "bosonic", "n_th": 0.1, "cutoff": 1})").find("'cutoff'"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"n_modes": 2, "kind": "bosonic", "n_th": 0.1, "coefficients": [1]})")
                .find("'coefficients'"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"n_modes": 2, "kind": "bosonic", "n_th": 0.1, "coefficients": [0, 0]})")
                .find("'coefficients'"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"n_modes": 2, "kind": "bosonic", "n_th": 0.1, "preparation": "teleport"})")
                .find("'preparation'"),
            std::string::npos);
  EXPECT_NE(schema_message(R"({"n_modes": 2, "kind": "bosonic", "n_th": 0.1,
                               "preparation": {"semilocal_add": [[1, 2], [2]]}})")
                .find("'semilocal_add'"),
            std::string::npos);
  const auto malformed = schema_message("{\n\"n_modes\": 2,\n\"kind\": \n}");
  EXPECT_NE(malformed.find("malformed JSON at line"), std::string::npos) << malformed;
  EXPECT_FALSE(schema_message("[1, 2]").empty());
}

TEST(StateFile, MissingFileIsIoError) { EXPECT_THROW(load_state("/nonexistent/dir/state.json"), IoError); }

TEST(Counts, PlainAndRecords) {
  const auto c = parse_counts(R"({"counts": {"AS:W": 1.5, "AS:1": 0.25}})");
  EXPECT_EQ(c.at("AS:W"), 1.5);
  EXPECT_EQ(c.size(), 2u);
  const auto r = parse_counts(R"({"records": [{"id": "AS:1", "shots": 4, "sum": 2, "sum_sq": 2, "seed": 1}]})");
  EXPECT_DOUBLE_EQ(r.at("AS:1"), 0.5);
  EXPECT_THROW(parse_counts(R"({"counts": {"AS:W": "x"}})"), SchemaError);
  EXPECT_THROW(parse_counts(R"({"records": [{"id": "AS:1", "shots": 0, "sum": 0}]})"), SchemaError);
  EXPECT_THROW(parse_counts(R"({"other": 1})"), SchemaError);
  EXPECT_THROW(parse_counts("{"), SchemaError);
}

TEST(Counts, RecordsRoundTrip) {
  std::vector<CountRecord> recs{{"AS:1", 10, 3.0, 5.0, 42}, {"AS:2", 10, 1.0, 1.0, 43}};
  const json j = {{"records", records_to_json(recs)}};
  const auto c = parse_counts(j.dump());
  EXPECT_DOUBLE_EQ(c.at("AS:1"), 0.3);
  EXPECT_DOUBLE_EQ(c.at("AS:2"), 0.1);
}

TEST(Network, ParseTripartite) {
  const auto net = parse_network(R"({"n_modes": 3, "elements": [
      {"type": "beam_splitter", "r": 0.5, "modes": [2, 3]},
      {"type": "beam_splitter", "r": 0.3333333333333333, "modes": [1, 2]},
      {"type": "phase", "phi": 0.0, "mode": 1}]})");
  const auto c = coefficients_from_network(net);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(c[i]), 1 / std::sqrt(3.0), 1e-12);
  EXPECT_THROW(parse_network(R"({"n_modes": 2, "elements": [{"type": "mirror"}]})"), SchemaError);
  EXPECT_THROW(parse_network(R"({"n_modes": 2, "elements": [{"type": "beam_splitter", "r": 0.5, "modes": ["a", 2]}]})"),
               SchemaError);
  EXPECT_THROW(parse_network(R"({"n_modes": 2})"), SchemaError);
}

TEST(Writers, ReportJson) {
  WitnessReport r;
  r.witness = "nonlocality";
  r.n_modes = 3;
  r.max_entangled = 2;
  r.lhs = 1.0;
  r.rhs = 0.5;
  r.structure = "[1 2][3]";
  r.per_block = {{"[1 2]", 2.0 / 3, 0.5}, {"[3]", 1.0 / 3, 0.0}};
  r.terms = {{"cross_difference_sum", 1.0}};
  r.finalize();
  const json j = report_to_json(r);
  EXPECT_EQ(j["witness"], "nonlocality");
  EXPECT_EQ(j["margin"], -0.5);
  EXPECT_EQ(j["violated"], true);
  EXPECT_EQ(j["argmax_structure"], "[1 2][3]");
  EXPECT_EQ(j["per_block"].size(), 2u);
  EXPECT_EQ(j["terms"]["cross_difference_sum"], 1.0);
  EXPECT_FALSE(j.contains("confidence"));
  // key order is stable
  EXPECT_EQ(j.begin().key(), "witness");
  EXPECT_EQ(report_to_json(r).dump(), j.dump());
}

TEST(Writers, DensityJson) {
  const auto rho = build_thermal(SystemSpec::bosonic(2, 2), 0.5);
  const json j = density_to_json(rho);
  EXPECT_EQ(j["cutoff"], 2);
  ASSERT_EQ(j["entries"].size(), 16u);
  EXPECT_NEAR(j["entries"][0][0].get<double>(), rho(0, 0).real(), 0.0);
  // feed back through the explicit-entries path
  json s = {{"n_modes", 2}, {"kind", "bosonic"}, {"cutoff", 2}, {"entries", j["entries"]}};
  const auto st = parse_state(s.dump());
  EXPECT_LT((st.initial->matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Files, WriteAndReadBack) {
  const auto path = (std::filesystem::temp_directory_path() / "wmwit_io_test.json").string();
  write_text_file(path, R"({"n_modes": 2, "kind": "bosonic", "n_th": 0.5})");
  const auto st = load_state(path);
  EXPECT_EQ(st.spec.n_modes, 2);
  std::remove(path.c_str());
  EXPECT_THROW(write_text_file("/nonexistent/dir/out.json", "x"), IoError);
}

}  // namespace
}  // namespace wmwit
