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

// End-to-end runs of the wmwit binary.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

using json = nlohmann::json;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + WMWIT_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string sample(const std::string& name) { return std::string("\"") + WMWIT_SAMPLES_DIR + "/" + name + "\""; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_value(const std::string& csv, const std::string& prefix) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return "";
}

TEST(CliTables, MarkdownMatchesGolden) {
  for (const std::string id : {"I", "II", "III"}) {
    const auto r = run("tables " + id + " --format md");
    ASSERT_EQ(r.code, 0) << id;
    EXPECT_EQ(r.out, read_file(std::string(WMWIT_GOLDEN_DIR) + "/table_" + id + ".md")) << id;
  }
}

TEST(CliTables, CsvEntries) {
  const auto t1 = run("tables I");
  ASSERT_EQ(t1.code, 0);
  EXPECT_EQ(csv_value(t1.out, "7,4,").substr(0, 3), "12,");
  const auto t2 = run("tables II");
  EXPECT_EQ(csv_value(t2.out, "2,1,").substr(0, 5), "0.261");
  const auto t3 = run("tables III");
  EXPECT_EQ(csv_value(t3.out, "5,4,").substr(0, 5), "0.088");
  EXPECT_EQ(csv_value(t3.out, "2,1,").substr(0, 5), "1.000");
}

TEST(CliTables, JsonAndByteStable) {
  const auto a = run("tables II --format json");
  const auto b = run("tables II --format json");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = json::parse(a.out);
  EXPECT_EQ(j.size(), 21u);
  EXPECT_EQ(j[0]["N"], 2);
}

TEST(CliFigures, MaxNAtLowOccupation) {
  const auto r = run("figures 5 --nth 0.002 --n-cap 64 --format json");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["nonlocality_bosonic"], 30);
}

TEST(CliFigures, ThresholdCurves) {
  const auto f3 = run("figures 3 --n-max 4 --format json");
  ASSERT_EQ(f3.code, 0);
  const auto j3 = json::parse(f3.out);
  EXPECT_EQ(j3[0]["N"], 2);
  EXPECT_NEAR(j3[0]["bosonic"].get<double>(), 0.261, 1e-3);
  const auto f4 = run("figures 4 --n-max 4 --format json");
  ASSERT_EQ(f4.code, 0);
  EXPECT_NEAR(json::parse(f4.out)[0]["bosonic"].get<double>(), 1.0, 1e-6);
  EXPECT_EQ(run("figures 4 --n-max 4").out, run("figures 4 --n-max 4").out);
}

TEST(CliWitness, GroundWState) {
  const auto r = run("witness " + sample("w3_ground.json") + " -M 2");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["violated"].get<bool>());
  EXPECT_NEAR(j["margin"].get<double>(), -0.5, 1e-9);
  EXPECT_EQ(j["mode"], "exact");
}

TEST(CliWitness, ThermalNotViolated) {
  const auto r = run("witness " + sample("thermal3.json") + " -M 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_FALSE(json::parse(r.out)["violated"].get<bool>());
}

TEST(CliWitness, OpticalMatchesExact) {
  const auto e = json::parse(run("witness " + sample("wlike3_thermal.json") + " -M 2").out);
  const auto o = json::parse(run("witness " + sample("wlike3_thermal.json") + " -M 2 --mode optical").out);
  EXPECT_NEAR(o["margin"].get<double>(), e["margin"].get<double>(), 1e-9);
  EXPECT_EQ(o["violated"], e["violated"]);
  const auto g = json::parse(run("witness " + sample("wlike3_thermal.json") + " -M 2 --mode optical --gas2 7.3").out);
  EXPECT_NEAR(g["terms"]["relative_margin"].get<double>(), o["terms"]["relative_margin"].get<double>(), 1e-12);
  EXPECT_EQ(g["violated"], o["violated"]);
}

TEST(CliWitness, CountFileRoundTrip) {
  const auto o = json::parse(run("witness " + sample("wlike3_thermal.json") + " -M 2 --mode optical").out);
  const auto path = (std::filesystem::temp_directory_path() / "wmwit_cli_counts.json").string();
  std::ofstream(path) << json{{"counts", o["counts"]}}.dump();
  const auto c = run("witness --counts \"" + path + "\" -N 3 -M 2");
  ASSERT_EQ(c.code, 0);
  EXPECT_NEAR(json::parse(c.out)["margin"].get<double>(), o["margin"].get<double>(), 1e-12);
  std::remove(path.c_str());
}

TEST(CliWitness, MonteCarloRecords) {
  const auto path = (std::filesystem::temp_directory_path() / "wmwit_cli_records.json").string();
  const auto r = run("witness " + sample("w3_ground.json") + " -M 2 --mode mc --shots 100000 --seed 7 --records \"" +
                     path + "\"");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["confidence"]["violation_claimed"].get<bool>());
  const auto rec = json::parse(read_file(path));
  EXPECT_EQ(rec["records"].size(), 7u);
  EXPECT_EQ(rec["records"][0]["shots"], 100000);
  EXPECT_EQ(run("witness " + sample("w3_ground.json") + " -M 2 --mode mc --shots 1000 --seed 7").out,
            run("witness " + sample("w3_ground.json") + " -M 2 --mode mc --shots 1000 --seed 7").out);
  std::remove(path.c_str());
}

TEST(CliNonlocality, BellThermal) {
  const auto r = run("nonlocality " + sample("bell_thermal.json") + " -M 1");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["violated"].get<bool>());
  EXPECT_EQ(j["argmax_structure"], "[1][2]");
  // same preparation at n_th = 1.2
  const auto path = (std::filesystem::temp_directory_path() / "wmwit_cli_bell12.json").string();
  std::ofstream(path) << R"({"n_modes": 2, "kind": "bosonic", "n_th": 1.2, "preparation": "nonlocal_add"})";
  const auto hot = run("nonlocality \"" + path + "\" -M 1");
  ASSERT_EQ(hot.code, 0);
  EXPECT_FALSE(json::parse(hot.out)["violated"].get<bool>());
  std::remove(path.c_str());
}

TEST(CliNonlocality, SemilocalNeverViolates) {
  const auto r = run("nonlocality " + sample("semilocal3.json") + " -M 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_FALSE(json::parse(r.out)["violated"].get<bool>());
  const auto c = run("mc --campaign semilocal -N 3 -M 2 --nth 0.1 --count 100 --seed 3");
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(json::parse(c.out)["violations"], 0);
}

TEST(CliNonlocality, NeedsPreparation) {
  EXPECT_EQ(run("nonlocality " + sample("thermal3.json") + " -M 2").code, 1);
  const auto two = run("nonlocality " + sample("thermal3.json") + " " + sample("wlike3_thermal.json") + " -M 2");
  EXPECT_EQ(two.code, 0);
}

TEST(CliStructures, Listings) {
  const auto a = json::parse(run("structures 6 3 --format json").out);
  EXPECT_EQ(a["n_sep_max"], 12);
  ASSERT_EQ(a["signatures"].size(), 2u);
  const auto b = json::parse(run("structures 3 2 --format json").out);
  ASSERT_EQ(b["signatures"].size(), 1u);
  EXPECT_EQ(b["signatures"][0]["signature"], "{2,1}");
  const auto c = json::parse(run("structures 4 1 --format json").out);
  EXPECT_EQ(c["signatures"][0]["n_sep"], 6);
  const auto md = run("structures 6 3");
  EXPECT_NE(md.out.find("| {2,2,2} | 12 | * |"), std::string::npos) << md.out;
}

TEST(CliCampaign, EntanglementSoundness) {
  const auto r = run("mc --campaign entanglement -N 3 -M 2 --kind two_level --count 100 --seed 5");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["violations"], 0);
  EXPECT_EQ(j["states"], 100);
}

TEST(CliExitCodes, Mapping) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("tables IV").code, 1);
  EXPECT_EQ(run("witness " + sample("w3_ground.json") + " -M 3").code, 1);
  EXPECT_EQ(run("structures 20 3").code, 2);
  EXPECT_EQ(run("structures 8 3 --cap 6").code, 2);
  EXPECT_EQ(run("witness /nonexistent/file.json -M 1").code, 3);
  const auto path = (std::filesystem::temp_directory_path() / "wmwit_cli_bad.json").string();
  std::ofstream(path) << R"({"n_modes": 2, "kind": "fermion", "n_th": 0.1})";
  EXPECT_EQ(run("witness \"" + path + "\" -M 1").code, 3);
  std::remove(path.c_str());
  EXPECT_EQ(run("--help").code, 0);
}

TEST(CliOutput, OutFlagWritesFile) {
  const auto path = (std::filesystem::temp_directory_path() / "wmwit_cli_out.md").string();
  const auto r = run("tables I --format md --out \"" + path + "\"");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(read_file(path), read_file(std::string(WMWIT_GOLDEN_DIR) + "/table_I.md"));
  std::remove(path.c_str());
}

}  // namespace
