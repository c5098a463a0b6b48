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

// wmwit command-line front end.
//
// Exit codes: 0 ran, 1 usage or invalid request, 2 refused (size caps),
// 3 I/O or malformed input file.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wmwit/io.hpp"
#include "wmwit/wmwit.hpp"

namespace {

using namespace wmwit;

struct Globals {
  double cutoff_tail = kDefaultTailTolerance;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::int64_t shots = 1000000;
  std::string out;
  std::string format;
};

enum class Format { csv, md, json };

Format resolve_format(const Globals& g, Format fallback) {
  if (g.format.empty()) return fallback;
  if (g.format == "csv") return Format::csv;
  if (g.format == "md") return Format::md;
  return Format::json;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(g.out, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ------------------------------------------------------------------ tables

std::string render_table(TableId id, const std::vector<TableCell>& cells, Format f) {
  if (f == Format::csv) return table_csv(id, cells);
  if (f == Format::md) return table_markdown(id, cells);
  json a = json::array();
  for (const auto& c : cells) {
    json e{{"N", c.n_modes}, {"M", c.max_entangled}};
    if (id == TableId::separable_pairs) {
      e["n_sep_max"] = static_cast<long long>(c.value);
      e["argmax"] = c.note;
    } else if (c.found) {
      e["threshold"] = c.value;
    } else {
      e["threshold"] = nullptr;
    }
    a.push_back(std::move(e));
  }
  return dump(a);
}

std::string render_curve(const std::vector<CurvePoint>& pts, Format f) {
  if (f == Format::csv) return curve_csv(pts);
  if (f == Format::md) return curve_markdown(pts);
  auto v = [](const ThresholdResult& t) { return t.found ? json(t.value) : json(nullptr); };
  json a = json::array();
  for (const auto& p : pts) a.push_back({{"N", p.n_modes}, {"bosonic", v(p.bosonic)}, {"two_level", v(p.two_level)}});
  return dump(a);
}

std::string render_max_n(const std::vector<MaxNRow>& rows, Format f) {
  if (f == Format::csv) return max_n_csv(rows);
  if (f == Format::md) return max_n_markdown(rows);
  json a = json::array();
  for (const auto& r : rows)
    a.push_back({{"n_th", r.n_th},
                 {"entanglement_bosonic", r.entanglement_bosonic},
                 {"entanglement_two_level", r.entanglement_two_level},
                 {"nonlocality_bosonic", r.nonlocality_bosonic},
                 {"nonlocality_two_level", r.nonlocality_two_level}});
  return dump(a);
}

// ---------------------------------------------------------------- reports

std::string render_report(const WitnessReport& r, Format f, const json& extra = json::object()) {
  if (f == Format::json) {
    json j = report_to_json(r);
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return dump(j);
  }
  std::vector<std::pair<std::string, std::string>> rows{{"witness", r.witness},
                                                        {"N", std::to_string(r.n_modes)},
                                                        {"M", std::to_string(r.max_entangled)},
                                                        {"lhs", fixed(r.lhs, 10)},
                                                        {"rhs", fixed(r.rhs, 10)},
                                                        {"margin", fixed(r.margin, 10)},
                                                        {"violated", r.violated ? "true" : "false"}};
  for (const auto& t : r.terms) rows.emplace_back(t.name, fixed(t.value, 10));
  if (!r.structure.empty()) rows.emplace_back("structure", r.structure);
  for (const auto& b : r.per_block) rows.emplace_back("P_C " + b.block, fixed(b.probability, 10));
  for (const auto& b : r.per_block) rows.emplace_back("B_C " + b.block, fixed(b.bound, 10));
  if (r.confidence) {
    rows.emplace_back("margin_stderr", fixed(r.confidence->margin_stderr, 10));
    rows.emplace_back("z", fixed(r.confidence->z, 3));
    rows.emplace_back("violation_claimed", r.confidence->claimed ? "true" : "false");
  }
  for (const auto& w : r.warnings) rows.emplace_back("warning", w);
  std::string s = f == Format::csv ? "key,value\n" : "| key | value |\n|---|---|\n";
  for (const auto& [k, v] : rows) s += f == Format::csv ? k + ",\"" + v + "\"\n" : "| " + k + " | " + v + " |\n";
  return s;
}

json notes_json(const StateFile& st) {
  json n = json::array();
  for (const auto& s : st.notes) n.push_back(s);
  return n;
}

// --------------------------------------------------------------- campaigns

json soundness_campaign(int n, int m, StatisticsKind kind, int cutoff, int states, int terms, std::uint64_t seed) {
  const SystemSpec spec = kind == StatisticsKind::two_level ? SystemSpec::two_level(n) : SystemSpec::bosonic(n, cutoff);
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < states; ++s) {
    const auto rho = random_constrained_state(spec, m, terms, derive_seed(seed, "state" + std::to_string(s)));
    const auto r = evaluate(rho, m);
    if (r.violated) ++violations;
    worst = std::min(worst, r.margin);
  }
  return {{"campaign", "entanglement_soundness"}, {"N", n},           {"M", m},
          {"kind", to_string(kind)},              {"states", states}, {"violations", violations},
          {"min_margin", worst}};
}

json semilocal_campaign(int n, int m, double n_th, double tail, int states, std::uint64_t seed) {
  const auto rho0 = build_thermal_adaptive(n, StatisticsKind::bosonic, n_th, tail);
  const auto structures = enumerate_structures(n, m);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < states; ++s) {
    std::vector<cplx> c(n);
    for (auto& x : c) x = cplx(gauss(rng), gauss(rng));
    const auto coeffs = ModeCoefficients(c).normalized();
    const auto& st = structures[std::uniform_int_distribution<std::size_t>(0, structures.size() - 1)(rng)];
    const auto rho_c = add_particle_semilocal(rho0, st, coeffs);
    const auto r = evaluate_nonlocality(rho_c, rho0, m, coeffs);
    if (r.violated) ++violations;
    worst = std::min(worst, r.margin);
  }
  return {{"campaign", "nonlocality_soundness"}, {"N", n},           {"M", m},
          {"n_th", n_th},                        {"states", states}, {"violations", violations},
          {"min_margin", worst}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wmwit: multipartite entanglement and nonlocality witnesses for W-like states"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--cutoff-tail", g.cutoff_tail, "Single-mode thermal tail mass that fixes the automatic cutoff")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "Root-finding tolerance for thresholds")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Master seed for sampling");
  app.add_option("--shots", g.shots, "Shots per observable (Monte Carlo)")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path (default: stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "md", "json"}));

  // tables
  auto* tables = app.add_subcommand("tables", "Separable-pair and threshold tables");
  std::string table_id;
  int table_n_max = 7;
  tables->add_option("which", table_id, "I, II or III")->required()->check(CLI::IsMember({"I", "II", "III"}));
  tables->add_option("--n-max", table_n_max, "Largest N row")->check(CLI::Range(2, 64));

  // figures
  auto* figures = app.add_subcommand("figures", "Curve data: thresholds versus N, largest N versus n_th");
  std::string figure_id;
  int fig_n_max = 10, fig_n_cap = kDefaultMaxNCap;
  std::vector<double> fig_grid;
  figures->add_option("which", figure_id, "3, 4 or 5")->required()->check(CLI::IsMember({"3", "4", "5"}));
  figures->add_option("--n-max", fig_n_max, "Largest N for threshold curves")->check(CLI::Range(2, 256));
  figures->add_option("--n-cap", fig_n_cap, "Largest N searched for the max-N curves")->check(CLI::Range(2, 512));
  figures->add_option("--nth", fig_grid, "Occupations for the max-N curves (default: log grid + platforms)");

  // witness
  auto* witness = app.add_subcommand("witness", "Entanglement witness on a state file or count file");
  std::string w_state, w_counts, w_records;
  int w_m = 0, w_n = 0;
  std::string w_mode = "exact";
  double w_gs = 1.0, w_gas = 1.0, w_z = 3.0;
  witness->add_option("state", w_state, "State file (JSON)");
  witness->add_option("-M,--max-entangled", w_m, "Largest number of simultaneously entangled modes allowed")
      ->required();
  witness->add_option("--mode", w_mode, "exact, optical or mc")->check(CLI::IsMember({"exact", "optical", "mc"}));
  witness->add_option("--counts", w_counts, "Count file for optical mode (replaces the state file)");
  witness->add_option("-N,--n-modes", w_n, "Mode count when evaluating a count file");
  witness->add_option("--gs2", w_gs, "Stokes gain G_S^2 for generated counts")->check(CLI::PositiveNumber);
  witness->add_option("--gas2", w_gas, "Anti-Stokes gain G_AS^2 for generated counts")->check(CLI::PositiveNumber);
  witness->add_option("--z", w_z, "z-score for claiming a violation (mc)")->check(CLI::PositiveNumber);
  witness->add_option("--records", w_records, "Write sampled count records here (mc)");

  // nonlocality
  auto* nonloc = app.add_subcommand("nonlocality", "Nonlocal back-action witness");
  std::vector<std::string> n_states;
  int n_m = 0;
  std::string n_mode = "exact", n_records;
  double n_z = 3.0;
  nonloc->add_option("states", n_states, "One prepared state file, or the initial file then the conditioned file")
      ->required()
      ->expected(1, 2);
  nonloc->add_option("-M,--max-entangled", n_m, "Largest block size of the semilocal model")->required();
  nonloc->add_option("--mode", n_mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  nonloc->add_option("--z", n_z, "z-score for claiming a violation (mc)")->check(CLI::PositiveNumber);
  nonloc->add_option("--records", n_records, "Write sampled count records here (mc)");

  // structures
  auto* structs = app.add_subcommand("structures", "Irreducible class signatures and separable-pair counts");
  int s_n = 0, s_m = 0, s_cap = kDefaultEnumerationCap;
  structs->add_option("N", s_n, "Number of modes")->required()->check(CLI::PositiveNumber);
  structs->add_option("M", s_m, "Largest block size")->required()->check(CLI::PositiveNumber);
  structs->add_option("--cap", s_cap, "Refuse N above this");

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo witness estimates and soundness campaigns");
  std::vector<std::string> mc_states;
  int mc_m = 0, mc_n = 3, mc_count = 1000, mc_terms = 20, mc_cutoff = 4;
  std::string mc_witness = "entanglement", mc_campaign, mc_records, mc_kind = "two_level";
  double mc_z = 3.0, mc_nth = 0.1;
  mc->add_option("states", mc_states, "State file(s), as for witness / nonlocality")->expected(0, 2);
  mc->add_option("-M,--max-entangled", mc_m, "M")->required();
  mc->add_option("--witness", mc_witness, "entanglement or nonlocality")
      ->check(CLI::IsMember({"entanglement", "nonlocality"}));
  mc->add_option("--z", mc_z, "z-score for claiming a violation")->check(CLI::PositiveNumber);
  mc->add_option("--records", mc_records, "Write sampled count records here");
  mc->add_option("--campaign", mc_campaign, "Run a soundness campaign instead: entanglement or semilocal")
      ->check(CLI::IsMember({"entanglement", "semilocal"}));
  mc->add_option("-N,--n-modes", mc_n, "Campaign mode count")->check(CLI::Range(2, 12));
  mc->add_option("--kind", mc_kind, "Campaign statistics kind")->check(CLI::IsMember({"bosonic", "two_level"}));
  mc->add_option("--cutoff", mc_cutoff, "Campaign bosonic cutoff")->check(CLI::Range(2, 64));
  mc->add_option("--count", mc_count, "Number of campaign states")->check(CLI::PositiveNumber);
  mc->add_option("--terms", mc_terms, "Mixture terms per campaign state")->check(CLI::PositiveNumber);
  mc->add_option("--nth", mc_nth, "Campaign thermal occupation (semilocal)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto load = [&](const std::string& path) { return load_state(path, g.cutoff_tail); };
  auto mc_options = [&](double z) {
    McOptions o;
    o.shots = g.shots;
    o.seed = g.seed;
    o.z = z;
    return o;
  };
  // rho0 and rho_c for the nonlocality witness
  struct Pair {
    DensityOperator rho0, rho_c;
    ModeCoefficients coeffs;
    json notes;
  };
  auto load_pair = [&](const std::vector<std::string>& files) -> Pair {
    if (files.size() == 1) {
      auto st = load(files[0]);
      if (st.preparation.kind == Preparation::Kind::none)
        throw DomainError(files[0] + ": a single state file needs a preparation step (nonlocal_add or semilocal_add)");
      return {*st.initial, *st.prepared, st.coeffs, notes_json(st)};
    }
    auto a = load(files[0]);
    auto b = load(files[1]);
    json notes = notes_json(a);
    for (const auto& n : notes_json(b)) notes.push_back(n);
    return {*a.prepared, *b.prepared, b.coeffs, notes};
  };

  try {
    if (*tables) {
      const auto id = parse_table_id(table_id);
      emit(g, render_table(id, compute_table(id, table_n_max, g.tol), resolve_format(g, Format::csv)));
    } else if (*figures) {
      const auto id = parse_figure_id(figure_id);
      const auto f = resolve_format(g, Format::csv);
      if (id == FigureId::max_n)
        emit(g, render_max_n(max_n_curves(fig_grid.empty() ? default_occupation_grid() : fig_grid, fig_n_cap, g.tol), f));
      else
        emit(g, render_curve(threshold_curve(id == FigureId::nonlocality_curves, 2, fig_n_max, g.tol), f));
    } else if (*witness) {
      const auto f = resolve_format(g, Format::json);
      if (!w_counts.empty()) {
        if (w_n < 2) throw DomainError("--counts needs -N (mode count)");
        const auto counts = parse_counts(read_text_file(w_counts), w_counts);
        emit(g, render_report(optical_witness(counts, w_n, w_m), f, {{"mode", "optical"}}));
      } else {
        if (w_state.empty()) throw DomainError("witness needs a state file or --counts");
        const auto st = load(w_state);
        const auto& rho = *st.prepared;
        json extra{{"mode", w_mode}, {"notes", notes_json(st)}};
        if (w_mode == "exact") {
          emit(g, render_report(evaluate(rho, w_m), f, extra));
        } else if (w_mode == "optical") {
          const SidebandGains gains{w_gs, w_gas};
          const auto counts = exact_counts(rho, gains);
          json cj = json::object();
          for (const auto& [k, v] : counts) cj[k] = v;
          extra["gains"] = {{"g_s_sq", w_gs}, {"g_as_sq", w_gas}};
          extra["counts"] = cj;
          auto r = optical_witness(counts, rho.n_modes(), w_m);
          r.warnings = rho.diagnostics().warnings;
          emit(g, render_report(r, f, extra));
        } else {
          auto res = estimate_witness_mc(rho, w_m, mc_options(w_z));
          if (!w_records.empty()) write_text_file(w_records, dump(json{{"records", records_to_json(res.records)}}));
          emit(g, render_report(res.report, f, extra));
        }
      }
    } else if (*nonloc) {
      const auto f = resolve_format(g, Format::json);
      const auto p = load_pair(n_states);
      json extra{{"mode", n_mode}, {"notes", p.notes}};
      if (n_mode == "exact") {
        emit(g, render_report(evaluate_nonlocality(p.rho_c, p.rho0, n_m, p.coeffs), f, extra));
      } else {
        auto res = estimate_nonlocality_mc(p.rho_c, p.rho0, n_m, p.coeffs, mc_options(n_z));
        if (!n_records.empty()) write_text_file(n_records, dump(json{{"records", records_to_json(res.records)}}));
        emit(g, render_report(res.report, f, extra));
      }
    } else if (*structs) {
      if (s_n > s_cap)
        throw LimitError("N = " + std::to_string(s_n) + " exceeds the enumeration cap " + std::to_string(s_cap));
      const auto sigs = irreducible_signatures(s_n, s_m);
      const auto best = n_sep_max(s_n, s_m);
      const auto f = resolve_format(g, Format::md);
      std::string s;
      if (f == Format::json) {
        json a = json::array();
        for (const auto& sig : sigs)
          a.push_back({{"signature", sig.to_string()}, {"n_sep", n_sep(sig)}, {"max", sig == best.argmax}});
        s = dump(json{{"N", s_n}, {"M", s_m}, {"n_sep_max", best.value}, {"signatures", a}});
      } else if (f == Format::csv) {
        s = "signature,n_sep,max\n";
        for (const auto& sig : sigs)
          s += "\"" + sig.to_string() + "\"," + std::to_string(n_sep(sig)) + "," + (sig == best.argmax ? "1" : "0") +
               "\n";
      } else {
        s = "| signature | n_sep | max |\n|---|---:|:---:|\n";
        for (const auto& sig : sigs)
          s += "| " + sig.to_string() + " | " + std::to_string(n_sep(sig)) + " | " + (sig == best.argmax ? "*" : "") +
               " |\n";
      }
      emit(g, s);
    } else if (*mc) {
      if (!mc_campaign.empty()) {
        json r = mc_campaign == "entanglement"
                     ? soundness_campaign(mc_n, mc_m, parse_kind(mc_kind), mc_cutoff, mc_count, mc_terms, g.seed)
                     : semilocal_campaign(mc_n, mc_m, mc_nth, g.cutoff_tail, mc_count, g.seed);
        emit(g, dump(r));
        return 0;
      }
      if (mc_states.empty()) throw DomainError("mc needs state file(s) or --campaign");
      const auto f = resolve_format(g, Format::json);
      McResult res;
      json extra{{"mode", "mc"}};
      if (mc_witness == "entanglement") {
        if (mc_states.size() != 1) throw DomainError("the entanglement estimate takes one state file");
        const auto st = load(mc_states[0]);
        extra["notes"] = notes_json(st);
        res = estimate_witness_mc(*st.prepared, mc_m, mc_options(mc_z));
      } else {
        const auto p = load_pair(mc_states);
        extra["notes"] = p.notes;
        res = estimate_nonlocality_mc(p.rho_c, p.rho0, mc_m, p.coeffs, mc_options(mc_z));
      }
      if (!mc_records.empty()) write_text_file(mc_records, dump(json{{"records", records_to_json(res.records)}}));
      emit(g, render_report(res.report, f, extra));
    }
  } catch (const LimitError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
