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

// JSON formats: state specifications, dense operator export, witness
// reports, count records and optical network descriptions.
//
// State file:
//   { "n_modes": 3, "kind": "bosonic" | "two_level", "cutoff": 8,
//     "n_th": 0.1, "coefficients": [{"re": .., "im": ..}, ...],
//     "preparation": "none" | "nonlocal_add" | {"semilocal_add": [[1,2],[3]]} }
// "cutoff" may be omitted for bosonic states (chosen from the tail tolerance).
// "coefficients" defaults to uniform. An "entries" array of [re, im] pairs in
// basis order replaces n_th/preparation with an explicit operator.

#pragma once

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wmwit/hilbert.hpp"
#include "wmwit/photostat.hpp"
#include "wmwit/report.hpp"
#include "wmwit/states.hpp"

namespace wmwit {

using json = nlohmann::ordered_json;

class IoError : public Error {
 public:
  using Error::Error;
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

/// Line of the first occurrence of "key", or 0.
inline int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

[[noreturn]] inline void schema_fail(const std::string& text, const std::string& field, const std::string& what) {
  std::ostringstream os;
  os << "field '" << field << "'";
  if (const int line = line_of_key(text, field)) os << " (line " << line << ")";
  os << ": " << what;
  throw SchemaError(os.str());
}

inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << source << ": malformed JSON at line " << line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0) << ": " << e.what();
    throw SchemaError(os.str());
  }
}

inline cplx parse_complex(const std::string& text, const std::string& field, const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  if (v.is_object() && v.contains("re") && v["re"].is_number()) {
    const double im = v.contains("im") ? (v["im"].is_number() ? v["im"].get<double>() : std::nan("")) : 0.0;
    if (std::isnan(im)) schema_fail(text, field, "'im' must be a number");
    return {v["re"].get<double>(), im};
  }
  schema_fail(text, field, "expected a complex number as {\"re\", \"im\"}, [re, im] or a real number");
}

inline int require_int(const std::string& text, const json& j, const std::string& key) {
  if (!j.contains(key)) schema_fail(text, key, "missing required field");
  if (!j[key].is_number_integer()) schema_fail(text, key, "must be an integer");
  return j[key].get<int>();
}

}  // namespace detail

struct Preparation {
  enum class Kind { none, nonlocal_add, semilocal_add } kind = Kind::none;
  std::vector<std::vector<int>> blocks;

  std::string to_string() const {
    if (kind == Kind::none) return "none";
    if (kind == Kind::nonlocal_add) return "nonlocal_add";
    std::string s = "semilocal_add ";
    for (const auto& b : blocks) s += Combination(b).to_string();
    return s;
  }
};

struct StateFile {
  SystemSpec spec;
  double n_th = 0.0;
  bool explicit_entries = false;
  ModeCoefficients coeffs;
  Preparation preparation;
  std::vector<std::string> notes;
  std::optional<DensityOperator> initial;   // thermal input (or the explicit operator)
  std::optional<DensityOperator> prepared;  // after the preparation step
};

/// Parses and builds a state file. `tail` sets the automatic cutoff and the
/// truncation warning threshold.
inline StateFile parse_state(const std::string& text, const std::string& source = "state",
                             double tail = kDefaultTailTolerance) {
  const json j = detail::parse_json(text, source);
  if (!j.is_object()) throw SchemaError(source + ": top level must be a JSON object");
  StateFile st;
  const int n = detail::require_int(text, j, "n_modes");
  if (n < 1) detail::schema_fail(text, "n_modes", "must be >= 1");
  if (!j.contains("kind") || !j["kind"].is_string()) detail::schema_fail(text, "kind", "must be \"bosonic\" or \"two_level\"");
  StatisticsKind kind;
  try {
    kind = parse_kind(j["kind"].get<std::string>());
  } catch (const DomainError& e) {
    detail::schema_fail(text, "kind", e.what());
  }
  st.explicit_entries = j.contains("entries");
  if (!st.explicit_entries) {
    if (!j.contains("n_th") || !j["n_th"].is_number()) detail::schema_fail(text, "n_th", "missing or not a number");
    st.n_th = j["n_th"].get<double>();
    if (st.n_th < 0.0 || (kind == StatisticsKind::two_level && st.n_th > 1.0))
      detail::schema_fail(text, "n_th", "outside the allowed range for " + to_string(kind));
  }
  if (kind == StatisticsKind::two_level) {
    if (j.contains("cutoff") && !(j["cutoff"].is_number_integer() && j["cutoff"].get<int>() == 2))
      detail::schema_fail(text, "cutoff", "two_level states have cutoff 2");
    st.spec = SystemSpec::two_level(n);
  } else if (j.contains("cutoff")) {
    const int d = detail::require_int(text, j, "cutoff");
    if (d < 2) detail::schema_fail(text, "cutoff", "must be >= 2");
    st.spec = SystemSpec::bosonic(n, d);
  } else {
    if (st.explicit_entries) detail::schema_fail(text, "cutoff", "required when 'entries' is given");
    st.spec = SystemSpec::bosonic(n, adaptive_cutoff(st.n_th, tail));
    st.notes.push_back("cutoff " + std::to_string(st.spec.cutoff) + " chosen from the tail tolerance");
  }

  if (j.contains("coefficients")) {
    const auto& c = j["coefficients"];
    if (!c.is_array() || static_cast<int>(c.size()) != n)
      detail::schema_fail(text, "coefficients", "must be an array of " + std::to_string(n) + " complex numbers");
    std::vector<cplx> v;
    for (const auto& x : c) v.push_back(detail::parse_complex(text, "coefficients", x));
    ModeCoefficients raw(std::move(v));
    try {
      st.coeffs = raw.normalized();
    } catch (const Error& e) {
      detail::schema_fail(text, "coefficients", e.what());
    }
    if (!raw.is_normalized()) st.notes.push_back("coefficients were normalized");
  } else {
    st.coeffs = ModeCoefficients::uniform(n);
  }

  if (j.contains("preparation")) {
    const auto& p = j["preparation"];
    if (p.is_string()) {
      const auto s = p.get<std::string>();
      if (s == "none")
        st.preparation.kind = Preparation::Kind::none;
      else if (s == "nonlocal_add")
        st.preparation.kind = Preparation::Kind::nonlocal_add;
      else
        detail::schema_fail(text, "preparation", "unknown preparation '" + s + "'");
    } else if (p.is_object() && p.contains("semilocal_add") && p["semilocal_add"].is_array()) {
      st.preparation.kind = Preparation::Kind::semilocal_add;
      for (const auto& b : p["semilocal_add"]) {
        if (!b.is_array()) detail::schema_fail(text, "semilocal_add", "each block must be an array of mode indices");
        std::vector<int> members;
        for (const auto& m : b) {
          if (!m.is_number_integer()) detail::schema_fail(text, "semilocal_add", "mode indices must be integers");
          members.push_back(m.get<int>());
        }
        st.preparation.blocks.push_back(std::move(members));
      }
    } else {
      detail::schema_fail(text, "preparation", "expected \"none\", \"nonlocal_add\" or {\"semilocal_add\": [[..], ..]}");
    }
  }

  if (st.explicit_entries) {
    const auto& e = j["entries"];
    const std::size_t dim = st.spec.dimension();
    if (!e.is_array() || e.size() != dim * dim)
      detail::schema_fail(text, "entries", "must hold " + std::to_string(dim * dim) + " complex values in basis order");
    Eigen::MatrixXcd m(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) m(r, c) = detail::parse_complex(text, "entries", e[r * dim + c]);
    try {
      st.initial.emplace(st.spec, std::move(m));
    } catch (const InvalidStateError& ex) {
      detail::schema_fail(text, "entries", ex.what());
    }
  } else {
    st.initial.emplace(build_thermal(st.spec, st.n_th, tail));
  }

  switch (st.preparation.kind) {
    case Preparation::Kind::none:
      st.prepared = st.initial;
      break;
    case Preparation::Kind::nonlocal_add:
      st.prepared.emplace(add_particle_nonlocal(*st.initial, st.coeffs));
      break;
    case Preparation::Kind::semilocal_add: {
      std::vector<Combination> blocks;
      Structure s;
      try {
        for (const auto& b : st.preparation.blocks) blocks.emplace_back(b);
        s = Structure(n, std::move(blocks));
      } catch (const DomainError& ex) {
        detail::schema_fail(text, "semilocal_add", ex.what());
      }
      st.prepared.emplace(add_particle_semilocal(*st.initial, s, st.coeffs));
      break;
    }
  }
  return st;
}

inline StateFile load_state(const std::string& path, double tail = kDefaultTailTolerance) {
  return parse_state(read_text_file(path), path, tail);
}

/// Flat [re, im] list in basis order (mode 1 slowest).
inline json density_to_json(const DensityOperator& rho) {
  json j;
  j["n_modes"] = rho.n_modes();
  j["kind"] = to_string(rho.spec().kind);
  j["cutoff"] = rho.spec().cutoff;
  j["basis_order"] = "index = sum_k n_k d^(N-k), mode 1 slowest";
  json e = json::array();
  const auto& m = rho.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) e.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
  j["entries"] = std::move(e);
  return j;
}

inline json report_to_json(const WitnessReport& r) {
  json j;
  j["witness"] = r.witness;
  j["n_modes"] = r.n_modes;
  j["M"] = r.max_entangled;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["margin"] = r.margin;
  j["violated"] = r.violated;
  json t = json::object();
  for (const auto& term : r.terms) t[term.name] = term.value;
  j["terms"] = std::move(t);
  if (!r.structure.empty()) j[r.witness == "nonlocality" ? "argmax_structure" : "n_sep_argmax"] = r.structure;
  if (!r.per_block.empty()) {
    json b = json::array();
    for (const auto& pb : r.per_block) b.push_back({{"block", pb.block}, {"P_C", pb.probability}, {"B_C", pb.bound}});
    j["per_block"] = std::move(b);
  }
  if (r.confidence) {
    const auto& c = *r.confidence;
    j["confidence"] = {{"margin_stderr", c.margin_stderr},
                       {"z", c.z},
                       {"interval", json::array({r.margin - c.z * c.margin_stderr, r.margin + c.z * c.margin_stderr})},
                       {"violation_claimed", c.claimed},
                       {"shots", c.shots},
                       {"seed", c.seed}};
  }
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

inline json records_to_json(const std::vector<CountRecord>& recs) {
  json a = json::array();
  for (const auto& r : recs)
    a.push_back({{"id", r.id}, {"shots", r.shots}, {"sum", r.sum}, {"sum_sq", r.sum_sq}, {"seed", r.seed}});
  return a;
}

/// Count file: {"counts": {"AS:W": .., ...}} or {"records": [{id, shots, sum, sum_sq, seed}, ...]}.
inline CountSet parse_counts(const std::string& text, const std::string& source = "counts") {
  const json j = detail::parse_json(text, source);
  CountSet out;
  if (j.is_object() && j.contains("counts")) {
    if (!j["counts"].is_object()) detail::schema_fail(text, "counts", "must be an object of id -> value");
    for (const auto& [k, v] : j["counts"].items()) {
      if (!v.is_number()) detail::schema_fail(text, k, "count value must be a number");
      out[k] = v.get<double>();
    }
  } else if (j.is_object() && j.contains("records")) {
    if (!j["records"].is_array()) detail::schema_fail(text, "records", "must be an array");
    for (const auto& r : j["records"]) {
      if (!r.contains("id") || !r["id"].is_string()) detail::schema_fail(text, "id", "record without a string id");
      CountRecord rec;
      rec.id = r["id"].get<std::string>();
      if (!r.contains("shots") || !r["shots"].is_number_integer()) detail::schema_fail(text, "shots", "must be an integer");
      if (!r.contains("sum") || !r["sum"].is_number()) detail::schema_fail(text, "sum", "must be a number");
      rec.shots = r["shots"].get<std::int64_t>();
      rec.sum = r["sum"].get<double>();
      rec.sum_sq = r.contains("sum_sq") && r["sum_sq"].is_number() ? r["sum_sq"].get<double>() : 0.0;
      if (rec.shots < 1) detail::schema_fail(text, "shots", "must be >= 1");
      out[rec.id] = rec.estimate().mean;
    }
  } else {
    throw SchemaError(source + ": expected an object with \"counts\" or \"records\"");
  }
  return out;
}

/// {"n_modes": 3, "elements": [{"type": "beam_splitter", "r": 0.5, "modes": [2, 3]},
///                            {"type": "phase", "phi": 0.3, "mode": 1}]}
inline OpticalNetwork parse_network(const std::string& text, const std::string& source = "network") {
  const json j = detail::parse_json(text, source);
  const int n = detail::require_int(text, j, "n_modes");
  if (!j.contains("elements") || !j["elements"].is_array()) detail::schema_fail(text, "elements", "must be an array");
  std::vector<NetworkElement> els;
  for (const auto& e : j["elements"]) {
    const std::string type = e.contains("type") && e["type"].is_string() ? e["type"].get<std::string>() : "";
    if (type == "beam_splitter") {
      if (!e.contains("r") || !e["r"].is_number()) detail::schema_fail(text, "r", "beam splitter needs a numeric r");
      if (!e.contains("modes") || !e["modes"].is_array() || e["modes"].size() != 2 ||
          !e["modes"][0].is_number_integer() || !e["modes"][1].is_number_integer())
        detail::schema_fail(text, "modes", "beam splitter needs two integer modes");
      els.push_back(BeamSplitter{e["r"].get<double>(), e["modes"][0].get<int>(), e["modes"][1].get<int>()});
    } else if (type == "phase") {
      if (!e.contains("phi") || !e["phi"].is_number()) detail::schema_fail(text, "phi", "phase needs a numeric phi");
      els.push_back(PhaseShift{e["phi"].get<double>(), detail::require_int(text, e, "mode")});
    } else {
      detail::schema_fail(text, "type", "element type must be \"beam_splitter\" or \"phase\"");
    }
  }
  return OpticalNetwork(n, std::move(els));
}

}  // namespace wmwit
