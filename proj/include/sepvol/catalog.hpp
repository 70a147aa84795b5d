#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sepvol/catalog_data.hpp"
#include "sepvol/closedforms.hpp"

namespace sepvol {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSuites[] = {"qq-real",      "qq-complex",    "qq-quaternion", "qq-mixed",     "qubit-qutrit",
                                          "qutrit-qutrit", "three-qubit", "bounds",        "normalization"};

inline bool is_suite(std::string_view s) {
  return std::find(std::begin(kSuites), std::end(kSuites), s) != std::end(kSuites);
}

// ---------------------------------------------------------------------------
// Scenario serialization

inline Json scenario_to_json(const ScenarioSpec& s) {
  Json pairs = Json::array();
  for (const auto& p : s.pairs) pairs.push_back(Json::array({p.i, p.j, field_name(p.field)}));
  Json j;
  j["split"] = split_name(s.split);
  j["pairs"] = std::move(pairs);
  return j;
}

inline ScenarioSpec scenario_from_json(const Json& j) {
  try {
    const CompositeSplit split = parse_split(j.at("split").get<std::string>());
    std::vector<Pair> pairs;
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 3) throw Error(Errc::ParseError, "pair must be [i, j, field]");
      pairs.push_back({p[0].get<int>(), p[1].get<int>(), parse_field(p[2].get<std::string>())});
    }
    return make_scenario(split, std::move(pairs));
  } catch (const Json::exception& e) {
    throw Error(Errc::ParseError, std::string("scenario: ") + e.what());
  }
}

inline ScenarioSpec parse_scenario_json(std::string_view text) {
  try {
    return scenario_from_json(Json::parse(text));
  } catch (const Json::exception& e) {
    throw Error(Errc::ParseError, std::string("scenario: ") + e.what());
  }
}

/// Alias such as "qq-real-23", "qt-complex-15" or "qq-mixed-c12-r14".
inline std::string make_alias(const ScenarioSpec& s) {
  static constexpr const char* prefix[] = {"qq", "qt", "tt", "3qb", "3qt"};
  std::string out = prefix[static_cast<int>(s.split.kind)];
  if (s.pairs.empty()) return out + "-diagonal";
  const bool uniform = std::all_of(s.pairs.begin(), s.pairs.end(),
                                   [&](const Pair& p) { return p.field == s.pairs.front().field; });
  out += uniform ? std::string("-") + field_name(s.pairs.front().field) : std::string("-mixed");
  for (const auto& p : s.pairs) {
    out += '-';
    if (!uniform) out += field_name(p.field)[0];
    out += std::to_string(p.i) + std::to_string(p.j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entries

namespace detail {

inline constexpr const char* kValueKeys[] = {"c", "S1", "V_tot", "V_sep", "P"};

inline std::optional<ExactValue>& value_slot(CatalogEntry& e, std::string_view k) {
  if (k == "c") return e.c;
  if (k == "S1") return e.S1;
  if (k == "V_tot") return e.V_tot;
  if (k == "V_sep") return e.V_sep;
  return e.P;
}

inline const std::optional<ExactValue>& value_slot(const CatalogEntry& e, std::string_view k) {
  return value_slot(const_cast<CatalogEntry&>(e), k);
}

inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw Error(Errc::ParseError, where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw Error(Errc::ParseError, where + ": unknown key '" + k + "'");
}

}  // namespace detail

inline CatalogEntry entry_from_json(const Json& j) {
  CatalogEntry e;
  try {
    e.alias = j.at("alias").get<std::string>();
    detail::check_keys(j, {"alias", "scenario", "suite", "status", "cite", "c", "S1", "V_tot", "V_sep", "P", "S", "errata"},
                       e.alias);
    e.spec = scenario_from_json(j.at("scenario"));
    e.suite = j.at("suite").get<std::string>();
    if (!is_suite(e.suite)) throw Error(Errc::UnknownSuite, e.alias + ": suite '" + e.suite + "'");
    e.status = parse_status(j.at("status").get<std::string>());
    e.cite = j.at("cite").get<std::string>();
    for (const char* k : detail::kValueKeys)
      if (j.contains(k)) detail::value_slot(e, k) = ExactValue::parse(j[k].get<std::string>());
    if (j.contains("S")) {
      const Json& s = j["S"];
      detail::check_keys(s, {"vars", "define", "pieces"}, e.alias + ".S");
      std::vector<std::pair<std::string, std::string>> defines, pieces;
      if (s.contains("define"))
        for (const auto& d : s["define"]) defines.emplace_back(d.at(0).get<std::string>(), d.at(1).get<std::string>());
      for (const auto& p : s.at("pieces")) {
        detail::check_keys(p, {"region", "expr"}, e.alias + ".S.pieces");
        pieces.emplace_back(p.at("region").get<std::string>(), p.at("expr").get<std::string>());
      }
      e.S = make_piecewise(s.at("vars").get<std::vector<std::string>>(), std::move(defines), std::move(pieces));
      if (e.S->vars != ratio_names(e.spec.split))
        throw Error(Errc::ArityMismatch, e.alias + ": S must list the split's ratio variables");
    }
    if (j.contains("errata"))
      for (const auto& x : j["errata"]) {
        detail::check_keys(x, {"field", "printed", "note"}, e.alias + ".errata");
        e.errata.push_back({x.at("field").get<std::string>(), x.at("printed").get<std::string>(),
                            x.at("note").get<std::string>()});
      }
  } catch (const Json::exception& ex) {
    throw Error(Errc::ParseError, e.alias + ": " + ex.what());
  }
  return e;
}

inline Json entry_to_json(const CatalogEntry& e) {
  Json j;
  j["alias"] = e.alias;
  j["scenario"] = scenario_to_json(e.spec);
  j["suite"] = e.suite;
  j["status"] = status_name(e.status);
  j["cite"] = e.cite;
  for (const char* k : detail::kValueKeys)
    if (const auto& v = detail::value_slot(e, k)) j[k] = v->text;
  if (e.S) {
    Json s;
    s["vars"] = e.S->vars;
    if (!e.S->defines.empty()) {
      Json d = Json::array();
      for (const auto& [name, text] : e.S->defines) d.push_back(Json::array({name, text}));
      s["define"] = std::move(d);
    }
    Json pieces = Json::array();
    for (const auto& p : e.S->pieces) {
      Json q;
      q["region"] = p.region;
      q["expr"] = p.formula;
      pieces.push_back(std::move(q));
    }
    s["pieces"] = std::move(pieces);
    j["S"] = std::move(s);
  }
  if (!e.errata.empty()) {
    Json x = Json::array();
    for (const auto& r : e.errata) {
      Json q;
      q["field"] = r.field;
      q["printed"] = r.printed;
      q["note"] = r.note;
      x.push_back(std::move(q));
    }
    j["errata"] = std::move(x);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Catalog

class Catalog {
 public:
  static Catalog parse(std::string_view text) {
    Catalog c;
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      throw Error(Errc::ParseError, std::string("catalog: ") + e.what());
    }
    if (!j.is_array()) throw Error(Errc::ParseError, "catalog must be a list");
    for (const auto& x : j) {
      auto e = entry_from_json(x);
      if (c.find_alias(e.alias)) throw Error(Errc::DuplicatePair, "duplicate alias " + e.alias);
      if (c.find(e.spec)) throw Error(Errc::DuplicatePair, "duplicate scenario " + e.alias);
      c.entries_.push_back(std::move(e));
    }
    return c;
  }

  Json to_json() const {
    Json j = Json::array();
    for (const auto& e : entries_) j.push_back(entry_to_json(e));
    return j;
  }

  /// Text in the layout of the data file.
  std::string dump() const { return to_json().dump(2) + "\n"; }

  const std::vector<CatalogEntry>& entries() const { return entries_; }

  const CatalogEntry* find(const ScenarioSpec& s) const {
    for (const auto& e : entries_)
      if (e.spec == s) return &e;
    return nullptr;
  }

  const CatalogEntry* find_alias(std::string_view a) const {
    for (const auto& e : entries_)
      if (e.alias == a) return &e;
    return nullptr;
  }

  std::vector<const CatalogEntry*> suite(std::string_view name) const {
    if (!is_suite(name)) throw Error(Errc::UnknownSuite, std::string(name));
    std::vector<const CatalogEntry*> out;
    for (const auto& e : entries_)
      if (e.suite == name) out.push_back(&e);
    return out;
  }

 private:
  std::vector<CatalogEntry> entries_;
};

/// The built-in catalog.
inline const Catalog& catalog() {
  static const Catalog c = Catalog::parse(detail::kCatalogJson);
  return c;
}

/// nullopt when the scenario is not cataloged.
inline std::optional<CatalogEntry> catalog_lookup(const ScenarioSpec& s) {
  if (const auto* e = catalog().find(s)) return *e;
  return std::nullopt;
}

/// Scenario from a JSON object or a catalog alias.
inline ScenarioSpec resolve_scenario(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_scenario_json(text);
  if (const auto* e = catalog().find_alias(text)) return e->spec;
  throw Error(Errc::ParseError, "unknown scenario alias '" + std::string(text) + "'");
}

}  // namespace sepvol
