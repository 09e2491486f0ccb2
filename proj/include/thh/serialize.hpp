#pragma once

// Degreewise tables as JSON and CSV.
//
// JSON: an array with one object per degree, in increasing degree order,
//   [{"degree": d, "free_rank": r, "torsion_exponents": [e1, e2, ...]}, ...]
// where the group is Z_(p)^r plus the sum of Z/p^ei. Exponents are sorted.
// CSV: header "degree,free_rank,torsion_exponents", exponents joined by ';'.

#include <charconv>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "thh/brun.hpp"
#include "thh/catalog.hpp"
#include "thh/verify.hpp"

namespace thh {

struct DegreeRecord {
  std::int64_t degree = 0;
  AbelianGroup group;
  bool operator==(const DegreeRecord&) const = default;
};

using DegreeTableRows = std::vector<DegreeRecord>;

inline DegreeTableRows records_from(const std::vector<AbelianGroup>& groups) {
  DegreeTableRows out;
  out.reserve(groups.size());
  for (std::size_t d = 0; d < groups.size(); ++d) out.push_back({std::int64_t(d), groups[d]});
  return out;
}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- JSON ------------------------------------------------------------------

inline nlohmann::json to_json(const DegreeRecord& r) {
  return {{"degree", r.degree}, {"free_rank", r.group.free_rank()}, {"torsion_exponents", r.group.torsion()}};
}

inline nlohmann::json to_json(const DegreeTableRows& rows) {
  auto a = nlohmann::json::array();
  for (const auto& r : rows) a.push_back(to_json(r));
  return a;
}

inline DegreeRecord record_from_json(const nlohmann::json& j) {
  try {
    return {j.at("degree").get<std::int64_t>(),
            AbelianGroup(j.at("free_rank").get<std::int64_t>(), j.at("torsion_exponents").get<std::vector<int>>())};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad degree record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("bad degree record: ") + e.what());
  }
}

inline DegreeTableRows rows_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("degree table must be a JSON array");
  DegreeTableRows out;
  for (const auto& x : j) out.push_back(record_from_json(x));
  return out;
}

inline DegreeTableRows parse_json_rows(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  // brun output wraps the table in an object
  if (j.is_object() && j.contains("degrees")) return rows_from_json(j.at("degrees"));
  return rows_from_json(j);
}

// ---- CSV -------------------------------------------------------------------

inline std::string csv_header() { return "degree,free_rank,torsion_exponents"; }

inline std::string to_csv_line(const DegreeRecord& r) {
  std::string s = std::to_string(r.degree) + "," + std::to_string(r.group.free_rank()) + ",";
  for (std::size_t i = 0; i < r.group.torsion().size(); ++i) s += (i ? ";" : "") + std::to_string(r.group.torsion()[i]);
  return s;
}

inline std::string to_csv(const DegreeTableRows& rows) {
  std::string s = csv_header() + "\n";
  for (const auto& r : rows) s += to_csv_line(r) + "\n";
  return s;
}

namespace detail {

inline std::int64_t parse_int(std::string_view s, const std::string& what) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("bad " + what + ": '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

}  // namespace detail

inline DegreeTableRows parse_csv_rows(std::istream& in) {
  DegreeTableRows out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == csv_header()) continue;
    }
    const auto f = detail::split(line, ',');
    if (f.size() != 3) throw ParseError("expected 3 CSV fields: " + line);
    std::vector<int> t;
    if (!f[2].empty())
      for (auto e : detail::split(f[2], ';')) t.push_back(int(detail::parse_int(e, "torsion exponent")));
    try {
      out.push_back({detail::parse_int(f[0], "degree"), AbelianGroup(detail::parse_int(f[1], "free rank"), t)});
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
  return out;
}

inline DegreeTableRows parse_csv_rows(const std::string& text) {
  std::istringstream in(text);
  return parse_csv_rows(in);
}

// ---- series, brun runs, reports -----------------------------------------------

inline std::string series_csv(const DimensionSeries& s, std::int64_t max_degree) {
  std::string out = "degree,dim\n";
  const auto c = s.coefficients(max_degree);
  for (std::size_t d = 0; d < c.size(); ++d) out += std::to_string(d) + "," + std::to_string(c[d]) + "\n";
  return out;
}

inline nlohmann::json to_json(const ExtensionRule& r) {
  return {{"degree", r.degree},
          {"source", terms_str(r.source)},
          {"target", terms_str(r.target)},
          {"p_power", r.p_power},
          {"origin", r.origin == RuleOrigin::given ? "given" : "derived"}};
}

inline DegreeTableRows abutment_rows(const BrunRun& run) {
  DegreeTableRows rows;
  for (const auto& dd : run.degrees) rows.push_back({dd.degree, dd.abutment});
  return rows;
}

inline nlohmann::json to_json(const BrunRun& run, bool with_extensions = true) {
  nlohmann::json j{{"n", run.n},
                   {"prime", run.p.value()},
                   {"d1", to_string(run.rule)},
                   {"max_degree", run.max_degree},
                   {"degrees", to_json(abutment_rows(run))}};
  auto ex = nlohmann::json::array();
  if (with_extensions)
    for (const auto& r : run.extensions) ex.push_back(to_json(r));
  j["extensions"] = ex;
  j["notes"] = run.notes;
  return j;
}

inline nlohmann::json to_json(const Report& r) {
  auto diffs = nlohmann::json::array();
  for (const auto& d : r.diffs) diffs.push_back({{"degree", d.degree}, {"expected", d.expected}, {"computed", d.computed}});
  return {{"check", r.check}, {"prime", r.prime},   {"degrees", {r.lo, r.hi}}, {"status", to_string(r.status)},
          {"diffs", diffs},   {"notes", r.notes},   {"flags", r.flags}};
}

inline nlohmann::json to_json(const std::vector<Report>& rs) {
  auto a = nlohmann::json::array();
  for (const auto& r : rs) a.push_back(to_json(r));
  return {{"ok", all_ok(rs)}, {"flag_count", flag_count(rs)}, {"reports", a}};
}

}  // namespace thh
