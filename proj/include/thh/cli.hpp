#pragma once

// The thh command line, callable in-process so tests can drive it.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thh/chart.hpp"
#include "thh/serialize.hpp"

namespace thh::cli {

enum Exit : int { ok = 0, verification_failed = 1, usage = 2, io = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"thh-fp",    "thh-z",       "thh-ell", "thh-ell-z",
                                              "thh-bp2-z", "thh-bp2-bp1", "thc-z"};
  return names;
}

inline PresentationPtr make_model(const std::string& name, const Prime& p, std::int64_t max_degree) {
  if (name == "thh-fp") return thh_fp_module(p);
  if (name == "thh-z") return thh_z_module(p);
  if (name == "thh-ell") return thh_ell(p);
  if (name == "thh-ell-z") return thh_ell_zp(p);
  if (name == "thh-bp2-z") return thh_bp2_zp(p);
  if (name == "thh-bp2-bp1") return thh_bp2_bp1_closed(p);
  if (name == "thc-z") return thc_z_module(p, max_degree);
  throw UsageError("unknown model '" + name + "'");
}

inline DimensionSeries make_series(const std::string& name, int n, int m, const Prime& p) {
  if (name == "thh-bpn-fp") return thh_bpn_fp(n, p);
  if (name == "thc-bpn-fp") return thc_bpn_fp(n, p);
  if (name == "rational") return rational_thh(n, m, p);
  if (name == "cooperations") return cooperations(n, m, p);
  if (name == "fp-mu-p") return fp_mu_p_series(p);
  throw UsageError("unknown series '" + name + "'");
}

inline D1Case d1_case(int n, const std::string& coeff) {
  switch (n) {
    case 0: return D1Case::n0;
    case 1: return D1Case::n1;
    case 2: return coeff == "zp" ? D1Case::n2_zp : D1Case::n2_ell;
    default: throw UsageError("--n must be 0, 1 or 2");
  }
}

inline BrunRun brun_for(int n, const Prime& p, std::int64_t max_degree, const std::string& coeff = "ell") {
  const D1Case rule = d1_case(n, coeff);
  if (max_degree < 2 * ipow(p.value(), n))
    throw UsageError("--max-degree must be at least " + std::to_string(2 * ipow(p.value(), n)) + " for n=" +
                     std::to_string(n));
  BrunOptions opt;
  if (rule == D1Case::n1) opt.derive_against = thh_ell_zp(p);
  return run_brun(n, p, max_degree, rule, opt);
}

struct Settings {
  std::int64_t prime = 2;
  std::int64_t max_degree = 100;
  std::string format = "json";
  std::string output;
  std::string model;
  int n = 2;
  int m = 0;
  std::string emit;
  std::string d1 = "ell";
  bool log_extensions = false;
  std::string suite = "main";
  std::string series = "thh-bpn-fp";
  bool prime_given = false, degree_given = false;
};

inline void emit_text(const Settings& s, const std::string& text, std::ostream& out) {
  if (s.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(s.output, std::ios::binary);
  if (!f) throw IoError("cannot open " + s.output + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("write to " + s.output + " failed");
}

inline std::string table_text(const DegreeTableRows& rows, const std::string& format) {
  return format == "csv" ? to_csv(rows) : to_json(rows).dump(1) + "\n";
}

inline int cmd_compute(const Settings& s, std::ostream& out) {
  const Prime p(s.prime);
  const auto groups = realize_range(make_model(s.model, p, s.max_degree), s.max_degree);
  emit_text(s, table_text(records_from(groups), s.format), out);
  return ok;
}

inline int cmd_brun(const Settings& s, std::ostream& out, std::ostream& err) {
  const Prime p(s.prime);
  const BrunRun run = brun_for(s.n, p, s.max_degree, s.d1);
  if (s.log_extensions)
    for (const auto& r : run.extensions)
      if (r.degree <= run.max_degree)
        err << "extension deg " << r.degree << ": p^" << r.p_power << "·(" << terms_str(r.source) << ") = "
            << terms_str(r.target) << (r.origin == RuleOrigin::derived ? " [derived]" : "") << "\n";
  const std::string format = s.emit.empty() ? s.format : s.emit;
  emit_text(s, format == "csv" ? to_csv(abutment_rows(run)) : to_json(run).dump(1) + "\n", out);
  return ok;
}

inline int cmd_verify(const Settings& s, std::ostream& out) {
  SuiteOptions o;
  if (s.prime_given) o.prime = s.prime;
  if (s.degree_given) o.max_degree = s.max_degree;
  const auto reports = run_suite(s.suite, o);
  emit_text(s, to_json(reports).dump(1) + "\n", out);
  return all_ok(reports) ? ok : verification_failed;
}

inline int cmd_series(const Settings& s, std::ostream& out) {
  const Prime p(s.prime);
  emit_text(s, series_csv(make_series(s.series, s.n, s.m, p), s.max_degree), out);
  return ok;
}

inline int cmd_chart(const Settings& s, std::ostream& out) {
  const Prime p(s.prime);
  ChartDocument doc;
  // the closed form has no extension log, so its chart comes from the spectral sequence
  if (s.model == "thh-bp2-bp1" && s.max_degree >= 2 * p.value() * p.value())
    doc = build_chart(brun_for(2, p, s.max_degree), "THH(BP<2>;BP<1>)");
  else
    doc = build_chart(make_model(s.model, p, s.max_degree), s.max_degree);
  emit_text(s, to_svg(doc), out);
  return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Settings s;
  CLI::App app{"Degreewise homotopy of THH of truncated Brown-Peterson spectra", "thh"};
  app.require_subcommand(1);
  app.fallthrough();
  auto* prime = app.add_option("--prime", s.prime, "prime p")->check(CLI::PositiveNumber);
  auto* degree = app.add_option("--max-degree", s.max_degree, "largest degree computed")->check(CLI::NonNegativeNumber);
  app.add_option("--format", s.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", s.output, "output file (default stdout)");

  const auto models = CLI::IsMember(model_names());
  auto* compute = app.add_subcommand("compute", "degreewise groups of a model");
  compute->add_option("--model", s.model)->required()->check(models);
  auto* brun = app.add_subcommand("brun", "run the Brun spectral sequence for THH(BP<n>;BP<n-1>)");
  brun->add_option("--n", s.n)->check(CLI::IsMember({0, 1, 2}));
  brun->add_option("--emit", s.emit)->check(CLI::IsMember({"json", "csv"}));
  brun->add_option("--d1", s.d1, "coefficients of the input for n=2")->check(CLI::IsMember({"ell", "zp"}));
  brun->add_flag("--log-extensions", s.log_extensions, "print the extension log to stderr");
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", s.suite)->check(CLI::IsMember({"main", "rational", "lemmas", "ku", "all"}));
  auto* series = app.add_subcommand("series", "dimension series as CSV degree,dim");
  series->add_option("--name", s.series)
      ->check(CLI::IsMember({"thh-bpn-fp", "thc-bpn-fp", "rational", "cooperations", "fp-mu-p"}));
  series->add_option("--n", s.n);
  series->add_option("--m", s.m);
  auto* chart = app.add_subcommand("chart", "SVG chart of a model");
  chart->add_option("--model", s.model)->required()->check(models);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }
  s.prime_given = prime->count() > 0;
  s.degree_given = degree->count() > 0;
  try {
    (void)Prime(s.prime);
    if (*compute) return cmd_compute(s, out);
    if (*brun) return cmd_brun(s, out, err);
    if (*verify) return cmd_verify(s, out);
    if (*series) return cmd_series(s, out);
    if (*chart) return cmd_chart(s, out);
  } catch (const UsageError& e) {
    err << "thh: " << e.what() << "\n";
    return usage;
  } catch (const std::invalid_argument& e) {
    err << "thh: " << e.what() << "\n";
    return usage;
  } catch (const IoError& e) {
    err << "thh: " << e.what() << "\n";
    return io;
  }
  return usage;
}

}  // namespace thh::cli
