#pragma once

// Charts of degreewise groups: one dot per cyclic summand, v1-struts between
// dots of the same generator, dashed marks for hidden p-extensions.
// The SVG output is a pure function of the document, so it is byte-stable.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "thh/brun.hpp"

namespace thh {

struct ChartDot {
  std::int64_t degree = 0;
  int level = 0;         // stacking position within the degree
  std::string label;     // generator, without the v1-power
  std::int64_t v1_power = 0;
  int exponent = 0;      // 0 = free
};

struct ChartEdge {
  std::size_t from = 0, to = 0;  // dot indices
};

struct ChartDocument {
  std::string title;
  std::int64_t prime = 2;
  std::int64_t lo = 0, hi = 0;
  std::vector<ChartDot> dots;  // sorted by (degree, label, v1_power)
  std::vector<ChartEdge> struts;
  std::vector<ChartEdge> extensions;  // from == to marks the glued summand

  std::size_t dots_in(std::int64_t d) const {
    return std::size_t(std::count_if(dots.begin(), dots.end(), [d](const ChartDot& x) { return x.degree == d; }));
  }
};

namespace detail {

struct RawDot {
  std::string label;
  std::int64_t v1_power;
  int exponent;
};

inline void place(ChartDocument& doc, std::int64_t d, std::vector<RawDot> raw) {
  std::sort(raw.begin(), raw.end(), [](const RawDot& a, const RawDot& b) {
    return std::tie(a.label, a.v1_power, a.exponent) < std::tie(b.label, b.v1_power, b.exponent);
  });
  int level = 0;
  for (auto& r : raw) doc.dots.push_back({d, level++, std::move(r.label), r.v1_power, r.exponent});
}

inline void connect_struts(ChartDocument& doc, std::int64_t step) {
  std::map<std::tuple<std::int64_t, std::string, std::int64_t>, std::size_t> at;
  for (std::size_t i = 0; i < doc.dots.size(); ++i) {
    const auto& x = doc.dots[i];
    at.emplace(std::tuple{x.degree, x.label, x.v1_power}, i);
  }
  for (std::size_t i = 0; i < doc.dots.size(); ++i) {
    const auto& x = doc.dots[i];
    auto it = at.find({x.degree + step, x.label, x.v1_power + 1});
    if (it != at.end()) doc.struts.push_back({i, it->second});
  }
}

}  // namespace detail

// Dots come from the summand attribution of the p-local Smith form, so every
// dot is a cyclic summand of the realized group in its degree.
inline ChartDocument build_chart(const PresentationPtr& pres, std::int64_t max_degree, std::string title = {}) {
  const Prime& p = pres->prime();
  ChartDocument doc{title.empty() ? pres->name() : std::move(title), p.value(), 0, max_degree, {}, {}, {}};
  const Truncation tr(pres, max_degree);
  std::vector<std::vector<detail::RawDot>> per(std::size_t(max_degree + 1));
  parallel_for(per.size(), [&](std::size_t du) {
    const Block b = tr.block(std::int64_t(du));
    for (const auto& s : cokernel_detail(b.relations, p).summands) {
      const auto& m = b.basis[s.row];
      per[du].push_back({m.gen.label.str(), m.v1_exp, s.exponent});
    }
  });
  for (std::size_t d = 0; d < per.size(); ++d) detail::place(doc, std::int64_t(d), std::move(per[d]));
  if (pres->v1_acts()) detail::connect_struts(doc, v1_degree(p));
  return doc;
}

// Chart of a Brun abutment. Abutment rows are labelled by their leading
// E1 monomial (generator, v1-exponent); lifts of extension sources carry "~".
inline ChartDocument build_chart(const BrunRun& run, std::string title = {}) {
  const Prime& p = run.p;
  ChartDocument doc{title.empty() ? "abutment n=" + std::to_string(run.n) : std::move(title), p.value(), 0,
                    run.max_degree, {}, {}, {}};
  for (const auto& dd : run.degrees) {
    std::vector<detail::RawDot> raw;
    const auto& sl = dd.abutment_slice;
    for (const auto& s : cokernel_detail(sl.relations, p).summands) {
      const auto& l = sl.labels[s.row];
      raw.push_back({l.name + l.decor, l.idx.empty() ? 0 : l.idx[0], s.exponent});
    }
    detail::place(doc, dd.degree, std::move(raw));
  }
  if (run.e1->v1_acts()) detail::connect_struts(doc, v1_degree(p));
  // each extension marks the dot of its lift, or of its target when the
  // glued summand was attributed to the target row
  for (const auto& r : run.extensions) {
    if (r.degree > run.max_degree || r.source.empty() || r.target.empty()) continue;
    const auto& s = r.source.front().mono;
    const auto& t = r.target.front().mono;
    std::optional<std::size_t> lift, target;
    for (std::size_t i = 0; i < doc.dots.size(); ++i) {
      const auto& x = doc.dots[i];
      if (x.degree != r.degree) continue;
      if (x.label == s.gen.label.str() + "~" && x.v1_power == s.v1_exp) lift = i;
      if (x.label == t.gen.label.str() && x.v1_power == t.v1_exp) target = i;
    }
    if (lift && target)
      doc.extensions.push_back({*lift, *target});
    else if (lift || target)
      doc.extensions.push_back({lift ? *lift : *target, lift ? *lift : *target});
  }
  return doc;
}

// ---- SVG ---------------------------------------------------------------------

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

struct ChartLayout {
  int dx = 14, dy = 12, margin = 40, radius = 3;
};

inline std::string to_svg(const ChartDocument& doc, const ChartLayout& lay = {}) {
  int top = 0;
  for (const auto& d : doc.dots) top = std::max(top, d.level + 1);
  const std::int64_t width = 2 * lay.margin + (doc.hi - doc.lo + 1) * lay.dx;
  const std::int64_t height = 2 * lay.margin + std::max(top, 4) * lay.dy;
  auto x_of = [&](std::int64_t d) { return lay.margin + (d - doc.lo) * lay.dx + lay.dx / 2; };
  auto y_of = [&](int level) { return height - lay.margin - level * lay.dy - lay.dy / 2; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"monospace\" font-size=\"9\">\n";
  o << "<title>" << detail::xml_escape(doc.title) << " p=" << doc.prime << "</title>\n";
  // axes
  const auto y0 = height - lay.margin;
  o << "<g id=\"axes\" stroke=\"#000\">\n";
  o << "<line x1=\"" << lay.margin << "\" y1=\"" << y0 << "\" x2=\"" << width - lay.margin << "\" y2=\"" << y0 << "\"/>\n";
  o << "<line x1=\"" << lay.margin << "\" y1=\"" << y0 << "\" x2=\"" << lay.margin << "\" y2=\"" << lay.margin << "\"/>\n";
  o << "</g>\n<g id=\"ticks\" text-anchor=\"middle\">\n";
  for (std::int64_t d = doc.lo; d <= doc.hi; ++d)
    if (d % 10 == 0) o << "<text x=\"" << x_of(d) << "\" y=\"" << y0 + 14 << "\">" << d << "</text>\n";
  o << "</g>\n<g id=\"struts\" stroke=\"#555\">\n";
  for (const auto& e : doc.struts) {
    const auto &a = doc.dots[e.from], &b = doc.dots[e.to];
    o << "<line x1=\"" << x_of(a.degree) << "\" y1=\"" << y_of(a.level) << "\" x2=\"" << x_of(b.degree) << "\" y2=\""
      << y_of(b.level) << "\"/>\n";
  }
  o << "</g>\n<g id=\"extensions\" stroke=\"#c00\" fill=\"none\" stroke-dasharray=\"3,2\">\n";
  for (const auto& e : doc.extensions) {
    const auto &a = doc.dots[e.from], &b = doc.dots[e.to];
    if (e.from == e.to)
      o << "<circle cx=\"" << x_of(a.degree) << "\" cy=\"" << y_of(a.level) << "\" r=\"" << 2 * lay.radius << "\"/>\n";
    else
      o << "<line x1=\"" << x_of(a.degree) << "\" y1=\"" << y_of(a.level) << "\" x2=\"" << x_of(b.degree) << "\" y2=\""
        << y_of(b.level) << "\"/>\n";
  }
  o << "</g>\n<g id=\"dots\">\n";
  for (const auto& d : doc.dots) {
    const std::string name = (d.v1_power ? "v1^" + std::to_string(d.v1_power) + "·" : std::string()) + d.label;
    const std::string tip = detail::xml_escape(name) + " deg " + std::to_string(d.degree) +
                            (d.exponent ? " Z/p^" + std::to_string(d.exponent) : " free");
    const auto cx = x_of(d.degree), cy = y_of(d.level);
    if (d.exponent == 0)
      o << "<rect x=\"" << cx - lay.radius << "\" y=\"" << cy - lay.radius << "\" width=\"" << 2 * lay.radius
        << "\" height=\"" << 2 * lay.radius << "\"><title>" << tip << "</title></rect>\n";
    else
      o << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << lay.radius + d.exponent - 1 << "\"><title>" << tip
        << "</title></circle>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace thh
