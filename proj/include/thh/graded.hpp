#pragma once

// Graded modules over Z_(p)[v1] (or over Z_(p) alone) given by generators and
// homogeneous relations, enumerated lazily and realized one degree at a time.

#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "thh/arith.hpp"
#include "thh/parallel.hpp"

namespace thh {

inline std::int64_t v1_degree(const Prime& p) { return 2 * p.value() - 2; }

// Closed-form degrees of the named classes.
struct DegreeTable {
  Prime p;
  std::int64_t q() const { return p.value(); }
  std::int64_t v1() const { return 2 * q() - 2; }
  std::int64_t lambda(int s) const { return 2 * ipow(q(), s) - 1; }
  std::int64_t mu(int n) const { return 2 * ipow(q(), n + 1); }  // the class mu^{p^{n+1}}
  std::int64_t sigma_v(int n) const { return 2 * ipow(q(), n) - 1; }
  std::int64_t a(std::int64_t i) const { return 2 * i * q() * q() - 1; }
  std::int64_t b(std::int64_t i) const { return 2 * i * q() * q() + 2 * q() - 2; }
  std::int64_t b_alpha(std::int64_t alpha, int n) const { return 2 * ipow(q(), n + 2) * alpha + 2 * q() - 2; }
  std::int64_t a_pn(int n) const { return 2 * ipow(q(), n + 2) - 1; }
  std::int64_t c(std::int64_t i) const { return 2 * (i + 1) * q() * q() - 2; }
};

struct GeneratorLabel {
  std::string name;
  std::vector<std::int64_t> idx;
  std::string decor;  // appended by suspensions, exterior copies and sums

  auto operator<=>(const GeneratorLabel&) const = default;
  bool operator==(const GeneratorLabel&) const = default;

  std::string str() const {
    std::string s = name;
    if (!idx.empty()) {
      s += "(";
      for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i]);
      s += ")";
    }
    return s + decor;
  }
};

struct LabelHash {
  std::size_t operator()(const GeneratorLabel& l) const noexcept {
    std::size_t h = std::hash<std::string>{}(l.name) ^ (std::hash<std::string>{}(l.decor) * 31);
    for (auto x : l.idx) h = h * 1000003u ^ std::hash<std::int64_t>{}(x);
    return h;
  }
};

struct Generator {
  GeneratorLabel label;
  std::int64_t degree = 0;
};

// p^p_exp * v1^v1_exp * gen
struct Monomial {
  int p_exp = 0;
  std::int64_t v1_exp = 0;
  Generator gen;

  std::int64_t degree(const Prime& p) const { return v1_exp * v1_degree(p) + gen.degree; }
};

struct Term {
  std::int64_t coeff = 1;
  Monomial mono;
};

inline Term term(std::int64_t coeff, const Generator& g, std::int64_t v1_exp = 0, int p_exp = 0) {
  return Term{coeff, Monomial{p_exp, v1_exp, g}};
}

// A homogeneous relator: the sum of its terms is zero.
class Relation {
 public:
  Relation(std::vector<Term> terms, const Prime& p) : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("relation without terms");
    degree_ = terms_.front().mono.degree(p);
    for (const auto& t : terms_) {
      if (t.coeff == 0) throw std::invalid_argument("relation term with zero coefficient");
      if (t.mono.p_exp < 0 || t.mono.v1_exp < 0) throw std::invalid_argument("negative exponent in relation");
      if (t.mono.degree(p) != degree_)
        throw std::invalid_argument("inhomogeneous relation: degrees " + std::to_string(degree_) + " and " +
                                    std::to_string(t.mono.degree(p)));
    }
  }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::int64_t degree() const noexcept { return degree_; }

 private:
  std::vector<Term> terms_;
  std::int64_t degree_ = 0;
};

class Presentation {
 public:
  Presentation(Prime p, bool v1_acts, std::string name) : p_(p), v1_acts_(v1_acts), name_(std::move(name)) {}
  virtual ~Presentation() = default;

  const Prime& prime() const noexcept { return p_; }
  // False for plain Z_(p)-modules, whose monomials never carry v1.
  bool v1_acts() const noexcept { return v1_acts_; }
  const std::string& name() const noexcept { return name_; }

  // All generators, respectively relations, of degree at most max_degree.
  virtual std::vector<Generator> generators(std::int64_t max_degree) const = 0;
  virtual std::vector<Relation> relations(std::int64_t max_degree) const = 0;

 private:
  Prime p_;
  bool v1_acts_;
  std::string name_;
};

using PresentationPtr = std::shared_ptr<const Presentation>;
using GeneratorEnum = std::function<std::vector<Generator>(std::int64_t)>;
using RelationEnum = std::function<std::vector<Relation>(std::int64_t)>;

class FamilyPresentation final : public Presentation {
 public:
  FamilyPresentation(Prime p, bool v1_acts, std::string name, GeneratorEnum g, RelationEnum r)
      : Presentation(p, v1_acts, std::move(name)), gens_(std::move(g)), rels_(std::move(r)) {}
  std::vector<Generator> generators(std::int64_t d) const override { return gens_(d); }
  std::vector<Relation> relations(std::int64_t d) const override { return rels_(d); }

 private:
  GeneratorEnum gens_;
  RelationEnum rels_;
};

inline PresentationPtr make_presentation(Prime p, bool v1_acts, std::string name, GeneratorEnum g, RelationEnum r) {
  return std::make_shared<FamilyPresentation>(p, v1_acts, std::move(name), std::move(g), std::move(r));
}

// Degree-d slice: basis monomials v1^b g (no p-powers) and the relation matrix
// with one row per basis monomial and one column per lifted relation.
struct Block {
  std::int64_t degree = 0;
  std::vector<Monomial> basis;
  std::unordered_map<GeneratorLabel, std::size_t, LabelHash> index;
  SparseMatrix relations;

  std::int64_t find(const GeneratorLabel& l) const {
    auto it = index.find(l);
    return it == index.end() ? -1 : std::int64_t(it->second);
  }
  std::size_t size() const noexcept { return basis.size(); }

  // Coordinates of a homogeneous sum of monomials multiplied by v1^extra_v1.
  SparseVec vectorize(const std::vector<Term>& terms, std::int64_t extra_v1, const Prime& p) const {
    SparseVec v;
    for (const auto& t : terms) {
      const auto pos = find(t.mono.gen.label);
      if (pos < 0) throw std::logic_error("generator " + t.mono.gen.label.str() + " absent from degree " +
                                          std::to_string(degree));
      if (basis[std::size_t(pos)].v1_exp != t.mono.v1_exp + extra_v1)
        throw std::logic_error("term " + t.mono.gen.label.str() + " has wrong degree for block " +
                               std::to_string(degree));
      std::int64_t c;
      if (__builtin_mul_overflow(t.coeff, ipow(p.value(), t.mono.p_exp), &c))
        throw std::overflow_error("coefficient overflow");
      v.emplace_back(std::uint32_t(pos), c);
    }
    normalize(v);
    return v;
  }

  SparseVec unit_vector(const GeneratorLabel& l) const {
    const auto pos = find(l);
    if (pos < 0) throw std::logic_error("generator " + l.str() + " absent from degree " + std::to_string(degree));
    return {{std::uint32_t(pos), 1}};
  }
};

// Generators and relations of a presentation up to a fixed degree, bucketed so
// that any block of degree at most max_degree can be assembled quickly.
class Truncation {
 public:
  Truncation(PresentationPtr pres, std::int64_t max_degree) : pres_(std::move(pres)), max_degree_(max_degree) {
    for (auto& g : pres_->generators(max_degree)) {
      if (g.degree < 0 && !pres_->v1_acts()) continue;
      if (g.degree <= max_degree) gens_[g.degree].push_back(std::move(g));
    }
    for (auto& r : pres_->relations(max_degree))
      if (r.degree() <= max_degree) rels_[r.degree()].push_back(std::move(r));
  }

  const Presentation& presentation() const noexcept { return *pres_; }
  const PresentationPtr& pointer() const noexcept { return pres_; }
  const Prime& prime() const noexcept { return pres_->prime(); }
  std::int64_t max_degree() const noexcept { return max_degree_; }

  Block block(std::int64_t d) const {
    if (d > max_degree_) throw std::out_of_range("degree " + std::to_string(d) + " beyond truncation");
    const Prime& p = prime();
    const bool poly = pres_->v1_acts();
    const std::int64_t step = v1_degree(p);
    Block b;
    b.degree = d;
    auto reaches = [&](std::int64_t e) { return poly ? (e <= d && (d - e) % step == 0) : e == d; };
    for (const auto& [e, gs] : gens_) {
      if (e > d) break;
      if (!reaches(e)) continue;
      for (const auto& g : gs) {
        const std::int64_t b_exp = poly ? (d - e) / step : 0;
        if (!b.index.emplace(g.label, b.basis.size()).second)
          throw std::logic_error("duplicate generator label " + g.label.str());
        b.basis.push_back(Monomial{0, b_exp, g});
      }
    }
    b.relations = SparseMatrix(b.basis.size());
    for (const auto& [e, rs] : rels_) {
      if (e > d) break;
      if (!reaches(e)) continue;
      const std::int64_t lift = poly ? (d - e) / step : 0;
      for (const auto& r : rs) b.relations.append(b.vectorize(r.terms(), lift, p));
    }
    return b;
  }

 private:
  PresentationPtr pres_;
  std::int64_t max_degree_;
  std::map<std::int64_t, std::vector<Generator>> gens_;
  std::map<std::int64_t, std::vector<Relation>> rels_;
};

inline AbelianGroup realize_block(const Block& b, const Prime& p) { return cokernel_p(b.relations, p); }

inline AbelianGroup realize_degree(const PresentationPtr& pres, std::int64_t d) {
  if (d < 0) throw std::invalid_argument("realize_degree: negative degree");
  return realize_block(Truncation(pres, d).block(d), pres->prime());
}

// Groups in degrees 0..max_degree, realized in parallel.
inline std::vector<AbelianGroup> realize_range(const PresentationPtr& pres, std::int64_t max_degree) {
  Truncation t(pres, max_degree);
  std::vector<AbelianGroup> out(std::size_t(max_degree + 1));
  parallel_for(out.size(), [&](std::size_t d) { out[d] = realize_block(t.block(std::int64_t(d)), pres->prime()); });
  return out;
}

// ---- element level helpers on a realized block ---------------------------

inline SparseMatrix single_column(std::size_t rows, const SparseVec& x) {
  SparseMatrix m(rows);
  m.append(x);
  return m;
}

inline bool is_zero_class(const Block& b, const SparseVec& x, const Prime& p) {
  return columns_in_image(b.relations, single_column(b.size(), x), p);
}

// Exponent e with the class of order p^e; nullopt when the class has infinite order.
inline std::optional<int> class_order(const SparseMatrix& rel, const SparseVec& x, const Prime& p) {
  const auto g = cokernel_p(rel, p);
  SparseMatrix joint = rel;
  joint.append(x);
  const auto q = cokernel_p(joint, p);
  if (q.free_rank() < g.free_rank()) return std::nullopt;
  return int(g.length() - q.length());
}

// ---- combinators ---------------------------------------------------------

inline Generator shifted(Generator g, std::int64_t t, const std::string& decor) {
  g.degree += t;
  g.label.decor += decor;
  return g;
}

inline Relation shifted(const Relation& r, std::int64_t t, const std::string& decor, const Prime& p) {
  std::vector<Term> ts = r.terms();
  for (auto& x : ts) x.mono.gen = shifted(x.mono.gen, t, decor);
  return Relation(std::move(ts), p);
}

inline std::string suspension_tag(std::int64_t t) { return t == 0 ? "" : "Σ" + std::to_string(t); }

// Suspension: the copy of pres moved up by t degrees.
inline PresentationPtr shift(const PresentationPtr& pres, std::int64_t t, std::string decor = {}) {
  if (decor.empty()) decor = suspension_tag(t);
  return make_presentation(
      pres->prime(), pres->v1_acts(), suspension_tag(t) + pres->name(),
      [pres, t, decor](std::int64_t d) {
        auto gs = pres->generators(d - t);
        for (auto& g : gs) g = shifted(std::move(g), t, decor);
        return gs;
      },
      [pres, t, decor](std::int64_t d) {
        std::vector<Relation> out;
        for (const auto& r : pres->relations(d - t)) out.push_back(shifted(r, t, decor, pres->prime()));
        return out;
      });
}

// Summand k is tagged "@k" so that equal labels in different summands stay apart.
inline PresentationPtr direct_sum(const std::vector<PresentationPtr>& parts, std::string name = "sum") {
  if (parts.empty()) throw std::invalid_argument("direct_sum of nothing; use zero_module");
  const Prime p = parts.front()->prime();
  const bool poly = parts.front()->v1_acts();
  for (const auto& q : parts) {
    if (!(q->prime() == p)) throw std::invalid_argument("direct_sum: mixed primes");
    if (q->v1_acts() != poly) throw std::invalid_argument("direct_sum: mixed base rings");
  }
  return make_presentation(
      p, poly, std::move(name),
      [parts](std::int64_t d) {
        std::vector<Generator> out;
        for (std::size_t k = 0; k < parts.size(); ++k)
          for (auto& g : parts[k]->generators(d)) out.push_back(shifted(std::move(g), 0, "@" + std::to_string(k)));
        return out;
      },
      [parts, p](std::int64_t d) {
        std::vector<Relation> out;
        for (std::size_t k = 0; k < parts.size(); ++k)
          for (const auto& r : parts[k]->relations(d)) out.push_back(shifted(r, 0, "@" + std::to_string(k), p));
        return out;
      });
}

inline PresentationPtr zero_module(Prime p, bool v1_acts = true) {
  return make_presentation(
      p, v1_acts, "0", [](std::int64_t) { return std::vector<Generator>{}; },
      [](std::int64_t) { return std::vector<Relation>{}; });
}

// pres plus a copy of pres suspended by sigma_degree, the copy's generators
// tagged with the exterior class.
inline PresentationPtr adjoin_exterior(const PresentationPtr& pres, std::int64_t sigma_degree,
                                       const GeneratorLabel& sigma) {
  const std::string tag = "·" + sigma.str();
  auto copy = shift(pres, sigma_degree, tag);
  return make_presentation(
      pres->prime(), pres->v1_acts(), pres->name() + "<" + sigma.str() + ">",
      [pres, copy](std::int64_t d) {
        auto out = pres->generators(d);
        for (auto& g : copy->generators(d)) out.push_back(std::move(g));
        return out;
      },
      [pres, copy](std::int64_t d) {
        auto out = pres->relations(d);
        for (auto& r : copy->relations(d)) out.push_back(std::move(r));
        return out;
      });
}

// pres with v1 forced to act by zero.
inline PresentationPtr quotient_by_v1(const PresentationPtr& pres) {
  if (!pres->v1_acts()) return pres;
  return make_presentation(
      pres->prime(), true, pres->name() + "/v1", [pres](std::int64_t d) { return pres->generators(d); },
      [pres](std::int64_t d) {
        auto out = pres->relations(d);
        const auto step = v1_degree(pres->prime());
        for (const auto& g : pres->generators(d - step))
          out.emplace_back(std::vector<Term>{term(1, g, 1)}, pres->prime());
        return out;
      });
}

// A Z_(p)-module given degreewise by explicit generators and relation columns.
class TablePresentation final : public Presentation {
 public:
  struct Slice {
    std::vector<GeneratorLabel> labels;
    SparseMatrix relations;  // rows = labels
  };

  TablePresentation(Prime p, std::string name, std::map<std::int64_t, Slice> slices)
      : Presentation(p, false, std::move(name)), slices_(std::move(slices)) {
    for (const auto& [d, s] : slices_)
      if (s.relations.rows != s.labels.size()) throw std::invalid_argument("table slice shape mismatch");
  }

  std::vector<Generator> generators(std::int64_t max_degree) const override {
    std::vector<Generator> out;
    for (const auto& [d, s] : slices_) {
      if (d > max_degree) break;
      for (const auto& l : s.labels) out.push_back({l, d});
    }
    return out;
  }

  std::vector<Relation> relations(std::int64_t max_degree) const override {
    std::vector<Relation> out;
    for (const auto& [d, s] : slices_) {
      if (d > max_degree) break;
      for (const auto& c : s.relations.cols) {
        if (c.empty()) continue;
        std::vector<Term> ts;
        for (const auto& [r, x] : c) ts.push_back(term(x, Generator{s.labels[r], d}));
        out.emplace_back(std::move(ts), prime());
      }
    }
    return out;
  }

  const std::map<std::int64_t, Slice>& slices() const noexcept { return slices_; }
  std::int64_t max_degree() const { return slices_.empty() ? -1 : slices_.rbegin()->first; }

 private:
  std::map<std::int64_t, Slice> slices_;
};

// ---- maps ----------------------------------------------------------------

// Homogeneous map given on generators; for modules over Z_(p)[v1] it is
// extended v1-linearly to monomials.
struct GradedMap {
  PresentationPtr source;
  PresentationPtr target;
  std::int64_t shift = 0;
  std::function<std::vector<Term>(const Generator&)> image;
  std::string name;
};

// Matrix of the map from block src (degree d) to block tgt (degree d + shift).
inline SparseMatrix map_matrix(const GradedMap& f, const Block& src, const Block& tgt, const Prime& p) {
  if (tgt.degree != src.degree + f.shift) throw std::invalid_argument("map_matrix: degree mismatch");
  SparseMatrix m(tgt.size());
  for (const auto& mono : src.basis) {
    auto img = f.image(mono.gen);
    m.append(img.empty() ? SparseVec{} : tgt.vectorize(img, mono.v1_exp, p));
  }
  return m;
}

// Multiplication by v1^k from block src to block tgt (degree src + k|v1|).
inline SparseMatrix v1_power_matrix(const Block& src, const Block& tgt, std::int64_t k) {
  SparseMatrix m(tgt.size());
  for (const auto& mono : src.basis) {
    SparseVec c;
    const auto pos = tgt.find(mono.gen.label);
    if (pos >= 0 && tgt.basis[std::size_t(pos)].v1_exp == mono.v1_exp + k) c.emplace_back(std::uint32_t(pos), 1);
    m.append(std::move(c));
  }
  return m;
}

// Smallest m with v1^m gen = 0, or nullopt when the tower never dies. A class
// whose v1-multiple becomes non-torsion is treated as v1-free: every model here
// is v1-torsion-free rationally.
inline std::optional<std::int64_t> v1_tower_order(const PresentationPtr& pres, const GeneratorLabel& gen,
                                                  std::int64_t max_steps = 100000) {
  const Prime& p = pres->prime();
  std::optional<Generator> g;
  for (std::int64_t bound = 64; !g && bound <= (std::int64_t{1} << 22); bound *= 2)
    for (const auto& x : pres->generators(bound))
      if (x.label == gen) {
        g = x;
        break;
      }
  if (!g) throw std::invalid_argument("v1_tower_order: unknown generator " + gen.str());
  const std::int64_t step = v1_degree(p);
  std::int64_t chunk = 64;
  std::int64_t m = 0;
  while (m < max_steps) {
    Truncation t(pres, g->degree + (m + chunk) * step);
    for (std::int64_t k = 0; k < chunk && m < max_steps; ++k, ++m) {
      const Block b = t.block(g->degree + m * step);
      const auto x = b.unit_vector(gen);
      const auto ord = class_order(b.relations, x, p);
      if (!ord) return std::nullopt;
      if (*ord == 0) return m;
      if (!pres->v1_acts()) return 1;
    }
    chunk *= 2;
  }
  throw std::runtime_error("v1_tower_order: no decision within step bound");
}

}  // namespace thh
