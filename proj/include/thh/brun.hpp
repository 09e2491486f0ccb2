#pragma once

// One-step Brun spectral sequence E1 = M<sigma v_n> => abutment, with the d1
// rules of the three coefficient levels, degreewise E-infinity and the
// extension problems resolved into an explicit degreewise presentation.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "thh/arith.hpp"
#include "thh/catalog.hpp"
#include "thh/graded.hpp"
#include "thh/parallel.hpp"

namespace thh {

enum class D1Case { n0, n1, n2_zp, n2_ell };

inline std::string to_string(D1Case c) {
  switch (c) {
    case D1Case::n0: return "n0";
    case D1Case::n1: return "n1";
    case D1Case::n2_zp: return "n2_zp";
    case D1Case::n2_ell: return "n2_ell";
  }
  return "?";
}

// Tag carried by every generator of the sigma copy.
inline std::string sigma_tag(int n) { return "·" + labels::sigma_v(n).str(); }

inline bool in_sigma_copy(const GeneratorLabel& l, int n) {
  const auto tag = sigma_tag(n);
  return l.decor.size() >= tag.size() && l.decor.compare(l.decor.size() - tag.size(), tag.size(), tag) == 0;
}

inline std::int64_t sigma_degree(int n, const Prime& p) { return 2 * ipow(p.value(), n) - 1; }

inline Generator sigma_copy(const Generator& g, int n, const Prime& p) {
  return shifted(g, sigma_degree(n, p), sigma_tag(n));
}

inline PresentationPtr build_e1(const PresentationPtr& m, int n) {
  return adjoin_exterior(m, sigma_degree(n, m->prime()), labels::sigma_v(n));
}

namespace detail {

inline std::vector<Term> times_p(std::vector<Term> ts, int e = 1) {
  for (auto& t : ts) t.mono.p_exp += e;
  return ts;
}
inline std::vector<Term> times_v1(std::vector<Term> ts, std::int64_t k) {
  for (auto& t : ts) t.mono.v1_exp += k;
  return ts;
}
inline std::vector<Term> negated(std::vector<Term> ts) {
  for (auto& t : ts) t.coeff = -t.coeff;
  return ts;
}

// d1 on v0^h b_{alpha p^n} in the Adams summand case.
inline std::vector<Term> d1_ell_b(const Prime& p, std::int64_t alpha, std::int64_t n, std::int64_t h) {
  const std::int64_t q = p.value();
  if (h == 0) {
    const std::int64_t i = alpha * ipow(q, n);
    if (i == 1) return {};
    const auto s = split_p(i - 1, p);
    return {term(1, sigma_copy(ell_b(p, s.alpha, s.n, s.n), 2, p))};
  }
  auto below = times_p(d1_ell_b(p, alpha, n, h - 1));
  const bool twisted = h == 1 && alpha % q == q - 1 && alpha >= 2 * q - 1;
  if (!twisted) return below;
  const auto bs = split_p((alpha + 1) / q - 1, p);
  auto far = negated(times_v1(d1_ell_b(p, bs.alpha, n + 1 + bs.n, bs.n), ipow(q, n + 2)));
  below.insert(below.end(), far.begin(), far.end());
  return below;
}

}  // namespace detail

// d1(mu^k) = k mu^{k-1} sigma v0.
inline GradedMap d1_n0(const Prime& p, const PresentationPtr& e1) {
  return {e1, e1, -1,
          [p](const Generator& g) -> std::vector<Term> {
            if (in_sigma_copy(g.label, 0) || g.label.name != labels::mu(0).name) return {};
            const std::int64_t k = g.label.idx.at(0);
            if (k % p.value() == 0) return {};
            return {term(k, sigma_copy({labels::mu(k - 1), 2 * (k - 1)}, 0, p))};
          },
          "d1_n0"};
}

// d1(lambda1 mu^k) = p^{nu(k)} lambda1 mu^{k-1} sigma v1; zero for k = 0 and on the unit.
inline GradedMap d1_n1(const Prime& p, const PresentationPtr& e1) {
  const std::int64_t q = p.value();
  return {e1, e1, -1,
          [p, q](const Generator& g) -> std::vector<Term> {
            if (in_sigma_copy(g.label, 1) || g.label.name != labels::lambda1_mu(0).name) return {};
            const std::int64_t k = g.label.idx.at(0);
            if (k == 0) return {};
            const Generator t{labels::lambda1_mu(k - 1), 2 * q * k - 1};
            return {term(1, sigma_copy(t, 1, p), 0, nu_p(k, p))};
          },
          "d1_n1"};
}

// d1(a_i) = p^{nu(i-1)} a_{i-1} sigma v2 and likewise for b_i; i = 1 maps to zero.
inline GradedMap d1_n2_zp(const Prime& p, const PresentationPtr& e1) {
  const DegreeTable t{p};
  return {e1, e1, -1,
          [p, t](const Generator& g) -> std::vector<Term> {
            if (in_sigma_copy(g.label, 2)) return {};
            const bool is_a = g.label.name == labels::a_i(0).name;
            const bool is_b = g.label.name == labels::b_i(0).name;
            if (!is_a && !is_b) return {};
            const std::int64_t i = g.label.idx.at(0);
            if (i == 1) return {};
            const Generator below = is_a ? Generator{labels::a_i(i - 1), t.a(i - 1)}
                                         : Generator{labels::b_i(i - 1), t.b(i - 1)};
            return {term(1, sigma_copy(below, 2, p), 0, nu_p(i - 1, p))};
          },
          "d1_n2_zp"};
}

// v1-linear d1 on THH(l)<sigma v2>; b_1, the non-torsion classes and the
// sigma copy are cycles.
inline GradedMap d1_n2_ell(const Prime& p, const PresentationPtr& e1) {
  return {e1, e1, -1,
          [p](const Generator& g) -> std::vector<Term> {
            if (in_sigma_copy(g.label, 2) || g.label.name != labels::b(1, 0, 0).name) return {};
            const auto& ix = g.label.idx;
            return detail::d1_ell_b(p, ix.at(0), ix.at(1), ix.at(2));
          },
          "d1_n2_ell"};
}

enum class RuleOrigin { given, derived };

struct ExtensionRule {
  std::int64_t degree = 0;
  std::vector<Term> source;  // non-sigma copy
  std::vector<Term> target;  // sigma copy
  int p_power = 1;           // p^p_power * lift(source) = target
  RuleOrigin origin = RuleOrigin::given;
};

inline std::string terms_str(const std::vector<Term>& ts) {
  std::string s;
  for (const auto& t : ts) {
    if (!s.empty()) s += " + ";
    if (t.coeff != 1) s += std::to_string(t.coeff) + "·";
    if (t.mono.p_exp) s += "p^" + std::to_string(t.mono.p_exp) + "·";
    if (t.mono.v1_exp) s += "v1^" + std::to_string(t.mono.v1_exp) + "·";
    s += t.mono.gen.label.str();
  }
  return s.empty() ? "0" : s;
}

// p v1^j v0^k b_{p^k} = v1^j (lambda1 sigma v2) for k = 0, and
// v1^{j + p^{k+1} - p} v0^{k-1} a_{p^{k-1}} sigma v2 for k >= 1; 0 <= j < p.
inline std::vector<ExtensionRule> extension_rules_n2(const Prime& p, std::int64_t max_degree) {
  const std::int64_t q = p.value();
  const std::int64_t step = v1_degree(p);
  std::vector<ExtensionRule> out;
  for (std::int64_t k = 0; ell_b(p, 1, k, k).degree <= max_degree; ++k)
    for (std::int64_t j = 0; j < q; ++j) {
      const Generator src = ell_b(p, 1, k, k);
      const std::int64_t d = src.degree + j * step;
      if (d > max_degree) break;
      ExtensionRule r;
      r.degree = d;
      r.source = {term(1, src, j)};
      r.target = k == 0 ? std::vector<Term>{term(1, sigma_copy(ell_lambda1(p), 2, p), j)}
                        : std::vector<Term>{term(1, sigma_copy(ell_a(p, k - 1), 2, p), j + ipow(q, k + 1) - q)};
      r.p_power = 1;
      out.push_back(std::move(r));
    }
  return out;
}

// Degreewise data of a run. Coordinates: N = non-sigma basis of the block,
// S = sigma basis. All matrices are in those local coordinates.
struct DegreeData {
  std::int64_t degree = 0;
  std::vector<std::size_t> n_index, s_index;  // positions in the E1 block
  SparseMatrix rel_n, rel_s;                  // relations of each copy
  SparseMatrix d1_in;                         // N_d -> S_{d-1}
  SparseMatrix rel_s_below;                   // relations of S_{d-1}
  SparseMatrix d1_out;                        // N_{d+1} -> S_d
  SparseMatrix cycles;                        // kernel lattice generators in N_d
  AbelianGroup kernel, cokernel, abutment;
  TablePresentation::Slice abutment_slice;
  std::vector<std::size_t> rules;             // indices into BrunRun::extensions
};

struct BrunRun {
  int n = 0;
  Prime p{2};
  D1Case rule = D1Case::n2_ell;
  std::int64_t max_degree = 0;
  PresentationPtr m, e1;
  std::shared_ptr<Truncation> e1_trunc;
  GradedMap d1;
  std::vector<DegreeData> degrees;  // index = degree, 0..max_degree
  std::vector<ExtensionRule> extensions;
  std::shared_ptr<TablePresentation> abutment;
  std::vector<std::string> notes;

  const DegreeData& at(std::int64_t d) const { return degrees.at(std::size_t(d)); }
};

inline std::pair<AbelianGroup, AbelianGroup> kernel_cokernel(const BrunRun& run, std::int64_t d) {
  if (d < 0 || d > run.max_degree) throw std::out_of_range("kernel_cokernel: degree outside the window");
  return {run.at(d).kernel, run.at(d).cokernel};
}

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline SparseMatrix restrict(const SparseMatrix& m, const std::vector<std::size_t>& cols,
                             const std::vector<std::int64_t>& row_map, std::size_t new_rows) {
  SparseMatrix out(new_rows);
  for (auto c : cols) {
    SparseVec v;
    for (const auto& [r, x] : m.cols[c]) {
      if (row_map[r] < 0) throw StructuralError("d1 leaves the expected copy");
      v.emplace_back(std::uint32_t(row_map[r]), x);
    }
    out.append(std::move(v));
  }
  return out;
}

struct Split {
  std::vector<std::size_t> n_index, s_index;
  std::vector<std::int64_t> n_pos, s_pos;  // block position -> local, -1 if other copy
};

inline Split split_block(const Block& b, int n) {
  Split s;
  s.n_pos.assign(b.size(), -1);
  s.s_pos.assign(b.size(), -1);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (in_sigma_copy(b.basis[i].gen.label, n)) {
      s.s_pos[i] = std::int64_t(s.s_index.size());
      s.s_index.push_back(i);
    } else {
      s.n_pos[i] = std::int64_t(s.n_index.size());
      s.n_index.push_back(i);
    }
  }
  return s;
}

inline SparseVec localize(const SparseVec& v, const std::vector<std::int64_t>& pos) {
  SparseVec out;
  for (const auto& [r, x] : v) {
    if (pos[r] < 0) throw StructuralError("vector leaves the expected copy");
    out.emplace_back(std::uint32_t(pos[r]), x);
  }
  normalize(out);
  return out;
}

inline std::string monomial_str(const Monomial& m) {
  return (m.v1_exp ? "v1^" + std::to_string(m.v1_exp) + "·" : std::string()) + m.gen.label.str();
}

// Row label of a lattice vector: its leading basis monomial (lowest valuation,
// then lowest position), keyed by generator and v1-exponent for charting.
inline GeneratorLabel lead_label(const SparseVec& v, const Block& b, const std::vector<std::size_t>& index,
                                 const Prime& p, const std::string& decor) {
  if (v.empty()) return {"0", {}, decor};
  std::size_t best = 0;
  int best_val = 1 << 30;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const int e = nu_p(v[k].second, p);
    if (e < best_val) {
      best_val = e;
      best = k;
    }
  }
  const auto& mono = b.basis[index[v[best].first]];
  return {mono.gen.label.str(), {mono.v1_exp}, decor};
}

inline void uniquify(std::vector<GeneratorLabel>& ls) {
  std::set<GeneratorLabel> seen;
  for (auto& l : ls) {
    std::string base = l.decor;
    for (int k = 1; !seen.insert(l).second; ++k) l.decor = base + "#" + std::to_string(k);
  }
}

}  // namespace detail

// Assembles the abutment in degree d from E-infinity data and the rules
// applying in that degree. Throws StructuralError when a rule is inapplicable.
inline void assemble_degree(const BrunRun& run, DegreeData& dd, const Block& b) {
  const Prime& p = run.p;
  const auto split = detail::split_block(b, run.n);
  SparseMatrix sources(dd.n_index.size()), targets(dd.s_index.size());
  std::vector<int> powers;
  for (auto ri : dd.rules) {
    const auto& r = run.extensions[ri];
    sources.append(detail::localize(b.vectorize(r.source, 0, p), split.n_pos));
    targets.append(detail::localize(b.vectorize(r.target, 0, p), split.s_pos));
    powers.push_back(r.p_power);
  }
  // quotient of the cycles by the rule sources
  SparseMatrix rel_with_sources = dd.rel_n;
  rel_with_sources.hcat(sources);
  const SparseMatrix q = subgroup_relations(dd.cycles, rel_with_sources, p);
  // the sigma part with the lifts glued in
  const std::size_t s_dim = dd.s_index.size(), r_count = powers.size();
  SparseMatrix coker_rel = dd.rel_s;
  coker_rel.hcat(dd.d1_out);
  SparseMatrix glue(s_dim + r_count);
  for (const auto& c : coker_rel.cols) glue.append(c);
  for (std::size_t j = 0; j < r_count; ++j) {
    SparseVec c = scaled(targets.cols[j], -1);
    c.emplace_back(std::uint32_t(s_dim + j), ipow(p.value(), powers[j]));
    glue.append(std::move(c));
  }
  if (r_count) {
    for (std::size_t j = 0; j < r_count; ++j) {
      const auto& r = run.extensions[dd.rules[j]];
      SparseMatrix src(dd.n_index.size());
      src.append(sources.cols[j]);
      if (!columns_in_image(dd.rel_s_below, dd.d1_in.multiply(src), p))
        throw StructuralError("extension source " + terms_str(r.source) + " is not a cycle");
      if (class_order(coker_rel, targets.cols[j], p).has_value())
        throw StructuralError("extension target " + terms_str(r.target) + " is torsion in E-infinity");
    }
    SparseMatrix ker_rel = subgroup_relations(dd.cycles, dd.rel_n, p);
    AbelianGroup expected_split = cokernel_p(q, p);
    for (int e : powers) expected_split = expected_split + AbelianGroup::cyclic(e);
    if (!(cokernel_p(ker_rel, p) == expected_split))
      throw StructuralError("extension sources in degree " + std::to_string(dd.degree) +
                            " do not split off cyclic summands of the stated orders");
  }
  dd.abutment = cokernel_p(q, p) + cokernel_p(glue, p);
  // slice for the abutment presentation
  TablePresentation::Slice slice;
  for (const auto& c : dd.cycles.cols) slice.labels.push_back(detail::lead_label(c, b, dd.n_index, p, ""));
  for (auto i : dd.s_index) slice.labels.push_back({b.basis[i].gen.label.str(), {b.basis[i].v1_exp}, ""});
  for (std::size_t j = 0; j < r_count; ++j)
    slice.labels.push_back(detail::lead_label(sources.cols[j], b, dd.n_index, p, "~"));
  detail::uniquify(slice.labels);
  SparseMatrix full = block_diagonal(q, glue);
  slice.relations = std::move(full);
  dd.abutment_slice = std::move(slice);
}

struct BrunOptions {
  // Expected abutment used to derive extensions by search (n = 1 only).
  PresentationPtr derive_against;
  // Rules replacing the built-in ones when set (negative controls).
  std::optional<std::vector<ExtensionRule>> rules_override;
};

inline BrunRun run_brun(int n, const Prime& p, std::int64_t max_degree, D1Case rule, BrunOptions opt = {}) {
  if (max_degree < 2 * ipow(p.value(), n)) throw std::invalid_argument("run_brun: window below 2p^n");
  BrunRun run;
  run.n = n;
  run.p = p;
  run.rule = rule;
  run.max_degree = max_degree;
  switch (rule) {
    case D1Case::n0: run.m = thh_fp_module(p); break;
    case D1Case::n1: run.m = thh_z_module(p); break;
    case D1Case::n2_zp: run.m = thh_ell_zp(p); break;
    case D1Case::n2_ell: run.m = thh_ell(p); break;
  }
  const int expected_n = rule == D1Case::n0 ? 0 : rule == D1Case::n1 ? 1 : 2;
  if (n != expected_n) throw std::invalid_argument("run_brun: rule " + to_string(rule) + " needs n = " + std::to_string(expected_n));
  run.e1 = build_e1(run.m, n);
  switch (rule) {
    case D1Case::n0: run.d1 = d1_n0(p, run.e1); break;
    case D1Case::n1: run.d1 = d1_n1(p, run.e1); break;
    case D1Case::n2_zp: run.d1 = d1_n2_zp(p, run.e1); break;
    case D1Case::n2_ell: run.d1 = d1_n2_ell(p, run.e1); break;
  }
  const std::int64_t margin = sigma_degree(n, p) + v1_degree(p) * p.value();
  run.e1_trunc = std::make_shared<Truncation>(run.e1, max_degree + 1 + margin);
  const Truncation& tr = *run.e1_trunc;

  if (opt.rules_override)
    run.extensions = *opt.rules_override;
  else if (rule == D1Case::n2_ell)
    run.extensions = extension_rules_n2(p, max_degree);

  run.degrees.resize(std::size_t(max_degree + 1));
  std::vector<Block> blocks(std::size_t(max_degree + 2));
  parallel_for(blocks.size(), [&](std::size_t d) { blocks[d] = tr.block(std::int64_t(d)); });

  // E-infinity, degree by degree
  parallel_for(run.degrees.size(), [&](std::size_t d) {
    DegreeData& dd = run.degrees[d];
    dd.degree = std::int64_t(d);
    const Block& b = blocks[d];
    const auto sp = detail::split_block(b, n);
    dd.n_index = sp.n_index;
    dd.s_index = sp.s_index;
    dd.rel_n = SparseMatrix(sp.n_index.size());
    dd.rel_s = SparseMatrix(sp.s_index.size());
    for (const auto& c : b.relations.cols) {
      if (c.empty()) continue;
      const bool sig = sp.s_pos[c.front().first] >= 0;
      (sig ? dd.rel_s : dd.rel_n).append(detail::localize(c, sig ? sp.s_pos : sp.n_pos));
    }
    // d1 into degree d-1
    if (d >= 1) {
      const Block& lo = blocks[d - 1];
      const auto sl = detail::split_block(lo, n);
      const SparseMatrix f = map_matrix(run.d1, b, lo, p);
      for (auto i : sp.s_index)
        if (!f.cols[i].empty()) throw StructuralError("d1 is nonzero on the sigma copy");
      dd.d1_in = detail::restrict(f, sp.n_index, sl.s_pos, sl.s_index.size());
      dd.rel_s_below = SparseMatrix(sl.s_index.size());
      for (const auto& c : lo.relations.cols)
        if (!c.empty() && sl.s_pos[c.front().first] >= 0) dd.rel_s_below.append(detail::localize(c, sl.s_pos));
      dd.cycles = kernel_generators(dd.d1_in, sp.n_index.size(), dd.rel_s_below, p);
    } else {
      dd.d1_in = SparseMatrix(0);
      dd.d1_in.cols.resize(sp.n_index.size());
      dd.rel_s_below = SparseMatrix(0);
      dd.cycles = SparseMatrix(sp.n_index.size());
      for (std::size_t i = 0; i < sp.n_index.size(); ++i) dd.cycles.append({{std::uint32_t(i), 1}});
    }
    // d1 out of degree d+1
    {
      const Block& hi = blocks[d + 1];
      const auto sh = detail::split_block(hi, n);
      const SparseMatrix f = map_matrix(run.d1, hi, b, p);
      dd.d1_out = detail::restrict(f, sh.n_index, sp.s_pos, sp.s_index.size());
    }
    dd.kernel = subgroup_group(dd.cycles, dd.rel_n, p);
    SparseMatrix c = dd.rel_s;
    c.hcat(dd.d1_out);
    dd.cokernel = cokernel_p(c, p);
  });

  // extension problems, sequentially
  for (std::size_t j = 0; j < run.extensions.size(); ++j) {
    const auto d = run.extensions[j].degree;
    if (d < 0 || d > max_degree) throw StructuralError("extension rule outside the window");
    run.degrees[std::size_t(d)].rules.push_back(j);
  }
  std::optional<Truncation> expected;
  if (opt.derive_against) expected.emplace(opt.derive_against, max_degree);
  for (std::size_t d = 0; d < run.degrees.size(); ++d) {
    DegreeData& dd = run.degrees[d];
    assemble_degree(run, dd, blocks[d]);
    if (!expected) continue;
    const AbelianGroup want = realize_block(expected->block(std::int64_t(d)), p);
    if (dd.abutment == want) continue;
    // search one rule: a basis cycle of order p^e against a free sigma class
    const Block& b = blocks[d];
    const auto sp = detail::split_block(b, n);
    SparseMatrix coker_rel = dd.rel_s;
    coker_rel.hcat(dd.d1_out);
    bool found = false;
    for (std::size_t si = 0; si < sp.n_index.size() && !found; ++si) {
      const SparseVec src{{std::uint32_t(si), 1}};
      SparseMatrix one(sp.n_index.size());
      one.append(src);
      if (!columns_in_image(dd.rel_s_below, dd.d1_in.multiply(one), p)) continue;
      const auto ord = class_order(dd.rel_n, src, p);
      if (!ord || *ord == 0) continue;
      for (std::size_t ti = 0; ti < sp.s_index.size() && !found; ++ti) {
        const SparseVec tgt{{std::uint32_t(ti), 1}};
        if (class_order(coker_rel, tgt, p)) continue;
        ExtensionRule r;
        r.degree = std::int64_t(d);
        r.source = {Term{1, b.basis[sp.n_index[si]]}};
        r.target = {Term{1, b.basis[sp.s_index[ti]]}};
        r.p_power = *ord;
        r.origin = RuleOrigin::derived;
        run.extensions.push_back(r);
        dd.rules.push_back(run.extensions.size() - 1);
        try {
          DegreeData trial = dd;
          assemble_degree(run, trial, b);
          if (trial.abutment == want) {
            dd = std::move(trial);
            found = true;
            run.notes.push_back("derived extension in degree " + std::to_string(d) + ": p^" + std::to_string(r.p_power) +
                                "·" + terms_str(r.source) + " = " + terms_str(r.target));
            continue;
          }
        } catch (const StructuralError&) {
        }
        dd.rules.pop_back();
        run.extensions.pop_back();
      }
    }
  }

  std::map<std::int64_t, TablePresentation::Slice> slices;
  for (const auto& dd : run.degrees) slices[dd.degree] = dd.abutment_slice;
  run.abutment = std::make_shared<TablePresentation>(p, "abutment(n=" + std::to_string(n) + ")", std::move(slices));
  return run;
}

}  // namespace thh
