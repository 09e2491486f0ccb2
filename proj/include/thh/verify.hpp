#pragma once

// Verification harness: degreewise comparisons, rational ranks, structural
// properties of Brun runs, lemma scans and the low-degree ku check.

#include <algorithm>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "thh/arith.hpp"
#include "thh/brun.hpp"
#include "thh/catalog.hpp"
#include "thh/graded.hpp"
#include "thh/parallel.hpp"

namespace thh {

enum class Status { pass, fail, flagged };

inline std::string to_string(Status s) {
  return s == Status::pass ? "pass" : s == Status::fail ? "fail" : "flagged";
}

struct DegreeDiff {
  std::int64_t degree;
  std::string expected;
  std::string computed;
};

struct Report {
  Report() = default;
  Report(std::string check_, std::int64_t prime_, std::int64_t lo_, std::int64_t hi_)
      : check(std::move(check_)), prime(prime_), lo(lo_), hi(hi_) {}

  std::string check;
  std::int64_t prime = 0;
  std::int64_t lo = 0, hi = 0;
  Status status = Status::pass;
  std::vector<DegreeDiff> diffs;  // sorted by degree, smallest counterexample first
  std::vector<std::string> notes;
  std::vector<std::string> flags;  // discrepancies with the source text

  void fail(std::int64_t d, std::string expected, std::string computed) {
    status = Status::fail;
    diffs.push_back({d, std::move(expected), std::move(computed)});
  }
  void flag(std::string text) {
    flags.push_back(std::move(text));
    if (status == Status::pass) status = Status::flagged;
  }
  void finish() {
    std::stable_sort(diffs.begin(), diffs.end(), [](const auto& a, const auto& b) { return a.degree < b.degree; });
    if (!diffs.empty()) status = Status::fail;
  }
  bool ok() const { return status != Status::fail; }
};

namespace detail {

// Per-degree failures collected from parallel workers.
struct DiffSink {
  std::mutex mu;
  Report& report;
  void add(std::int64_t d, std::string e, std::string c) {
    std::lock_guard lock(mu);
    report.fail(d, std::move(e), std::move(c));
  }
};

inline SparseMatrix scalar_identity(std::size_t n, std::int64_t c) {
  SparseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.append({{std::uint32_t(i), c}});
  return m;
}

// Lattice generators of the torsion subgroup of coker(rel).
inline SparseMatrix torsion_generators(const SparseMatrix& rel, const Prime& p) {
  const auto g = cokernel_p(rel, p);
  if (g.torsion().empty()) return SparseMatrix(rel.rows);
  return kernel_generators(scalar_identity(rel.rows, ipow(p.value(), g.max_exponent())), rel.rows, rel, p);
}

inline SparseMatrix difference(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out(a.rows);
  for (std::size_t j = 0; j < a.ncols(); ++j) {
    SparseVec c = a.cols[j];
    for (const auto& [r, x] : b.cols[j]) c.emplace_back(r, -x);
    out.append(std::move(c));
  }
  return out;
}

inline SparseMatrix select_rows_cols(const SparseMatrix& m, const std::vector<std::size_t>& cols,
                                     const std::vector<std::size_t>& rows, std::size_t total_rows) {
  std::vector<std::int64_t> pos(total_rows, -1);
  for (std::size_t i = 0; i < rows.size(); ++i) pos[rows[i]] = std::int64_t(i);
  SparseMatrix out(rows.size());
  for (auto c : cols) {
    SparseVec v;
    for (const auto& [r, x] : m.cols[c])
      if (pos[r] >= 0) v.emplace_back(std::uint32_t(pos[r]), x);
    out.append(std::move(v));
  }
  return out;
}

}  // namespace detail

// ---- comparisons -----------------------------------------------------------

inline Report compare_groups(std::string name, const Prime& p, const std::vector<AbelianGroup>& computed,
                             const std::function<AbelianGroup(std::int64_t)>& expected) {
  Report r{std::move(name), p.value(), 0, std::int64_t(computed.size()) - 1};
  for (std::size_t d = 0; d < computed.size(); ++d) {
    const auto want = expected(std::int64_t(d));
    if (!(want == computed[d])) r.fail(std::int64_t(d), want.str(), computed[d].str());
  }
  r.finish();
  return r;
}

inline Report compare_degreewise(const PresentationPtr& a, const PresentationPtr& b, std::int64_t max_degree,
                                 std::string name = {}) {
  if (!(a->prime() == b->prime())) throw std::invalid_argument("compare_degreewise: different primes");
  if (name.empty()) name = "compare " + a->name() + " vs " + b->name();
  const auto ga = realize_range(a, max_degree);
  const auto gb = realize_range(b, max_degree);
  return compare_groups(std::move(name), a->prime(), ga, [&](std::int64_t d) { return gb[std::size_t(d)]; });
}

inline Report check_rational_ranks(const PresentationPtr& pres, const DimensionSeries& series, std::int64_t max_degree,
                                   std::string name = {}) {
  if (name.empty()) name = "rational ranks " + pres->name();
  const auto g = realize_range(pres, max_degree);
  const auto c = series.coefficients(max_degree);
  Report r{std::move(name), pres->prime().value(), 0, max_degree};
  for (std::int64_t d = 0; d <= max_degree; ++d)
    if (g[std::size_t(d)].free_rank() != c[std::size_t(d)])
      r.fail(d, "rank " + std::to_string(c[std::size_t(d)]), "rank " + std::to_string(g[std::size_t(d)].free_rank()));
  r.finish();
  return r;
}

// ---- Brun run properties ---------------------------------------------------

// Abutment length plus rule powers equals kernel plus cokernel length; ranks add.
inline Report length_consistency(const BrunRun& run) {
  Report r{"length consistency n=" + std::to_string(run.n) + " " + to_string(run.rule), run.p.value(), 0,
           run.max_degree};
  std::vector<std::int64_t> correction(run.degrees.size(), 0);
  for (const auto& e : run.extensions)
    if (e.degree >= 0 && e.degree <= run.max_degree) correction[std::size_t(e.degree)] += e.p_power;
  for (const auto& dd : run.degrees) {
    const auto lhs_len = dd.abutment.length() + correction[std::size_t(dd.degree)];
    const auto rhs_len = dd.kernel.length() + dd.cokernel.length();
    const auto rhs_rank = dd.kernel.free_rank() + dd.cokernel.free_rank();
    if (lhs_len != rhs_len || dd.abutment.free_rank() != rhs_rank)
      r.fail(dd.degree, "rank " + std::to_string(rhs_rank) + ", length " + std::to_string(rhs_len),
             "rank " + std::to_string(dd.abutment.free_rank()) + ", length " + std::to_string(lhs_len));
  }
  r.finish();
  return r;
}

// Well-definedness, d1 d1 = 0, torsion preservation and (when v1 acts)
// v1-linearity, over every degree of the run.
inline std::vector<Report> structural_checks(const BrunRun& run) {
  const Prime& p = run.p;
  const Truncation& tr = *run.e1_trunc;
  const std::int64_t D = run.max_degree;
  const bool poly = run.e1->v1_acts();
  const std::int64_t step = v1_degree(p);
  const std::string tag = " n=" + std::to_string(run.n) + " " + to_string(run.rule);
  Report wd{"d1 well defined" + tag, p.value(), 0, D}, sq{"d1 squares to zero" + tag, p.value(), 0, D},
      tor{"d1 preserves torsion" + tag, p.value(), 0, D}, lin{"d1 v1-linear" + tag, p.value(), 0, D};
  detail::DiffSink s_wd{{}, wd}, s_sq{{}, sq}, s_tor{{}, tor}, s_lin{{}, lin};
  parallel_for(std::size_t(D + 1), [&](std::size_t du) {
    const auto d = std::int64_t(du);
    if (d == 0) return;
    const Block b = tr.block(d), lo = tr.block(d - 1);
    const SparseMatrix f = map_matrix(run.d1, b, lo, p);
    if (!columns_in_image(lo.relations, f.multiply(b.relations), p))
      s_wd.add(d, "relations map into relations", "a relation maps to a nonzero class");
    if (d >= 2) {
      const Block lo2 = tr.block(d - 2);
      if (!columns_in_image(lo2.relations, map_matrix(run.d1, lo, lo2, p).multiply(f), p))
        s_sq.add(d, "d1 d1 = 0", "nonzero composite");
    }
    const SparseMatrix t = detail::torsion_generators(b.relations, p);
    SparseMatrix joint = lo.relations;
    joint.hcat(f.multiply(t));
    if (cokernel_p(joint, p).free_rank() != cokernel_p(lo.relations, p).free_rank())
      s_tor.add(d, "torsion image", "a torsion class maps to a non-torsion class");
    if (poly && d + step <= tr.max_degree()) {
      const Block up = tr.block(d + step), up_lo = tr.block(d + step - 1);
      const SparseMatrix lhs = map_matrix(run.d1, up, up_lo, p).multiply(v1_power_matrix(b, up, 1));
      const SparseMatrix rhs = v1_power_matrix(lo, up_lo, 1).multiply(f);
      if (!columns_in_image(up_lo.relations, detail::difference(lhs, rhs), p))
        s_lin.add(d, "d1 v1 = v1 d1", "commutator nonzero");
    }
  });
  std::vector<Report> out{wd, sq, tor};
  if (poly) out.push_back(lin);
  for (auto& r : out) r.finish();
  return out;
}

struct Prop47Outcome {
  Report report;
  std::optional<std::int64_t> first_failure_with_k_from_one;
};

// Torsion of ker d1 equals im(v1^p) plus the span of v1^j v0^k b_{p^k} (k >= k_min),
// torsion of coker d1 equals the coimage of v1^p on the sigma copy.
inline Prop47Outcome torsion_closed_form(const BrunRun& run) {
  if (run.rule != D1Case::n2_ell) throw std::invalid_argument("torsion_closed_form: needs the n2_ell run");
  const Prime& p = run.p;
  const Truncation& tr = *run.e1_trunc;
  const std::int64_t shiftp = p.value() * v1_degree(p);
  Prop47Outcome out{Report{"torsion closed form of ker/coker d1", p.value(), 0, run.max_degree}, std::nullopt};
  detail::DiffSink sink{{}, out.report};
  std::mutex mu;
  parallel_for(run.degrees.size(), [&](std::size_t du) {
    const auto& dd = run.degrees[du];
    const auto d = dd.degree;
    const Block b = tr.block(d);
    const std::size_t nn = dd.n_index.size();
    // image of v1^p on the non-sigma torsion
    SparseMatrix gens(nn);
    if (d - shiftp >= 0) {
      const auto& src = run.at(d - shiftp);
      const Block bs = tr.block(d - shiftp);
      const SparseMatrix t = detail::torsion_generators(src.rel_n, p);
      const SparseMatrix v = detail::select_rows_cols(v1_power_matrix(bs, b, p.value()), src.n_index, dd.n_index, b.size());
      gens.hcat(v.multiply(t));
    }
    auto with_m = [&](std::int64_t k_min) {
      SparseMatrix g = gens;
      const auto split = detail::split_block(b, run.n);
      for (std::int64_t k = k_min; ell_b(p, 1, k, k).degree <= d; ++k) {
        const auto src = ell_b(p, 1, k, k);
        if ((d - src.degree) % v1_degree(p) != 0) continue;
        const auto j = (d - src.degree) / v1_degree(p);
        if (j >= p.value()) continue;
        g.append(detail::localize(b.vectorize({term(1, src, j)}, 0, p), split.n_pos));
      }
      return g;
    };
    const auto ker_t = dd.kernel.torsion_part();
    const SparseMatrix g0 = with_m(0);
    if (!(subgroup_group(g0, dd.rel_n, p) == ker_t))
      sink.add(d, "ker torsion " + ker_t.str(), "closed form " + subgroup_group(g0, dd.rel_n, p).str());
    else if (!columns_in_image(dd.rel_s_below, dd.d1_in.multiply(g0), p))
      sink.add(d, "closed-form classes are cycles", "a closed-form class is not a cycle");
    if (!(subgroup_group(with_m(1), dd.rel_n, p) == ker_t)) {
      std::lock_guard lock(mu);
      if (!out.first_failure_with_k_from_one || d < *out.first_failure_with_k_from_one)
        out.first_failure_with_k_from_one = d;
    }
    // coimage of v1^p on the sigma copy
    const Block up = tr.block(d + shiftp);
    const auto sp = detail::split_block(b, run.n), su = detail::split_block(up, run.n);
    SparseMatrix rel_up(su.s_index.size());
    for (const auto& c : up.relations.cols)
      if (!c.empty() && su.s_pos[c.front().first] >= 0) rel_up.append(detail::localize(c, su.s_pos));
    const SparseMatrix ts = detail::torsion_generators(dd.rel_s, p);
    const SparseMatrix v = detail::select_rows_cols(v1_power_matrix(b, up, p.value()), sp.s_index, su.s_index, up.size());
    const auto coim = subgroup_group(v.multiply(ts), rel_up, p);
    if (!(coim == dd.cokernel.torsion_part()))
      sink.add(d, "coker torsion " + dd.cokernel.torsion_part().str(), "coimage " + coim.str());
  });
  out.report.finish();
  return out;
}

// ---- lemma scans on THH(l) ---------------------------------------------------

inline Report lemma_suite(const Prime& p, std::int64_t i_max) {
  if (i_max < 2) throw std::invalid_argument("lemma_suite: i_max >= 2 required");
  const DegreeTable t{p};
  const std::int64_t q = p.value(), step = v1_degree(p);
  Report r{"lemmas on THH(l), i <= " + std::to_string(i_max), q, t.b(1), t.b(i_max)};
  const auto ell = thh_ell(p);
  const Truncation tr(ell, t.b(i_max) + (q + 1) * step);
  detail::DiffSink sink{{}, r};

  // no nonzero torsion class in degree |b_i| dies under v1^{p-1}; if v1^{p+1} kills it so does v1^p
  auto torsion_kernel_length = [&](const Block& b, std::int64_t k) {
    const Block up = tr.block(b.degree + k * step);
    const auto g = cokernel_p(b.relations, p);
    if (g.torsion().empty()) return std::int64_t{0};
    SparseMatrix stacked(b.size() + up.size());
    const SparseMatrix v = v1_power_matrix(b, up, k);
    const std::int64_t big = ipow(q, g.max_exponent());
    for (std::size_t j = 0; j < b.size(); ++j) {
      SparseVec c{{std::uint32_t(j), big}};
      for (const auto& [row, x] : v.cols[j]) c.emplace_back(std::uint32_t(b.size() + row), x);
      stacked.append(std::move(c));
    }
    const SparseMatrix gens = kernel_generators(stacked, b.size(), block_diagonal(b.relations, up.relations), p);
    return subgroup_group(gens, b.relations, p).length();
  };
  std::vector<std::optional<int>> order_b(std::size_t(i_max + 1)), order_below(std::size_t(i_max + 1)),
      literal_b(std::size_t(i_max + 1));
  parallel_for(std::size_t(i_max), [&](std::size_t iu) {
    const std::int64_t i = std::int64_t(iu) + 1;
    const Block b = tr.block(t.b(i));
    if (torsion_kernel_length(b, q - 1) != 0)
      sink.add(t.b(i), "torsion of ker v1^(p-1) is 0", "nonzero torsion killed by v1^(p-1)");
    if (torsion_kernel_length(b, q + 1) != torsion_kernel_length(b, q))
      sink.add(t.b(i), "torsion ker v1^(p+1) = ker v1^p", "strictly larger");
    const auto s = split_p(i, p);
    // b_i is measured modulo im(v1^p), the part of its degree d1 kills anyway
    SparseMatrix mod_vp = b.relations;
    if (b.degree - q * step >= 0) mod_vp.hcat(v1_power_matrix(tr.block(b.degree - q * step), b, q));
    order_b[std::size_t(i)] = class_order(mod_vp, b.unit_vector(labels::b(s.alpha, s.n, 0)), p);
    order_below[std::size_t(i)] = class_order(b.relations, b.unit_vector(labels::b(s.alpha, s.n, s.n)), p);
    literal_b[std::size_t(i)] = class_order(b.relations, b.unit_vector(labels::b(s.alpha, s.n, 0)), p);
  });
  std::int64_t lemma44 = i_max;

  // degree inequality over 1 <= j <= i, 0 <= h <= nu(j). The pair j = i with
  // h >= 1 is not admissible: the tower of v0^h b_i is a proper tail of b_i's.
  std::int64_t lemma45 = 0, boundary = 0;
  auto tower_top = [&](std::int64_t j, std::int64_t h) {
    return t.b(j) + step * detail::geometric_tail(q, 1, nu_p(j, p) - h + 1);
  };
  for (std::int64_t i = 1; i <= i_max; ++i)
    for (std::int64_t j = 1; j <= i; ++j)
      for (std::int64_t h = 0; h <= nu_p(j, p); ++h) {
        const auto lo = t.b(j);  // |v0^h b_j| = |b_j|
        const auto hi = tower_top(j, h);
        if (!(lo <= t.b(i) && t.b(i) < hi)) continue;
        if (j == i && h >= 1) {
          ++boundary;
          continue;
        }
        ++lemma45;
        if (!(tower_top(i, 0) <= hi))
          sink.add(t.b(i), "tower of b_i ends below that of v0^h b_j (j=" + std::to_string(j) + ", h=" + std::to_string(h) + ")",
                   "inequality violated");
      }

  // p-orders of b_i against v0^{nu(i-1)} b_{i-1}
  std::int64_t lemma46 = 0, literal_mismatch = 0;
  for (std::int64_t i = 2; i <= i_max; ++i) {
    const auto a = order_b[std::size_t(i)], b = order_below[std::size_t(i - 1)];
    if (!a || !b) {
      sink.add(t.b(i), "torsion orders", "non-torsion class");
      continue;
    }
    std::int64_t k = 0, m = i;
    while (m % q == 0) {
      m /= q;
      ++k;
    }
    const bool power = m == 1;
    const int want = *b + (power ? 1 : 0);
    ++lemma46;
    if (literal_b[std::size_t(i)] != want) ++literal_mismatch;
    if (*a != want)
      sink.add(t.b(i), "ord(b_" + std::to_string(i) + ") = p^" + std::to_string(want), "p^" + std::to_string(*a));
  }

  // v0^h b_{alpha p^n} vanishes for h = n + 1
  std::int64_t dead = 0;
  for (const auto& g : ell->generators(t.b(i_max))) {
    if (g.label.name != labels::b(1, 0, 0).name || g.label.idx[2] != g.label.idx[1] + 1) continue;
    const Block b = tr.block(g.degree);
    ++dead;
    if (!is_zero_class(b, b.unit_vector(g.label), p)) sink.add(g.degree, g.label.str() + " = 0", "nonzero");
  }
  r.notes.push_back("tower-kernel checks in " + std::to_string(lemma44) + " degrees |b_i|");
  r.notes.push_back("degree inequality instances checked: " + std::to_string(lemma45));
  r.notes.push_back("pairs j = i, h >= 1 skipped: " + std::to_string(boundary));
  r.notes.push_back("order comparisons: " + std::to_string(lemma46) + " (without the im(v1^p) quotient " +
                    std::to_string(literal_mismatch) + " would differ)");
  r.notes.push_back("classes with h = n+1 checked zero: " + std::to_string(dead));
  r.finish();
  return r;
}

// ---- low-degree ku check ---------------------------------------------------------

inline Report low_degree_ku_check(std::int64_t max_degree = 8) {
  const Prime p(2);
  const auto reduced = thh_bp2_bp1_closed(p, false);
  Report r{"reduced THH(BP<2>;BP<1>) in low degrees", 2, 1, max_degree};
  const Truncation tr(reduced, max_degree);
  for (std::int64_t d = 1; d <= max_degree; ++d) {
    const auto got = realize_block(tr.block(d), p);
    const AbelianGroup want = d == 3 || d == 5 ? AbelianGroup::free(1) : d == 7 ? AbelianGroup::free(2) : AbelianGroup{};
    if (!(got == want)) r.fail(d, want.str(), got.str());
  }
  if (max_degree >= 7) {
    const Block b = tr.block(7);
    const GeneratorLabel a1{labels::a_pn(0).name, {0}, "@1"}, l1{labels::lambda(1).name, {}, "@1"};
    const Generator ga{a1, 7}, gl{l1, 3};
    if (!is_zero_class(b, b.vectorize({term(2, ga), term(-1, gl, 2)}, 0, p), p)) r.fail(7, "2 a1 = v1^2 λ1", "relation fails");
    if (is_zero_class(b, b.unit_vector(a1), p)) r.fail(7, "a1 nonzero", "a1 = 0");
    r.notes.push_back("2·a1 = v1^2·λ1 holds in degree 7");
  }
  r.finish();
  return r;
}

// ---- catalog consistency ---------------------------------------------------------

// THH(l; Z_(p)) against the cofiber of v1 on THH(l): lengths and ranks of
// coker(v1) in degree d plus ker(v1) from degree d - 2p + 1.
inline Report ell_cofiber_check(const Prime& p, std::int64_t max_degree) {
  Report r{"THH(l;Z) as cofiber of v1 on THH(l)", p.value(), 0, max_degree};
  const auto ell = thh_ell(p);
  const std::int64_t step = v1_degree(p);
  const Truncation tr(ell, max_degree + 1), tz(thh_ell_zp(p), max_degree);
  detail::DiffSink sink{{}, r};
  parallel_for(std::size_t(max_degree + 1), [&](std::size_t du) {
    const auto d = std::int64_t(du);
    std::int64_t len = 0, rank = 0;
    const Block b = tr.block(d);
    SparseMatrix c = b.relations;
    if (d - step >= 0) c.hcat(v1_power_matrix(tr.block(d - step), b, 1));
    const auto coker = cokernel_p(c, p);
    len += coker.length();
    rank += coker.free_rank();
    const std::int64_t src = d - 2 * p.value() + 1;
    if (src >= 0) {
      const Block bs = tr.block(src), bt = tr.block(src + step);
      const SparseMatrix k = kernel_generators(v1_power_matrix(bs, bt, 1), bs.size(), bt.relations, p);
      const auto ker = subgroup_group(k, bs.relations, p);
      len += ker.length();
      rank += ker.free_rank();
    }
    const auto want = realize_block(tz.block(d), p);
    if (want.length() != len || want.free_rank() != rank)
      sink.add(d, want.str() + " (rank " + std::to_string(want.free_rank()) + ", length " + std::to_string(want.length()) + ")",
               "rank " + std::to_string(rank) + ", length " + std::to_string(len));
  });
  r.finish();
  return r;
}

// Both readings of the integral table against the p-local formula, p <= 13, k <= 50.
inline Report thh_z_table_check() {
  Report r{"THH(Z) integral table against the p-local formula", 0, 0, 99};
  const std::int64_t primes[] = {2, 3, 5, 7, 11, 13};
  std::optional<std::pair<std::int64_t, std::int64_t>> printed_failure;
  for (auto q : primes) {
    const Prime p(q);
    for (std::int64_t k = 1; k <= 50; ++k) {
      const std::int64_t d = 2 * k - 1;
      const auto want = thh_z_p(d, p);
      if (!(thh_z_integral(d).localize(p) == want)) r.fail(d, want.str(), thh_z_integral(d).str() + " at p=" + std::to_string(q));
      if (!(thh_z_integral(d, ZTableReading::as_printed).localize(p) == want) && !printed_failure)
        printed_failure = {q, k};
    }
    if (!(thh_z_integral(0).localize(p) == thh_z_p(0, p))) r.fail(0, "Z", thh_z_integral(0).str());
  }
  if (printed_failure)
    r.flag("integral THH(Z) table: the printed Z/(k-1) in degree 2k-1 disagrees with the p-local formula (first at p=" +
           std::to_string(printed_failure->first) + ", k=" + std::to_string(printed_failure->second) +
           "); the cyclic group of order k is consistent and is used");
  r.finish();
  return r;
}

inline Report thc_z_check(std::int64_t max_degree = 100) {
  Report r{"THC(Z) from universal coefficients", 0, 0, max_degree};
  for (std::int64_t d = 0; d <= max_degree; ++d) {
    const auto g = thc_z(d);
    if (d == 0 && !(g == IntegralGroup{1, {}})) r.fail(d, "Z", g.str());
    if (d % 2 == 1 && !(g == IntegralGroup{})) r.fail(d, "0", g.str());
    if (d > 0 && d % 2 == 0 && !(g == cyclic_integral(d / 2))) r.fail(d, cyclic_integral(d / 2).str(), g.str());
  }
  for (std::int64_t q : {2, 3, 5, 7}) {
    const auto g = thc_z(2 * q).localize(Prime(q));
    if (!(g == AbelianGroup::cyclic(1))) r.fail(2 * q, "Z/p", g.str());
  }
  r.finish();
  return r;
}

inline Report series_duality_check(const Prime& p, std::int64_t max_degree) {
  Report r{"THH and THC of BP<n> with F_p coefficients agree dimensionwise", p.value(), 0, max_degree};
  for (int n = 0; n <= 3; ++n) {
    const auto a = thh_bpn_fp(n, p).coefficients(max_degree), b = thc_bpn_fp(n, p).coefficients(max_degree);
    for (std::int64_t d = 0; d <= max_degree; ++d)
      if (a[std::size_t(d)] != b[std::size_t(d)])
        r.fail(d, "n=" + std::to_string(n) + " dim " + std::to_string(a[std::size_t(d)]), std::to_string(b[std::size_t(d)]));
  }
  r.finish();
  return r;
}

// ---- suites ----------------------------------------------------------------------

struct SuiteOptions {
  std::optional<std::int64_t> prime;
  std::optional<std::int64_t> max_degree;
};

inline void append(std::vector<Report>& out, std::vector<Report> more) {
  for (auto& r : more) out.push_back(std::move(r));
}

inline std::vector<Report> brun_n0_reports(const Prime& p, std::int64_t D) {
  auto run = run_brun(0, p, D, D1Case::n0);
  const auto series = fp_mu_p_series(p).coefficients(D);
  std::vector<AbelianGroup> got;
  for (const auto& dd : run.degrees) got.push_back(dd.abutment);
  std::vector<Report> out{compare_groups("brun n=0 against F_p[μ^p]<σv0μ^(p-1)>", p, got, [&](std::int64_t d) {
    return AbelianGroup(0, std::vector<int>(std::size_t(series[std::size_t(d)]), 1));
  })};
  out.back().notes.push_back("extension rules: " + std::to_string(run.extensions.size()));
  append(out, structural_checks(run));
  out.push_back(length_consistency(run));
  return out;
}

inline std::vector<Report> brun_n1_reports(const Prime& p, std::int64_t D) {
  const DegreeTable t{p};
  const std::int64_t i_closed = 32;
  const std::int64_t window = std::max(D, t.b(i_closed) + 1);
  BrunOptions opt;
  opt.derive_against = thh_ell_zp(p);
  auto run = run_brun(1, p, window, D1Case::n1, opt);
  const Truncation tz(thh_ell_zp(p), D);
  std::vector<AbelianGroup> got;
  for (std::int64_t d = 0; d <= D; ++d) got.push_back(run.at(d).abutment);
  std::vector<Report> out{compare_groups("brun n=1 against THH(l;Z)", p, got,
                                         [&](std::int64_t d) { return realize_block(tz.block(d), p); })};
  for (const auto& note : run.notes) out.back().notes.push_back(note);
  Report kc{"brun n=1 kernels and cokernels, i <= 32", p.value(), t.a(1), t.b(i_closed)};
  for (std::int64_t i = 1; i <= i_closed; ++i) {
    const auto want = AbelianGroup::cyclic(nu_p(i, p) + 1);
    if (!(run.at(t.a(i)).kernel == want)) kc.fail(t.a(i), "ker " + want.str(), run.at(t.a(i)).kernel.str());
    if (!(run.at(t.b(i)).cokernel == want)) kc.fail(t.b(i), "coker " + want.str(), run.at(t.b(i)).cokernel.str());
  }
  kc.finish();
  out.push_back(kc);
  append(out, structural_checks(run));
  out.push_back(length_consistency(run));
  return out;
}

inline std::vector<Report> brun_n2_reports(const Prime& p, std::int64_t D) {
  auto run = run_brun(2, p, D, D1Case::n2_ell);
  std::vector<AbelianGroup> got;
  for (const auto& dd : run.degrees) got.push_back(dd.abutment);
  const auto closed = realize_range(thh_bp2_bp1_closed(p), D);
  std::vector<Report> out{compare_groups("brun n=2 against the closed form of THH(BP<2>;BP<1>)", p, got,
                                         [&](std::int64_t d) { return closed[std::size_t(d)]; })};
  auto& main = out.back();
  main.notes.push_back("extension rules applied: " + std::to_string(run.extensions.size()));
  auto closed_form = torsion_closed_form(run);
  const auto b1 = DegreeTable{p}.b(1);
  if (closed_form.first_failure_with_k_from_one && *closed_form.first_failure_with_k_from_one == b1 &&
      run.at(b1).kernel.length() > 0)
    main.flag("the submodule M must include k = 0: b_1 survives to E-infinity and carries p·b_1 = λ1σv2; with M "
              "generated from k >= 1 only, the kernel closed form fails first in degree " +
              std::to_string(b1));
  else
    main.fail(b1, "closed form fails without b_1 in M", "no such failure observed");
  out.push_back(std::move(closed_form.report));
  append(out, structural_checks(run));
  out.push_back(length_consistency(run));
  return out;
}

// The Z_(p)-coefficient d1 of the same sequence: structural properties, the
// i = 1 convention, and free ranks of E-infinity against THH(BP<2>; Z_(p)).
inline std::vector<Report> d1_n2_zp_reports(const Prime& p, std::int64_t D) {
  auto run = run_brun(2, p, D, D1Case::n2_zp);
  const auto target = realize_range(thh_bp2_zp(p), D);
  Report r{"d1 with Z_(p) coefficients", p.value(), 0, D};
  for (const auto& dd : run.degrees) {
    const auto rank = dd.kernel.free_rank() + dd.cokernel.free_rank();
    if (rank != target[std::size_t(dd.degree)].free_rank())
      r.fail(dd.degree, "rank " + std::to_string(target[std::size_t(dd.degree)].free_rank()), "rank " + std::to_string(rank));
  }
  r.flag("d1(a_1) and d1(b_1) are set to 0: the formulas are stated for all i >= 1 but there is no class of index 0");
  r.finish();
  std::vector<Report> out{r};
  append(out, structural_checks(run));
  return out;
}

inline std::vector<Report> suite_main(const SuiteOptions& o) {
  const Prime p(o.prime.value_or(2));
  std::vector<Report> out;
  append(out, brun_n2_reports(p, o.max_degree.value_or(400)));
  append(out, d1_n2_zp_reports(p, std::min<std::int64_t>(o.max_degree.value_or(400), 400)));
  append(out, brun_n1_reports(p, o.max_degree ? std::min<std::int64_t>(*o.max_degree, 200) : 200));
  if (o.prime) {
    append(out, brun_n0_reports(p, 100));
  } else {
    for (std::int64_t q : {2, 3, 5}) append(out, brun_n0_reports(Prime(q), 100));
  }
  return out;
}

inline std::vector<Report> suite_rational(const SuiteOptions& o) {
  const Prime p(o.prime.value_or(2));
  const std::int64_t D = o.max_degree.value_or(400);
  std::vector<Report> out;
  out.push_back(check_rational_ranks(thh_ell(p), rational_thh(1, 1, p), D));
  out.push_back(check_rational_ranks(thh_bp2_zp(p), rational_thh(2, 0, p), D));
  out.push_back(check_rational_ranks(thh_bp2_bp1_closed(p), rational_thh(2, 1, p), D));
  out.push_back(ell_cofiber_check(p, std::min<std::int64_t>(D, 400)));
  out.push_back(thh_z_table_check());
  out.push_back(thc_z_check());
  out.push_back(series_duality_check(p, D));
  return out;
}

inline std::vector<Report> suite_lemmas(const SuiteOptions& o) {
  std::vector<Report> out;
  if (o.prime) {
    out.push_back(lemma_suite(Prime(*o.prime), 200));
  } else {
    for (std::int64_t q : {2, 3}) out.push_back(lemma_suite(Prime(q), 200));
  }
  return out;
}

inline std::vector<Report> suite_ku(const SuiteOptions&) { return {low_degree_ku_check(8)}; }

inline std::vector<Report> run_suite(const std::string& name, const SuiteOptions& o = {}) {
  if (name == "main") return suite_main(o);
  if (name == "rational") return suite_rational(o);
  if (name == "lemmas") return suite_lemmas(o);
  if (name == "ku") return suite_ku(o);
  if (name == "all") {
    std::vector<Report> out;
    for (const char* s : {"main", "rational", "lemmas", "ku"}) append(out, run_suite(s, o));
    return out;
  }
  throw std::invalid_argument("unknown suite " + name);
}

inline bool all_ok(const std::vector<Report>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const Report& r) { return r.ok(); });
}

inline std::size_t flag_count(const std::vector<Report>& rs) {
  std::size_t n = 0;
  for (const auto& r : rs) n += r.flags.size();
  return n;
}

}  // namespace thh
