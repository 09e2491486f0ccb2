#pragma once

// Closed-form models: THH of the small truncated Brown-Peterson spectra with
// various coefficients, as presentations or as dimension series.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thh/arith.hpp"
#include "thh/graded.hpp"

namespace thh {

namespace labels {
inline GeneratorLabel unit() { return {"1", {}, ""}; }
inline GeneratorLabel lambda(int s) { return {"λ" + std::to_string(s), {}, ""}; }
inline GeneratorLabel lambda12() { return {"λ1λ2", {}, ""}; }
inline GeneratorLabel sigma_v(int n) { return {"σv" + std::to_string(n), {}, ""}; }
// v0^n a_{p^n}
inline GeneratorLabel a_pn(std::int64_t n) { return {"v0a", {n}, ""}; }
// v0^h b_{alpha p^n}
inline GeneratorLabel b(std::int64_t alpha, std::int64_t n, std::int64_t h) { return {"v0b", {alpha, n, h}, ""}; }
inline GeneratorLabel c(std::int64_t alpha, std::int64_t n, std::int64_t h) { return {"v0c", {alpha, n, h}, ""}; }
inline GeneratorLabel a_i(std::int64_t i) { return {"a", {i}, ""}; }
inline GeneratorLabel b_i(std::int64_t i) { return {"b", {i}, ""}; }
inline GeneratorLabel mu(std::int64_t k) { return {"μ", {k}, ""}; }
inline GeneratorLabel lambda1_mu(std::int64_t k) { return {"λ1μ", {k}, ""}; }
// torsion classes of THH(BP<2>; Z_(p)): lambda-part tag 0..3 over index i
inline GeneratorLabel t_bp2(std::int64_t i, std::int64_t tag) { return {"t", {i, tag}, ""}; }
}  // namespace labels

// i = alpha * p^n with p not dividing alpha.
struct PAdicSplit {
  std::int64_t alpha;
  int n;
};
inline PAdicSplit split_p(std::int64_t i, const Prime& p) {
  if (i <= 0) throw std::domain_error("split_p: index must be positive");
  PAdicSplit s{i, 0};
  while (s.alpha % p.value() == 0) {
    s.alpha /= p.value();
    ++s.n;
  }
  return s;
}

namespace detail {

// p + p^2 + ... + p^top (zero when top < 1).
inline std::int64_t geometric_tail(std::int64_t p, std::int64_t from, std::int64_t top) {
  std::int64_t s = 0;
  for (std::int64_t k = from; k <= top; ++k) s += ipow(p, k);
  return s;
}

// Index triples (alpha, n, h) of a b- or c-type family below a degree bound.
// deg(alpha, n) must be increasing in both alpha and n.
template <class Deg, class Emit>
void for_each_family(const Prime& p, std::int64_t max_degree, int n_min, int h_extra, Deg deg, Emit emit) {
  const std::int64_t q = p.value();
  for (int n = n_min; deg(1, n) <= max_degree; ++n)
    for (std::int64_t alpha = 1; deg(alpha, n) <= max_degree; ++alpha) {
      if (alpha % q == 0) continue;
      for (int h = 0; h <= n + h_extra; ++h) emit(alpha, n, h);
    }
}

// Relations of the b-family (h_extra = 1, n_min = 0, v1-exponents from p) or
// the c-family (h_extra = 0, n_min = 1, v1-exponents from p^2).
inline void tower_family_relations(const Prime& p, std::int64_t max_degree, bool c_family,
                                   const std::function<Generator(std::int64_t, std::int64_t, std::int64_t)>& gen,
                                   std::vector<Relation>& out) {
  const std::int64_t q = p.value();
  const int n_min = c_family ? 1 : 0;
  const int h_extra = c_family ? 0 : 1;
  const int tail_from = c_family ? 2 : 1;
  auto deg = [&](std::int64_t alpha, int n) { return gen(alpha, n, 0).degree; };
  for_each_family(p, max_degree, n_min, h_extra, deg, [&](std::int64_t alpha, int n, int h) {
    const Generator g = gen(alpha, n, h);
    const int top = n + h_extra;
    if (h == top) {
      out.emplace_back(std::vector<Term>{term(1, g)}, p);
      return;
    }
    // v1-tower bound; h ranges below top here
    out.emplace_back(std::vector<Term>{term(1, g, geometric_tail(q, tail_from, n - h + 1))}, p);
    const Generator up = gen(alpha, n, h + 1);
    const bool twisted = h == 0 && alpha % q == q - 1 && alpha >= 2 * q - 1;
    if (twisted) {
      const std::int64_t beta = (alpha + 1) / q - 1;
      const auto bs = split_p(beta, p);
      const Generator far = gen(bs.alpha, n + 1 + bs.n, bs.n);
      out.emplace_back(std::vector<Term>{term(1, g, 0, 1), term(-1, up), term(-1, far, ipow(q, n + 2))}, p);
    } else {
      out.emplace_back(std::vector<Term>{term(1, g, 0, 1), term(-1, up)}, p);
    }
  });
}

inline std::vector<Generator> tower_family_generators(
    const Prime& p, std::int64_t max_degree, bool c_family,
    const std::function<Generator(std::int64_t, std::int64_t, std::int64_t)>& gen) {
  std::vector<Generator> out;
  auto deg = [&](std::int64_t alpha, int n) { return gen(alpha, n, 0).degree; };
  for_each_family(p, max_degree, c_family ? 1 : 0, c_family ? 0 : 1, deg,
                  [&](std::int64_t alpha, int n, int h) { out.push_back(gen(alpha, n, h)); });
  return out;
}

}  // namespace detail

// ---- THH(l): the Adams summand ------------------------------------------

inline Generator ell_b(const Prime& p, std::int64_t alpha, std::int64_t n, std::int64_t h) {
  return {labels::b(alpha, n, h), DegreeTable{p}.b_alpha(alpha, int(n))};
}
inline Generator ell_a(const Prime& p, std::int64_t n) { return {labels::a_pn(n), DegreeTable{p}.a_pn(int(n))}; }
inline Generator ell_lambda1(const Prime& p) { return {labels::lambda(1), DegreeTable{p}.lambda(1)}; }

// The non-torsion a-family: generators v0^n a_{p^n} (and lambda1 when
// with_lambda), p a_1 = v1^p lambda1 (only with lambda1) and
// p v0^n a_{p^n} = v1^{p^{n+1}} v0^{n-1} a_{p^{n-1}}.
inline PresentationPtr a_family(Prime p, bool with_lambda, std::string name) {
  return make_presentation(
      p, true, std::move(name),
      [p, with_lambda](std::int64_t D) {
        std::vector<Generator> out;
        if (with_lambda && ell_lambda1(p).degree <= D) out.push_back(ell_lambda1(p));
        for (std::int64_t n = 0; ell_a(p, n).degree <= D; ++n) out.push_back(ell_a(p, n));
        return out;
      },
      [p, with_lambda](std::int64_t D) {
        std::vector<Relation> out;
        const auto q = p.value();
        for (std::int64_t n = 0; ell_a(p, n).degree <= D; ++n) {
          if (n == 0) {
            if (with_lambda) out.emplace_back(std::vector<Term>{term(1, ell_a(p, 0), 0, 1), term(-1, ell_lambda1(p), q)}, p);
            continue;
          }
          out.emplace_back(
              std::vector<Term>{term(1, ell_a(p, n), 0, 1), term(-1, ell_a(p, n - 1), ipow(q, n + 1))}, p);
        }
        return out;
      });
}

inline PresentationPtr ell_torsion(Prime p) {
  auto gen = [p](std::int64_t a, std::int64_t n, std::int64_t h) { return ell_b(p, a, n, h); };
  return make_presentation(
      p, true, "T(l)", [p, gen](std::int64_t D) { return detail::tower_family_generators(p, D, false, gen); },
      [p, gen](std::int64_t D) {
        std::vector<Relation> out;
        detail::tower_family_relations(p, D, false, gen, out);
        return out;
      });
}

inline PresentationPtr free_on(Prime p, std::vector<Generator> gens, std::string name) {
  return make_presentation(
      p, true, std::move(name),
      [gens](std::int64_t D) {
        std::vector<Generator> out;
        for (const auto& g : gens)
          if (g.degree <= D) out.push_back(g);
        return out;
      },
      [](std::int64_t) { return std::vector<Relation>{}; });
}

// Merges presentations without tagging labels; the parts must use disjoint labels.
inline PresentationPtr disjoint_union(Prime p, std::vector<PresentationPtr> parts, std::string name) {
  return make_presentation(
      p, true, std::move(name),
      [parts](std::int64_t D) {
        std::vector<Generator> out;
        for (const auto& q : parts)
          for (auto& g : q->generators(D)) out.push_back(std::move(g));
        return out;
      },
      [parts](std::int64_t D) {
        std::vector<Relation> out;
        for (const auto& q : parts)
          for (auto& r : q->relations(D)) out.push_back(std::move(r));
        return out;
      });
}

inline PresentationPtr thh_ell(Prime p) {
  return disjoint_union(p,
                        {free_on(p, {{labels::unit(), 0}}, "unit"), a_family(p, true, "F"), ell_torsion(p)},
                        "THH(l)");
}

// ---- THH(l; Z_(p)) --------------------------------------------------------

inline PresentationPtr thh_ell_zp(Prime p) {
  const DegreeTable t{p};
  return make_presentation(
      p, false, "THH(l;Z)",
      [p, t](std::int64_t D) {
        std::vector<Generator> out;
        out.push_back({labels::unit(), 0});
        if (t.lambda(1) <= D) out.push_back({labels::lambda(1), t.lambda(1)});
        for (std::int64_t i = 1; t.a(i) <= D; ++i) {
          out.push_back({labels::a_i(i), t.a(i)});
          if (t.b(i) <= D) out.push_back({labels::b_i(i), t.b(i)});
        }
        return out;
      },
      [p, t](std::int64_t D) {
        std::vector<Relation> out;
        for (std::int64_t i = 1; t.a(i) <= D; ++i) {
          const int e = nu_p(i, p) + 1;
          out.emplace_back(std::vector<Term>{term(1, {labels::a_i(i), t.a(i)}, 0, e)}, p);
          if (t.b(i) <= D) out.emplace_back(std::vector<Term>{term(1, {labels::b_i(i), t.b(i)}, 0, e)}, p);
        }
        return out;
      });
}

// ---- THH(BP<2>; Z_(p)) ----------------------------------------------------

// Lambda classes on the unit are free; a lambda-multiple of a torsion class
// keeps that class's order p^s.
inline PresentationPtr thh_bp2_zp(Prime p) {
  const DegreeTable t{p};
  const std::int64_t q = p.value();
  const std::int64_t offsets[4] = {0, t.lambda(1), t.lambda(2), t.lambda(1) + t.lambda(2)};
  auto tors_deg = [q](std::int64_t i) { return 2 * q * q * q * i - 1; };
  return make_presentation(
      p, false, "THH(BP<2>;Z)",
      [=](std::int64_t D) {
        std::vector<Generator> out;
        const GeneratorLabel free_labels[4] = {labels::unit(), labels::lambda(1), labels::lambda(2),
                                               labels::lambda12()};
        for (int k = 0; k < 4; ++k)
          if (offsets[k] <= D) out.push_back({free_labels[k], offsets[k]});
        for (std::int64_t i = 1; tors_deg(i) <= D; ++i)
          for (int k = 0; k < 4; ++k)
            if (tors_deg(i) + offsets[k] <= D) out.push_back({labels::t_bp2(i, k), tors_deg(i) + offsets[k]});
        return out;
      },
      [=](std::int64_t D) {
        std::vector<Relation> out;
        for (std::int64_t i = 1; tors_deg(i) <= D; ++i)
          for (int k = 0; k < 4; ++k) {
            const std::int64_t d = tors_deg(i) + offsets[k];
            if (d <= D) out.emplace_back(std::vector<Term>{term(1, {labels::t_bp2(i, k), d}, 0, nu_p(i, p) + 1)}, p);
          }
        return out;
      });
}

// ---- THH(BP<2>; BP<1>) closed form ---------------------------------------

inline Generator closed_c(const Prime& p, std::int64_t alpha, std::int64_t n, std::int64_t h) {
  return {labels::c(alpha, n, h), DegreeTable{p}.c(alpha * ipow(p.value(), n))};
}

inline PresentationPtr c_torsion(Prime p) {
  auto gen = [p](std::int64_t a, std::int64_t n, std::int64_t h) { return closed_c(p, a, n, h); };
  return make_presentation(
      p, true, "T", [p, gen](std::int64_t D) { return detail::tower_family_generators(p, D, true, gen); },
      [p, gen](std::int64_t D) {
        std::vector<Relation> out;
        detail::tower_family_relations(p, D, true, gen, out);
        return out;
      });
}

// Summands: Z_(p)[v1]{1, sigma v2}, F, Sigma^{2p-1} F_{>=2p^2-1}, T, Sigma^{2p-1} T.
// with_unit = false drops the unit tower (the reduced module).
inline PresentationPtr thh_bp2_bp1_closed(Prime p, bool with_unit = true) {
  const DegreeTable t{p};
  std::vector<Generator> base;
  if (with_unit) base.push_back({labels::unit(), 0});
  base.push_back({labels::sigma_v(2), t.sigma_v(2)});
  const std::int64_t s = 2 * p.value() - 1;
  return direct_sum({free_on(p, base, "Z[v1]<σv2>"), a_family(p, true, "F"), shift(a_family(p, false, "F>="), s),
                     c_torsion(p), shift(c_torsion(p), s)},
                    with_unit ? "THH(BP<2>;BP<1>)" : "reduced THH(BP<2>;BP<1>)");
}

// ---- n = -1 and n = 0 inputs ---------------------------------------------

// THH(F_p) = F_p[mu], |mu| = 2, as a Z_(p)-module.
inline PresentationPtr thh_fp_module(Prime p) {
  return make_presentation(
      p, false, "THH(F_p)",
      [](std::int64_t D) {
        std::vector<Generator> out;
        for (std::int64_t k = 0; 2 * k <= D; ++k) out.push_back({labels::mu(k), 2 * k});
        return out;
      },
      [p](std::int64_t D) {
        std::vector<Relation> out;
        for (std::int64_t k = 0; 2 * k <= D; ++k) out.emplace_back(std::vector<Term>{term(1, {labels::mu(k), 2 * k}, 0, 1)}, p);
        return out;
      });
}

// THH(Z_(p)): Z_(p) in degree 0 and Z/p^{nu(k)+1}{lambda1 mu^{k-1}} in degree 2pk-1.
inline PresentationPtr thh_z_module(Prime p) {
  const std::int64_t q = p.value();
  auto deg = [q](std::int64_t k) { return 2 * q * (k + 1) - 1; };  // lambda1 mu^k
  return make_presentation(
      p, false, "THH(Z)",
      [deg](std::int64_t D) {
        std::vector<Generator> out;
        if (D >= 0) out.push_back({labels::unit(), 0});
        for (std::int64_t k = 0; deg(k) <= D; ++k) out.push_back({labels::lambda1_mu(k), deg(k)});
        return out;
      },
      [p, deg](std::int64_t D) {
        std::vector<Relation> out;
        for (std::int64_t k = 0; deg(k) <= D; ++k)
          out.emplace_back(std::vector<Term>{term(1, {labels::lambda1_mu(k), deg(k)}, 0, nu_p(k + 1, p) + 1)}, p);
        return out;
      });
}

inline AbelianGroup thh_z_p(std::int64_t d, const Prime& p) {
  if (d < 0) throw std::invalid_argument("thh_z_p: negative degree");
  if (d == 0) return AbelianGroup::free(1);
  if ((d + 1) % (2 * p.value()) == 0) return AbelianGroup::cyclic(nu_p((d + 1) / (2 * p.value()), p) + 1);
  return {};
}

// ---- integral THH(Z) and THC(Z) ------------------------------------------

// Finitely generated abelian group as Z^r plus cyclic factors of the listed orders.
struct IntegralGroup {
  std::int64_t free_rank = 0;
  std::vector<std::int64_t> orders;  // each > 1

  AbelianGroup localize(const Prime& p) const {
    std::vector<int> t;
    for (auto k : orders) {
      const int e = nu_p(k, p);
      if (e > 0) t.push_back(e);
    }
    return {free_rank, t};
  }
  bool operator==(const IntegralGroup&) const = default;
  std::string str() const {
    if (free_rank == 0 && orders.empty()) return "0";
    std::string s = free_rank ? (free_rank == 1 ? "Z" : "Z^" + std::to_string(free_rank)) : "";
    for (auto k : orders) s += (s.empty() ? "" : "+") + ("Z/" + std::to_string(k));
    return s;
  }
};

inline IntegralGroup cyclic_integral(std::int64_t k) {
  if (k <= 0) throw std::invalid_argument("cyclic order must be positive");
  return k == 1 ? IntegralGroup{} : IntegralGroup{0, {k}};
}

// Two readings of the integral table in odd degree 2k-1: cyclic of order k
// (the one compatible with the p-local formula) or of order k-1 as printed.
enum class ZTableReading { consistent, as_printed };

inline IntegralGroup thh_z_integral(std::int64_t d, ZTableReading reading = ZTableReading::consistent) {
  if (d < 0) throw std::invalid_argument("thh_z_integral: negative degree");
  if (d == 0) return {1, {}};
  if (d % 2 == 0) return {};
  const std::int64_t k = (d + 1) / 2;
  if (reading == ZTableReading::consistent) return cyclic_integral(k);
  return k - 1 == 0 ? IntegralGroup{1, {}} : cyclic_integral(k - 1);  // Z/0 = Z
}

inline IntegralGroup hom_to_z(const IntegralGroup& g) { return {g.free_rank, {}}; }
inline IntegralGroup ext_to_z(const IntegralGroup& g) { return {0, g.orders}; }

// Universal coefficients: THC^d = Hom(THH_d, Z) + Ext(THH_{d-1}, Z).
inline IntegralGroup thc_z(std::int64_t d, ZTableReading reading = ZTableReading::consistent) {
  if (d < 0) throw std::invalid_argument("thc_z: negative degree");
  IntegralGroup out = hom_to_z(thh_z_integral(d, reading));
  if (d >= 1) {
    auto e = ext_to_z(thh_z_integral(d - 1, reading));
    out.orders.insert(out.orders.end(), e.orders.begin(), e.orders.end());
  }
  std::sort(out.orders.begin(), out.orders.end());
  return out;
}

// p-localized THC(Z) in degrees 0..max_degree as a tabulated module; the
// summands of degree d are labelled thc(d, j).
inline PresentationPtr thc_z_module(Prime p, std::int64_t max_degree) {
  std::map<std::int64_t, TablePresentation::Slice> slices;
  for (std::int64_t d = 0; d <= max_degree; ++d) {
    const AbelianGroup g = thc_z(d).localize(p);
    if (g.is_zero()) continue;
    TablePresentation::Slice s;
    const std::size_t n = std::size_t(g.free_rank()) + g.torsion().size();
    for (std::size_t j = 0; j < n; ++j) s.labels.push_back({"thc", {d, std::int64_t(j)}, ""});
    s.relations = SparseMatrix(n);
    for (std::size_t j = 0; j < g.torsion().size(); ++j)
      s.relations.append({{std::uint32_t(g.free_rank() + std::int64_t(j)), ipow(p.value(), g.torsion()[j])}});
    slices.emplace(d, std::move(s));
  }
  return std::make_shared<TablePresentation>(p, "THC(Z)", std::move(slices));
}

// ---- dimension series -----------------------------------------------------

enum class FactorKind { polynomial, exterior, divided_power };

struct SeriesFactor {
  FactorKind kind;
  std::int64_t degree;
  std::string name;
};

class DimensionSeries {
 public:
  DimensionSeries(std::string name, std::vector<SeriesFactor> factors) : name_(std::move(name)), factors_(std::move(factors)) {
    for (const auto& f : factors_)
      if (f.degree <= 0) throw std::invalid_argument("series factor " + f.name + " needs positive degree");
  }

  // Coefficients in degrees 0..max_degree.
  std::vector<std::int64_t> coefficients(std::int64_t max_degree) const {
    std::vector<std::int64_t> c(std::size_t(std::max<std::int64_t>(max_degree, 0) + 1), 0);
    if (max_degree < 0) return {};
    c[0] = 1;
    for (const auto& f : factors_) {
      const auto k = std::size_t(f.degree);
      if (f.kind == FactorKind::exterior) {
        for (std::size_t d = c.size(); d-- > k;) c[d] += c[d - k];
      } else {  // polynomial and divided power share the series 1/(1 - t^k)
        for (std::size_t d = k; d < c.size(); ++d) c[d] += c[d - k];
      }
    }
    return c;
  }
  std::int64_t operator()(std::int64_t d) const { return d < 0 ? 0 : coefficients(d).back(); }

  DimensionSeries tensor(const DimensionSeries& o) const {
    auto f = factors_;
    f.insert(f.end(), o.factors_.begin(), o.factors_.end());
    return {name_ + "⊗" + o.name_, f};
  }
  const std::string& name() const noexcept { return name_; }
  const std::vector<SeriesFactor>& factors() const noexcept { return factors_; }

 private:
  std::string name_;
  std::vector<SeriesFactor> factors_;
};

// F_p[mu^{p^{n+1}}]<lambda_1..lambda_{n+1}>, n >= -1.
inline DimensionSeries thh_bpn_fp(int n, const Prime& p) {
  if (n < -1) throw std::invalid_argument("thh_bpn_fp: n >= -1 required");
  std::vector<SeriesFactor> f;
  for (int s = 1; s <= n + 1; ++s) f.push_back({FactorKind::exterior, 2 * ipow(p.value(), s) - 1, "λ" + std::to_string(s)});
  f.push_back({FactorKind::polynomial, 2 * ipow(p.value(), n + 1), "μ"});
  return {"THH(BP<" + std::to_string(n) + ">;F_p)", f};
}

// Dual exterior classes times a divided power algebra on the dual of mu.
inline DimensionSeries thc_bpn_fp(int n, const Prime& p) {
  if (n < 0) throw std::invalid_argument("thc_bpn_fp: n >= 0 required");
  std::vector<SeriesFactor> f;
  for (int s = 1; s <= n + 1; ++s) f.push_back({FactorKind::exterior, 2 * ipow(p.value(), s) - 1, "λ" + std::to_string(s) + "^"});
  f.push_back({FactorKind::divided_power, 2 * ipow(p.value(), n + 1), "Γ(μ^)"});
  return {"THC(BP<" + std::to_string(n) + ">;F_p)", f};
}

// Q[v_1..v_m]<sigma v_1..sigma v_n>.
inline DimensionSeries rational_thh(int n, int m, const Prime& p) {
  if (m < 0 || m > n) throw std::invalid_argument("rational_thh: 0 <= m <= n required");
  std::vector<SeriesFactor> f;
  for (int i = 1; i <= m; ++i) f.push_back({FactorKind::polynomial, 2 * ipow(p.value(), i) - 2, "v" + std::to_string(i)});
  for (int i = 1; i <= n; ++i) f.push_back({FactorKind::exterior, 2 * ipow(p.value(), i) - 1, "σv" + std::to_string(i)});
  return {"Q-rank", f};
}

// Z_(p)[v_1..v_m]<sigma v_{m+1}..sigma v_n>; m = -1 gives the F_p exterior
// algebra on sigma v_1..sigma v_n.
inline DimensionSeries cooperations(int n, int m, const Prime& p) {
  if (m < -1 || m > n) throw std::invalid_argument("cooperations: -1 <= m <= n required");
  std::vector<SeriesFactor> f;
  for (int i = 1; i <= m; ++i) f.push_back({FactorKind::polynomial, 2 * ipow(p.value(), i) - 2, "v" + std::to_string(i)});
  for (int i = std::max(m + 1, 1); i <= n; ++i)
    f.push_back({FactorKind::exterior, 2 * ipow(p.value(), i) - 1, "σv" + std::to_string(i)});
  return {"cooperations", f};
}

// F_p[mu^p]<sigma v0 mu^{p-1}>, the expected n = 0 abutment.
inline DimensionSeries fp_mu_p_series(const Prime& p) {
  return {"F_p[μ^p]<σv0μ^(p-1)>",
          {{FactorKind::polynomial, 2 * p.value(), "μ^p"}, {FactorKind::exterior, 2 * p.value() - 1, "σv0μ^(p-1)"}}};
}

}  // namespace thh
