#include "support.hpp"
#include "thh/brun.hpp"
#include "thh/verify.hpp"

using namespace thh;

namespace {

std::string image(const GradedMap& f, const Generator& g) { return terms_str(f.image(g)); }

std::size_t local(const std::vector<std::size_t>& index, std::int64_t pos) {
  const auto it = std::find(index.begin(), index.end(), std::size_t(pos));
  REQUIRE(it != index.end());
  return std::size_t(it - index.begin());
}

}  // namespace

TEST_CASE("E1 pages", "[brun]") {
  const Prime p(2);
  const auto e0 = build_e1(thh_fp_module(p), 0);
  for (std::int64_t d = 0; d <= 12; ++d) CHECK(realize_degree(e0, d) == AbelianGroup::cyclic(1));
  const auto e1 = build_e1(thh_z_module(p), 1);
  CHECK(realize_degree(e1, 3) == AbelianGroup(1, {1}));
  const auto e2 = build_e1(thh_ell(p), 2);
  CHECK(realize_degree(e2, 7) == AbelianGroup::free(2));
  CHECK(sigma_degree(2, p) == 7);
  CHECK(in_sigma_copy(sigma_copy(ell_lambda1(p), 2, p).label, 2));
  CHECK_FALSE(in_sigma_copy(ell_lambda1(p).label, 2));
}

TEST_CASE("d1 for n = 0 and n = 1", "[brun]") {
  const Prime p2(2), p3(3);
  const auto f2 = d1_n0(p2, build_e1(thh_fp_module(p2), 0));
  CHECK(image(f2, {labels::mu(1), 2}) == "μ(0)·σv0");
  CHECK(image(f2, {labels::mu(2), 4}) == "0");
  const auto f3 = d1_n0(p3, build_e1(thh_fp_module(p3), 0));
  CHECK(image(f3, {labels::mu(2), 4}) == "2·μ(1)·σv0");
  CHECK(image(f3, {labels::mu(3), 6}) == "0");
  const auto g = d1_n1(p2, build_e1(thh_z_module(p2), 1));
  CHECK(image(g, {labels::lambda1_mu(2), 11}) == "p^1·λ1μ(1)·σv1");
}

TEST_CASE("d1 for n = 2", "[brun]") {
  const Prime p(2);
  const DegreeTable t{p};
  const auto zp = d1_n2_zp(p, build_e1(thh_ell_zp(p), 2));
  CHECK(image(zp, {labels::a_i(2), t.a(2)}) == "a(1)·σv2");
  CHECK(image(zp, {labels::a_i(1), t.a(1)}) == "0");
  CHECK(image(zp, {labels::b_i(3), t.b(3)}) == "p^1·b(2)·σv2");
  const auto ell = d1_n2_ell(p, build_e1(thh_ell(p), 2));
  CHECK(image(ell, ell_b(p, 1, 1, 0)) == "v0b(1,0,0)·σv2");
  CHECK(image(ell, ell_b(p, 5, 0, 0)) == "v0b(1,2,2)·σv2");
  CHECK(image(ell, ell_b(p, 3, 0, 0)) == "v0b(1,1,1)·σv2");
  CHECK(image(ell, ell_a(p, 1)) == "0");
  CHECK(image(ell, ell_lambda1(p)) == "0");
}

TEST_CASE("extension rules for n = 2", "[brun]") {
  const auto rules = extension_rules_n2(Prime(2), 40);
  REQUIRE(rules.size() >= 3);
  CHECK(rules[0].degree == 10);
  CHECK(terms_str(rules[0].source) == "v0b(1,0,0)");
  CHECK(terms_str(rules[0].target) == "λ1·σv2");
  CHECK(rules[2].degree == 18);
  CHECK(terms_str(rules[2].source) == "v0b(1,1,1)");
  CHECK(terms_str(rules[2].target) == "v1^2·v0a(0)·σv2");
  for (const auto& r : rules) CHECK(r.p_power == 1);
  const auto r3 = extension_rules_n2(Prime(3), 100);
  REQUIRE(r3.size() >= 3);
  CHECK(r3[0].degree == 22);
  CHECK(r3[2].degree == 30);
}

TEST_CASE("n = 2 run at p = 2 in low degrees", "[brun]") {
  const Prime p(2);
  const auto run = run_brun(2, p, 60, D1Case::n2_ell);
  const auto closed = realize_range(thh_bp2_bp1_closed(p), 60);
  for (std::int64_t d = 0; d <= 60; ++d) CHECK(run.at(d).abutment == closed[std::size_t(d)]);

  // b_1 and lambda1 sigma v2 merge into one free class
  const auto [k10, c10] = kernel_cokernel(run, 10);
  CHECK(k10 == AbelianGroup(1, {1}));
  CHECK(c10 == AbelianGroup::free(1));
  CHECK(run.at(10).abutment == AbelianGroup::free(2));
  const auto [k18, c18] = kernel_cokernel(run, 18);
  CHECK(k18 == AbelianGroup(1, {1}));
  CHECK(c18 == AbelianGroup::free(1));

  const Truncation& tr = *run.e1_trunc;
  SECTION("b_2 is not a cycle") {
    const auto& dd = run.at(18);
    const Block b = tr.block(18);
    const auto i = local(dd.n_index, b.find(labels::b(1, 1, 0)));
    const SparseMatrix e = single_column(dd.n_index.size(), {{std::uint32_t(i), 1}});
    CHECK_FALSE(columns_in_image(dd.rel_s_below, dd.d1_in.multiply(e), p));
  }
  SECTION("b_1 sigma v2 is a boundary") {
    const auto& dd = run.at(17);
    const Block b = tr.block(17);
    const auto i = local(dd.s_index, b.find(sigma_copy(ell_b(p, 1, 0, 0), 2, p).label));
    SparseMatrix rel = dd.rel_s;
    rel.hcat(dd.d1_out);
    CHECK(columns_in_image(rel, single_column(dd.s_index.size(), {{std::uint32_t(i), 1}}), p));
  }
}

TEST_CASE("n = 0 runs give F_p[mu^p]<sigma v0 mu^(p-1)>", "[brun]") {
  for (std::int64_t q : {2, 3, 5}) {
    const Prime p(q);
    const auto run = run_brun(0, p, 60, D1Case::n0);
    CHECK(run.extensions.empty());
    const auto dims = fp_mu_p_series(p).coefficients(60);
    for (std::int64_t d = 0; d <= 60; ++d)
      CHECK(run.at(d).abutment == AbelianGroup(0, std::vector<int>(std::size_t(dims[std::size_t(d)]), 1)));
  }
}

TEST_CASE("n = 1 run reproduces THH(l; Z_(p)) with one derived extension", "[brun]") {
  const Prime p(2);
  BrunOptions opt;
  opt.derive_against = thh_ell_zp(p);
  const auto run = run_brun(1, p, 60, D1Case::n1, opt);
  const auto want = realize_range(thh_ell_zp(p), 60);
  for (std::int64_t d = 0; d <= 60; ++d) CHECK(run.at(d).abutment == want[std::size_t(d)]);
  REQUIRE(run.extensions.size() == 1);
  CHECK(run.extensions[0].degree == 3);
  CHECK(run.extensions[0].origin == RuleOrigin::derived);
  CHECK(terms_str(run.extensions[0].source) == "λ1μ(0)");
}

TEST_CASE("inapplicable extension rules are rejected", "[brun]") {
  const Prime p(2);
  auto rules = extension_rules_n2(p, 40);
  SECTION("source that is not a cycle") {
    ExtensionRule bad = rules[2];
    bad.source = {term(1, ell_b(p, 1, 1, 0))};
    rules.push_back(bad);
  }
  SECTION("claimed order too large") { rules[0].p_power = 2; }
  BrunOptions opt;
  opt.rules_override = rules;
  CHECK_THROWS_AS(run_brun(2, p, 40, D1Case::n2_ell, opt), StructuralError);
}

TEST_CASE("run windows are validated", "[brun]") {
  CHECK_THROWS_AS(run_brun(2, Prime(2), 5, D1Case::n2_ell), std::invalid_argument);
  CHECK_NOTHROW(run_brun(2, Prime(2), 8, D1Case::n2_ell));
}
