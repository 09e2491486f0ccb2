#include "support.hpp"
#include "thh/catalog.hpp"
#include "thh/graded.hpp"

using namespace thh;

namespace {

// Z_(p)[v1] on one generator of the given degree.
PresentationPtr free_v1(Prime p, std::int64_t degree = 0, std::string name = "x") {
  return make_presentation(
      p, true, name,
      [degree, name](std::int64_t D) {
        return D >= degree ? std::vector<Generator>{{{name, {}, ""}, degree}} : std::vector<Generator>{};
      },
      [](std::int64_t) { return std::vector<Relation>{}; });
}

// Z_(p)[v1]{x} / (p^e x, v1^k x) with |x| = 0.
PresentationPtr truncated_tower(Prime p, int e, std::int64_t k) {
  const Generator x{{"x", {}, ""}, 0};
  return make_presentation(
      p, true, "tower", [x](std::int64_t) { return std::vector<Generator>{x}; },
      [p, x, e, k](std::int64_t D) {
        std::vector<Relation> out;
        out.emplace_back(std::vector<Term>{term(1, x, 0, e)}, p);
        if (k * v1_degree(p) <= D) out.emplace_back(std::vector<Term>{term(1, x, k)}, p);
        return out;
      });
}

}  // namespace

TEST_CASE("degree table", "[graded]") {
  const DegreeTable t{Prime(2)};
  CHECK(t.v1() == 2);
  CHECK(t.lambda(1) == 3);
  CHECK(t.lambda(2) == 7);
  CHECK(t.a(1) == 7);
  CHECK(t.b(1) == 10);
  CHECK(t.b(3) == 26);
  CHECK(t.b(4) == 34);
  const DegreeTable t3{Prime(3)};
  CHECK(t3.b(1) == 22);
  CHECK(t3.sigma_v(2) == 17);
}

TEST_CASE("relations must be homogeneous", "[graded]") {
  const Prime p(2);
  const Generator x{{"x", {}, ""}, 0}, y{{"y", {}, ""}, 3};
  CHECK_NOTHROW(Relation({term(2, x, 2), term(1, {{"z", {}, ""}, 4})}, p));
  CHECK_THROWS_AS(Relation({term(1, x), term(1, y)}, p), std::invalid_argument);
  CHECK_THROWS_AS(Relation({}, p), std::invalid_argument);
  CHECK_THROWS_AS(Relation({term(0, x)}, p), std::invalid_argument);
}

TEST_CASE("free module over Z_(p)[v1]", "[graded]") {
  const auto f = free_v1(Prime(2));
  CHECK(realize_degree(f, 4) == AbelianGroup::free(1));
  CHECK(realize_degree(f, 3) == AbelianGroup{});
  CHECK_THROWS_AS(realize_degree(f, -1), std::invalid_argument);
  const Block b = Truncation(f, 6).block(6);
  REQUIRE(b.size() == 1);
  CHECK(b.basis[0].v1_exp == 3);
}

TEST_CASE("truncated towers realize and report their v1-order", "[graded]") {
  const Prime p(3);
  const auto t = truncated_tower(p, 2, 3);
  const auto groups = realize_range(t, 20);
  for (std::int64_t d = 0; d <= 20; ++d) {
    const bool live = d % 4 == 0 && d / 4 < 3;
    CHECK(groups[std::size_t(d)] == (live ? AbelianGroup::cyclic(2) : AbelianGroup{}));
  }
  CHECK(v1_tower_order(t, {"x", {}, ""}) == 3);
  CHECK_FALSE(v1_tower_order(free_v1(p), {"x", {}, ""}).has_value());
  CHECK_THROWS(v1_tower_order(t, {"nope", {}, ""}));
}

TEST_CASE("element orders and zero classes", "[graded]") {
  const Prime p(2);
  const auto t = truncated_tower(p, 3, 5);
  const Block b = Truncation(t, 0).block(0);
  const auto x = b.unit_vector({"x", {}, ""});
  CHECK(class_order(b.relations, x, p) == 3);
  CHECK(class_order(b.relations, scaled(x, 2), p) == 2);
  CHECK(is_zero_class(b, scaled(x, 8), p));
  CHECK_FALSE(is_zero_class(b, scaled(x, 4), p));
  const Block f = Truncation(free_v1(p), 0).block(0);
  CHECK_FALSE(class_order(f.relations, f.unit_vector({"x", {}, ""}), p).has_value());
}

TEST_CASE("shift and direct sum", "[graded]") {
  const Prime p(2);
  const auto unit = free_v1(p);
  const auto s0 = shift(unit, 0);
  for (std::int64_t d = 0; d <= 10; ++d) CHECK(realize_degree(s0, d) == realize_degree(unit, d));
  CHECK(realize_degree(shift(unit, 3), 3) == AbelianGroup::free(1));
  CHECK(realize_degree(shift(unit, 3), 2) == AbelianGroup{});

  const auto both = direct_sum({unit, free_v1(p, 0)});
  CHECK(realize_degree(both, 4) == AbelianGroup::free(2));
  const auto with_zero = direct_sum({unit, zero_module(p)});
  for (std::int64_t d = 0; d <= 8; ++d) CHECK(realize_degree(with_zero, d) == realize_degree(unit, d));
  CHECK_THROWS_AS(direct_sum({unit, free_v1(Prime(3))}), std::invalid_argument);
  CHECK_THROWS_AS(direct_sum({unit, thh_fp_module(p)}), std::invalid_argument);
  CHECK_THROWS_AS(direct_sum({}), std::invalid_argument);
}

TEST_CASE("suspended torsion matches the original", "[graded]") {
  const Prime p(2);
  const DegreeTable t{p};
  const auto torsion = ell_torsion(p);
  const auto moved = shift(torsion, 2 * p.value() - 1);
  for (std::int64_t i = 1; i <= 6; ++i)
    CHECK(realize_degree(moved, t.b(i) + 3) == realize_degree(torsion, t.b(i)));
}

TEST_CASE("adjoining an exterior class", "[graded]") {
  const Prime p(2);
  const GeneratorLabel s{"σv2", {}, ""};
  const auto e = adjoin_exterior(free_v1(p), 7, s);
  CHECK(realize_degree(e, 7) == AbelianGroup::free(1));
  CHECK(realize_degree(e, 9) == AbelianGroup::free(1));
  CHECK(realize_degree(e, 8) == AbelianGroup::free(1));
  CHECK(realize_degree(e, 6) == AbelianGroup::free(1));
  const auto z = adjoin_exterior(zero_module(p), 7, s);
  for (std::int64_t d = 0; d <= 12; ++d) CHECK(realize_degree(z, d).is_zero());
}

TEST_CASE("quotient by v1 kills the tower above the bottom", "[graded]") {
  const Prime p(2);
  const auto q = quotient_by_v1(free_v1(p));
  CHECK(realize_degree(q, 0) == AbelianGroup::free(1));
  CHECK(realize_degree(q, 2).is_zero());
  CHECK(realize_degree(q, 8).is_zero());
}

TEST_CASE("v1 multiplication and maps between blocks", "[graded]") {
  const Prime p(2);
  const Truncation tr(free_v1(p), 8);
  const Block b2 = tr.block(2), b6 = tr.block(6);
  const SparseMatrix v = v1_power_matrix(b2, b6, 2);
  CHECK(v.to_rows() == std::vector<std::vector<std::int64_t>>{{1}});
  const auto unit = free_v1(p);
  const GradedMap twice{unit, unit, 0, [](const Generator& g) { return std::vector<Term>{term(2, g)}; }, "2"};
  CHECK(map_matrix(twice, b2, b2, p).to_rows() == std::vector<std::vector<std::int64_t>>{{2}});
  CHECK_THROWS_AS(map_matrix(twice, b2, b6, p), std::invalid_argument);
}

TEST_CASE("parallel realization matches serial realization", "[graded]") {
  const auto ell = thh_ell(Prime(3));
  const auto all = realize_range(ell, 120);
  for (std::int64_t d : {0, 4, 5, 22, 44, 53, 120}) CHECK(all[std::size_t(d)] == realize_degree(ell, d));
}

TEST_CASE("table presentations", "[graded]") {
  const Prime p(5);
  std::map<std::int64_t, TablePresentation::Slice> slices;
  TablePresentation::Slice s{{{"g", {0}, ""}, {"g", {1}, ""}}, SparseMatrix::from_rows({{25}, {0}})};
  slices.emplace(3, s);
  const auto tp = std::make_shared<TablePresentation>(p, "t", slices);
  CHECK(realize_degree(tp, 3) == AbelianGroup(1, {2}));
  CHECK(realize_degree(tp, 2).is_zero());
  TablePresentation::Slice bad{{{"g", {0}, ""}}, SparseMatrix(2)};
  CHECK_THROWS_AS(TablePresentation(p, "bad", {{0, bad}}), std::invalid_argument);
}
