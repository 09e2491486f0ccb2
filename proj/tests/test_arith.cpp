#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "thh/arith.hpp"

using namespace thh;

TEST_CASE("primes and valuations", "[arith]") {
  CHECK_THROWS_AS(Prime(1), std::invalid_argument);
  CHECK_THROWS_AS(Prime(9), std::invalid_argument);
  CHECK(Prime(13).value() == 13);
  const Prime two(2), three(3);
  CHECK(nu_p(48, two) == 4);
  CHECK(nu_p(-48, three) == 1);
  CHECK(nu_p(7, two) == 0);
  CHECK_THROWS_AS(nu_p(0, two), std::domain_error);
  CHECK(ipow(3, 4) == 81);
  CHECK_THROWS_AS(ipow(2, 64), std::overflow_error);
}

TEST_CASE("abelian groups normalize and compare", "[arith]") {
  const AbelianGroup g(1, {3, 1, 2});
  CHECK(g.torsion() == std::vector<int>{1, 2, 3});
  CHECK(g.length() == 6);
  CHECK(g.str() == "Z+Z/p+Z/p^2+Z/p^3");
  CHECK((AbelianGroup::cyclic(2) + AbelianGroup::free(2)) == AbelianGroup(2, {2}));
  CHECK(AbelianGroup::cyclic(0).is_zero());
  CHECK_THROWS_AS(AbelianGroup(0, {0}), std::invalid_argument);
}

TEST_CASE("sparse matrices", "[arith]") {
  const SparseMatrix m = SparseMatrix::from_rows({{1, 0, 2}, {0, 3, 0}});
  CHECK(m.to_rows() == std::vector<std::vector<std::int64_t>>{{1, 0, 2}, {0, 3, 0}});
  const SparseMatrix x = SparseMatrix::from_rows({{1}, {1}, {1}});
  CHECK(m.multiply(x).to_rows() == std::vector<std::vector<std::int64_t>>{{3}, {3}});
  SparseMatrix h = m;
  h.hcat(SparseMatrix::from_rows({{5}, {6}}));
  CHECK(h.ncols() == 4);
  CHECK_THROWS(h.hcat(x));
  CHECK(block_diagonal(m, x).rows == 5);
}

TEST_CASE("cokernel examples", "[arith]") {
  CHECK(cokernel_p({{2, 0}, {0, 12}}, Prime(2)) == AbelianGroup(0, {1, 2}));
  CHECK(cokernel_p({{2, 0}, {0, 12}}, Prime(3)) == AbelianGroup(0, {1}));
  CHECK(cokernel_p({{2, 0}, {0, 12}}, Prime(5)) == AbelianGroup{});
  // 1x1 zero map and an empty matrix
  CHECK(cokernel_p(SparseMatrix::from_rows({{0}}), Prime(2)) == AbelianGroup::free(1));
  CHECK(cokernel_p(SparseMatrix(3), Prime(2)) == AbelianGroup::free(3));
  // units of Z_(p) are invertible
  CHECK(cokernel_p(SparseMatrix::from_rows({{3}}), Prime(2)) == AbelianGroup{});
  CHECK(cokernel_p({{4, 2}, {6, 4}}, Prime(2)) == AbelianGroup(0, {1, 1}));
}

TEST_CASE("large entries take the exact fallback", "[arith]") {
  const std::int64_t big = std::int64_t{1} << 62;
  const oracle::Dense m{{big, 3}, {3, big - 1}};
  for (std::int64_t q : {2, 3, 5})
    CHECK(cokernel_p(m, Prime(q)) == oracle::cokernel_by_minors(m, q));
  const oracle::Dense power{{big, 0}, {0, 1}};
  CHECK(cokernel_p(power, Prime(2)) == AbelianGroup(0, {62}));
}

TEST_CASE("kernels, subgroups and images", "[arith]") {
  const Prime p(2);
  // Z -> Z, x -> 4x: kernel 0, and Z/8 -> Z/8, x -> 2x has kernel Z/2
  const auto ker = nullspace_p(SparseMatrix::from_rows({{4}}), p);
  CHECK(ker.empty());
  const SparseMatrix f = SparseMatrix::from_rows({{2}});
  const SparseMatrix rel8 = SparseMatrix::from_rows({{8}});
  const SparseMatrix gens = kernel_generators(f, 1, rel8, p);
  CHECK(subgroup_group(gens, rel8, p) == AbelianGroup::cyclic(1));
  // subgroup of Z/8 generated by 2 is Z/4
  CHECK(subgroup_group(SparseMatrix::from_rows({{2}}), rel8, p) == AbelianGroup::cyclic(2));
  CHECK(columns_in_image(rel8, SparseMatrix::from_rows({{16}}), p));
  CHECK_FALSE(columns_in_image(rel8, SparseMatrix::from_rows({{4}}), p));
}

TEST_CASE("summand attribution covers every summand", "[arith]") {
  const SparseMatrix m = SparseMatrix::from_rows({{2, 0, 0}, {0, 4, 0}, {0, 0, 0}, {0, 0, 3}});
  const auto det = cokernel_detail(m, Prime(2));
  CHECK(det.group == AbelianGroup(1, {1, 2}));
  REQUIRE(det.summands.size() == 3);
  for (const auto& s : det.summands) CHECK(s.row < 4);
}

// Random matrices with at most 4 rows and columns and entries in [-8, 8],
// compared with invariant factors from minors and with direct counts of
// |C / p^j C| wherever (Z/p^j)^rows is small enough to enumerate.
TEST_CASE("cokernel agrees with brute-force oracles on random matrices", "[arith][fuzz]") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> dim(1, 4), cols(0, 4), entry(-8, 8);
  for (std::int64_t q : {2, 3, 5}) {
    const Prime p(q);
    int enumerated = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int r = dim(rng), c = cols(rng);
      auto m = oracle::Dense(std::size_t(r), std::vector<std::int64_t>(std::size_t(c)));
      for (auto& row : m)
        for (auto& x : row) x = entry(rng);
      const AbelianGroup got = cokernel_p(m, p);
      INFO("p=" << q << " trial " << trial);
      REQUIRE(got == oracle::cokernel_by_minors(m, q));
      for (int j = 1; j <= got.max_exponent() + 1; ++j) {
        if (double(r) * j * std::log2(double(q)) > 18) break;
        ++enumerated;
        REQUIRE(oracle::quotient_length(m, q, j) == oracle::predicted_quotient_length(got, j));
      }
    }
    CHECK(enumerated > 1000);
  }
}
