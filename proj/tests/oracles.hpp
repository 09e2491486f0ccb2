#pragma once

// Reference computations that share no code with the library's elimination.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "thh/arith.hpp"

namespace oracle {

using Big = boost::multiprecision::cpp_int;
using Dense = std::vector<std::vector<std::int64_t>>;

// Determinant by Laplace expansion along the first row.
inline Big det(const std::vector<std::vector<Big>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  Big s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j] == 0) continue;
    std::vector<std::vector<Big>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Big> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(std::move(row));
    }
    const Big t = a[0][j] * det(minor);
    s += (j % 2 == 0) ? t : Big(-t);
  }
  return s;
}

inline void subsets(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
    if (pos == k) {
      f(idx);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
}

// gcd of all k x k minors; zero when all vanish.
inline Big determinantal_divisor(const Dense& m, std::size_t k) {
  const std::size_t r = m.size(), c = r ? m[0].size() : 0;
  Big g = 0;
  subsets(r, k, [&](const std::vector<std::size_t>& rows) {
    subsets(c, k, [&](const std::vector<std::size_t>& cols) {
      std::vector<std::vector<Big>> a(k, std::vector<Big>(k));
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) a[i][j] = m[rows[i]][cols[j]];
      g = boost::multiprecision::gcd(g, abs(det(a)));
    });
  });
  return g;
}

inline int valuation(Big x, std::int64_t p) {
  int e = 0;
  while (x % p == 0) {
    x /= p;
    ++e;
  }
  return e;
}

// p-local cokernel of the map Z^cols -> Z^rows from invariant factors
// d_k / d_{k-1}, where d_k is the k-th determinantal divisor.
inline thh::AbelianGroup cokernel_by_minors(const Dense& m, std::int64_t p) {
  const std::size_t r = m.size(), c = r ? m[0].size() : 0;
  std::vector<int> torsion;
  Big prev = 1;
  std::size_t rank = 0;
  for (std::size_t k = 1; k <= std::min(r, c); ++k) {
    const Big d = determinantal_divisor(m, k);
    if (d == 0) break;
    rank = k;
    const int e = valuation(d, p) - valuation(prev, p);
    if (e > 0) torsion.push_back(e);
    prev = d;
  }
  return {std::int64_t(r - rank), torsion};
}

// log_p |C / p^j C| for C = coker(m), by counting y in (Z/p^j)^rows with
// y^T m = 0 mod p^j, i.e. |Hom(C, Z/p^j)|.
inline int quotient_length(const Dense& m, std::int64_t p, int j) {
  const std::size_t r = m.size(), c = r ? m[0].size() : 0;
  const std::int64_t q = thh::ipow(p, j);
  std::vector<std::int64_t> y(r, 0);
  std::int64_t count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == r) {
      for (std::size_t col = 0; col < c; ++col) {
        std::int64_t s = 0;
        for (std::size_t k = 0; k < r; ++k) s += y[k] * m[k][col];
        if (((s % q) + q) % q != 0) return;
      }
      ++count;
      return;
    }
    for (std::int64_t v = 0; v < q; ++v) {
      y[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  int e = 0;
  while (count > 1) {
    count /= p;
    ++e;
  }
  return e;
}

// The same count predicted from a group: f j + sum min(e_i, j).
inline int predicted_quotient_length(const thh::AbelianGroup& g, int j) {
  int s = int(g.free_rank()) * j;
  for (int e : g.torsion()) s += std::min(e, j);
  return s;
}

}  // namespace oracle
