#pragma once

// Exact p-local arithmetic: valuations, finitely generated Z_(p)-modules and
// elimination over Z_(p) on integer matrices.
//
// Entries are plain integers. Elimination runs on checked 64-bit integers and
// restarts with arbitrary precision when an intermediate value overflows, so
// every result is exact.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace thh {

class Prime {
 public:
  explicit Prime(std::int64_t p) : p_(p) {
    if (p < 2) throw std::invalid_argument("prime must be at least 2, got " + std::to_string(p));
    for (std::int64_t q = 2; q * q <= p; ++q)
      if (p % q == 0) throw std::invalid_argument(std::to_string(p) + " is not prime");
  }
  std::int64_t value() const noexcept { return p_; }
  bool operator==(const Prime&) const = default;

 private:
  std::int64_t p_;
};

// Largest e with p^e | k. Zero has infinite valuation and is rejected.
inline int nu_p(std::int64_t k, const Prime& p) {
  if (k == 0) throw std::domain_error("nu_p: valuation of 0 is infinite");
  std::uint64_t m = k < 0 ? std::uint64_t(0) - std::uint64_t(k) : std::uint64_t(k);
  const auto q = std::uint64_t(p.value());
  int e = 0;
  while (m % q == 0) {
    m /= q;
    ++e;
  }
  return e;
}

inline std::int64_t ipow(std::int64_t base, std::int64_t e) {
  if (e < 0) throw std::domain_error("ipow: negative exponent");
  std::int64_t r = 1;
  for (std::int64_t i = 0; i < e; ++i)
    if (__builtin_mul_overflow(r, base, &r)) throw std::overflow_error("ipow overflow");
  return r;
}

// Z_(p)^free_rank plus cyclic summands Z/p^e, one per entry of torsion.
class AbelianGroup {
 public:
  AbelianGroup() = default;
  AbelianGroup(std::int64_t free_rank, std::vector<int> torsion)
      : free_rank_(free_rank), torsion_(std::move(torsion)) {
    if (free_rank_ < 0) throw std::invalid_argument("negative free rank");
    for (int e : torsion_)
      if (e <= 0) throw std::invalid_argument("torsion exponents must be positive");
    std::sort(torsion_.begin(), torsion_.end());
  }

  static AbelianGroup free(std::int64_t r) { return {r, {}}; }
  static AbelianGroup cyclic(int e) { return e == 0 ? AbelianGroup{} : AbelianGroup{0, {e}}; }

  std::int64_t free_rank() const noexcept { return free_rank_; }
  const std::vector<int>& torsion() const noexcept { return torsion_; }
  // Number of composition factors of the torsion subgroup.
  std::int64_t length() const noexcept {
    return std::accumulate(torsion_.begin(), torsion_.end(), std::int64_t{0});
  }
  bool is_zero() const noexcept { return free_rank_ == 0 && torsion_.empty(); }
  int max_exponent() const noexcept { return torsion_.empty() ? 0 : torsion_.back(); }

  AbelianGroup operator+(const AbelianGroup& o) const {
    std::vector<int> t = torsion_;
    t.insert(t.end(), o.torsion_.begin(), o.torsion_.end());
    return {free_rank_ + o.free_rank_, std::move(t)};
  }
  bool operator==(const AbelianGroup&) const = default;

  AbelianGroup torsion_part() const { return {0, torsion_}; }

  std::string str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank_ > 0) {
      os << "Z";
      if (free_rank_ > 1) os << "^" << free_rank_;
      first = false;
    }
    for (int e : torsion_) {
      os << (first ? "" : "+") << "Z/p" << (e > 1 ? "^" + std::to_string(e) : "");
      first = false;
    }
    return os.str();
  }

 private:
  std::int64_t free_rank_ = 0;
  std::vector<int> torsion_;
};

// Column-sparse integer matrix. Each column lists (row, value) pairs with
// strictly increasing rows and nonzero values.
using Entry = std::pair<std::uint32_t, std::int64_t>;
using SparseVec = std::vector<Entry>;

inline void normalize(SparseVec& v) {
  std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  SparseVec out;
  out.reserve(v.size());
  for (const auto& [r, x] : v) {
    if (!out.empty() && out.back().first == r) {
      if (__builtin_add_overflow(out.back().second, x, &out.back().second))
        throw std::overflow_error("sparse entry overflow");
    } else {
      out.emplace_back(r, x);
    }
    if (out.back().second == 0) out.pop_back();
  }
  v = std::move(out);
}

inline SparseVec scaled(const SparseVec& v, std::int64_t c) {
  SparseVec out;
  if (c == 0) return out;
  out.reserve(v.size());
  for (const auto& [r, x] : v) {
    std::int64_t y;
    if (__builtin_mul_overflow(x, c, &y)) throw std::overflow_error("sparse entry overflow");
    out.emplace_back(r, y);
  }
  return out;
}

struct SparseMatrix {
  std::size_t rows = 0;
  std::vector<SparseVec> cols;

  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t r) : rows(r) {}

  std::size_t ncols() const noexcept { return cols.size(); }

  void append(SparseVec c) {
    normalize(c);
    if (!c.empty() && c.back().first >= rows) throw std::out_of_range("column entry outside row range");
    cols.push_back(std::move(c));
  }

  // Row-major dense input, mainly for tests and small examples.
  static SparseMatrix from_rows(const std::vector<std::vector<std::int64_t>>& dense) {
    SparseMatrix m(dense.size());
    const std::size_t nc = dense.empty() ? 0 : dense.front().size();
    for (const auto& row : dense)
      if (row.size() != nc) throw std::invalid_argument("ragged matrix");
    m.cols.resize(nc);
    for (std::size_t j = 0; j < nc; ++j)
      for (std::size_t i = 0; i < dense.size(); ++i)
        if (dense[i][j] != 0) m.cols[j].emplace_back(std::uint32_t(i), dense[i][j]);
    return m;
  }

  std::vector<std::vector<std::int64_t>> to_rows() const {
    std::vector<std::vector<std::int64_t>> d(rows, std::vector<std::int64_t>(cols.size(), 0));
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (const auto& [r, x] : cols[j]) d[r][j] = x;
    return d;
  }

  SparseMatrix& hcat(const SparseMatrix& o) {
    if (o.rows != rows) throw std::invalid_argument("hcat: row count mismatch");
    cols.insert(cols.end(), o.cols.begin(), o.cols.end());
    return *this;
  }

  // Keeps the first k rows; entries below are required to be absent.
  SparseMatrix top_rows(std::size_t k) const {
    SparseMatrix m(k);
    for (const auto& c : cols) {
      SparseVec t;
      for (const auto& e : c)
        if (e.first < k) t.push_back(e);
      m.cols.push_back(std::move(t));
    }
    return m;
  }

  // Product with another sparse matrix (this * o).
  SparseMatrix multiply(const SparseMatrix& o) const {
    if (o.rows != cols.size()) throw std::invalid_argument("multiply: shape mismatch");
    SparseMatrix m(rows);
    for (const auto& oc : o.cols) {
      SparseVec acc;
      for (const auto& [k, x] : oc) {
        auto part = scaled(cols[k], x);
        acc.insert(acc.end(), part.begin(), part.end());
      }
      m.append(std::move(acc));
    }
    return m;
  }
};

// Block diagonal stacking.
inline SparseMatrix block_diagonal(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix m(a.rows + b.rows);
  m.cols = a.cols;
  for (auto c : b.cols) {
    for (auto& e : c) e.first += std::uint32_t(a.rows);
    m.cols.push_back(std::move(c));
  }
  return m;
}

namespace detail {

struct Overflow {};
using Big = boost::multiprecision::cpp_int;

inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline Big mul(const Big& a, const Big& b) { return a * b; }
inline Big sub(const Big& a, const Big& b) { return a - b; }

inline std::int64_t abs_gcd(std::int64_t a, std::int64_t b) {
  if (a == INT64_MIN || b == INT64_MIN) throw Overflow{};
  return std::gcd(a, b);
}
inline Big abs_gcd(const Big& a, const Big& b) { return boost::multiprecision::gcd(a, b); }

// Writes x = p^e * u with p not dividing u; x must be nonzero.
template <class T>
int split_valuation(const T& x, std::int64_t p, T& unit) {
  unit = x;
  int e = 0;
  while (unit % p == 0) {
    unit /= p;
    ++e;
  }
  return e;
}

template <class T>
int valuation(const T& x, std::int64_t p) {
  T u;
  return split_valuation(x, p, u);
}

template <class T>
T pow_t(std::int64_t p, int e) {
  T r = 1;
  for (int i = 0; i < e; ++i) r = mul(r, T(p));
  return r;
}

// Divides a vector by the prime-to-p part of the gcd of its entries.
template <class T>
void strip_unit_content(std::vector<T>& v, std::int64_t p) {
  T g = 0;
  for (const auto& x : v)
    if (x != 0) {
      g = abs_gcd(g, x);
      if (g == 1) return;
    }
  if (g == 0) return;
  while (g % p == 0) g /= p;
  if (g == 1) return;
  for (auto& x : v)
    if (x != 0) x /= g;
}

template <class T>
std::int64_t to_i64(const T& x) {
  if constexpr (std::is_same_v<T, std::int64_t>) {
    return x;
  } else {
    if (x > INT64_MAX || x < INT64_MIN) throw std::overflow_error("value exceeds 64 bits");
    return static_cast<std::int64_t>(x);
  }
}

struct Components {
  std::vector<std::vector<std::uint32_t>> rows;  // per component
  std::vector<std::vector<std::uint32_t>> cols;
  std::vector<std::uint32_t> isolated_rows;
  std::vector<std::uint32_t> isolated_cols;
};

// Connected components of the bipartite row/column incidence graph.
inline Components split_components(const SparseMatrix& m) {
  const std::size_t R = m.rows, C = m.cols.size();
  std::vector<std::uint32_t> parent(R + C);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t j = 0; j < C; ++j)
    for (const auto& e : m.cols[j]) {
      auto a = find(e.first), b = find(std::uint32_t(R + j));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  Components out;
  std::vector<int> slot(R + C, -1);
  std::vector<char> row_used(R, 0), col_used(C, 0);
  for (std::size_t j = 0; j < C; ++j)
    for (const auto& e : m.cols[j]) row_used[e.first] = col_used[j] = 1;
  for (std::size_t x = 0; x < R + C; ++x) {
    const bool is_row = x < R;
    if (is_row ? !row_used[x] : !col_used[x - R]) {
      (is_row ? out.isolated_rows : out.isolated_cols).push_back(std::uint32_t(is_row ? x : x - R));
      continue;
    }
    auto r = find(std::uint32_t(x));
    if (slot[r] < 0) {
      slot[r] = int(out.rows.size());
      out.rows.emplace_back();
      out.cols.emplace_back();
    }
    if (is_row)
      out.rows[slot[r]].push_back(std::uint32_t(x));
    else
      out.cols[slot[r]].push_back(std::uint32_t(x - R));
  }
  return out;
}

// Local Smith form of a dense block (rows = generators, cols = relations).
// Reports the exponent of each pivot by the original row it was taken from.
template <class T>
void local_smith(std::vector<std::vector<T>> a, std::int64_t p,
                 std::vector<std::pair<std::size_t, int>>& pivots) {
  const std::size_t R = a.size(), C = R ? a[0].size() : 0;
  std::vector<char> row_live(R, 1), col_live(C, 1);
  for (;;) {
    int best = -1;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < R && best != 0; ++i) {
      if (!row_live[i]) continue;
      for (std::size_t j = 0; j < C; ++j) {
        if (!col_live[j] || a[i][j] == 0) continue;
        int v = valuation(a[i][j], p);
        if (best < 0 || v < best) {
          best = v;
          bi = i;
          bj = j;
          if (v == 0) break;
        }
      }
    }
    if (best < 0) return;
    T unit;
    split_valuation(a[bi][bj], p, unit);
    const T pe = pow_t<T>(p, best);
    for (std::size_t r = 0; r < R; ++r) {
      if (r == bi || !row_live[r] || a[r][bj] == 0) continue;
      const T c = a[r][bj] / pe;
      for (std::size_t j = 0; j < C; ++j) {
        if (!col_live[j]) continue;
        T lhs = unit == 1 ? a[r][j] : mul(unit, a[r][j]);
        a[r][j] = a[bi][j] == 0 ? lhs : sub(lhs, mul(c, a[bi][j]));
      }
      strip_unit_content(a[r], p);
    }
    row_live[bi] = 0;
    col_live[bj] = 0;
    pivots.emplace_back(bi, best);
  }
}

// Kernel of a dense block by column elimination; returns a Z_(p)-basis.
template <class T>
std::vector<std::vector<T>> local_kernel(const std::vector<std::vector<T>>& a, std::size_t ncols,
                                         std::int64_t p) {
  const std::size_t R = a.size(), C = ncols;
  // Column j stored as [A-part (R entries) | V-part (C entries)].
  std::vector<std::vector<T>> col(C, std::vector<T>(R + C, T(0)));
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) col[j][i] = a[i][j];
  for (std::size_t j = 0; j < C; ++j) col[j][R + j] = 1;
  std::vector<char> live(C, 1);
  for (std::size_t i = 0; i < R; ++i) {
    int best = -1;
    std::size_t bj = 0;
    for (std::size_t j = 0; j < C; ++j) {
      if (!live[j] || col[j][i] == 0) continue;
      int v = valuation(col[j][i], p);
      if (best < 0 || v < best) {
        best = v;
        bj = j;
        if (v == 0) break;
      }
    }
    if (best < 0) continue;
    T unit;
    split_valuation(col[bj][i], p, unit);
    const T pe = pow_t<T>(p, best);
    for (std::size_t j = 0; j < C; ++j) {
      if (j == bj || !live[j] || col[j][i] == 0) continue;
      const T c = col[j][i] / pe;
      for (std::size_t k = i; k < R + C; ++k) {
        T lhs = unit == 1 ? col[j][k] : mul(unit, col[j][k]);
        col[j][k] = col[bj][k] == 0 ? lhs : sub(lhs, mul(c, col[bj][k]));
      }
      strip_unit_content(col[j], p);
    }
    live[bj] = 0;
  }
  std::vector<std::vector<T>> out;
  for (std::size_t j = 0; j < C; ++j)
    if (live[j]) out.emplace_back(col[j].begin() + std::ptrdiff_t(R), col[j].end());
  return out;
}

template <class T>
std::vector<std::vector<T>> dense_block(const SparseMatrix& m, const std::vector<std::uint32_t>& rows,
                                        const std::vector<std::uint32_t>& cols) {
  std::vector<std::int64_t> row_pos(m.rows, -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = std::int64_t(i);
  std::vector<std::vector<T>> a(rows.size(), std::vector<T>(cols.size(), T(0)));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (const auto& [r, x] : m.cols[cols[j]]) a[std::size_t(row_pos[r])][j] = T(x);
  return a;
}

}  // namespace detail

// One cyclic summand of a cokernel, attributed to a generator row.
struct Summand {
  std::size_t row;
  int exponent;  // 0 means a free summand
};

struct CokernelDetail {
  AbelianGroup group;
  std::vector<Summand> summands;  // sorted by row
};

// p-local cokernel of m : Z^cols -> Z^rows with an attribution of each cyclic
// summand to the generator row it was pivoted on (free rows are the leftovers).
inline CokernelDetail cokernel_detail(const SparseMatrix& m, const Prime& prime) {
  const std::int64_t p = prime.value();
  const auto comps = detail::split_components(m);
  std::vector<Summand> summands;
  for (auto r : comps.isolated_rows) summands.push_back({r, 0});
  for (std::size_t c = 0; c < comps.rows.size(); ++c) {
    const auto& rows = comps.rows[c];
    const auto& cols = comps.cols[c];
    std::vector<std::pair<std::size_t, int>> piv;
    try {
      detail::local_smith(detail::dense_block<std::int64_t>(m, rows, cols), p, piv);
    } catch (const detail::Overflow&) {
      piv.clear();
      detail::local_smith(detail::dense_block<detail::Big>(m, rows, cols), p, piv);
    }
    std::vector<char> pivoted(rows.size(), 0);
    for (auto [i, e] : piv) {
      pivoted[i] = 1;
      if (e > 0) summands.push_back({rows[i], e});
    }
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (!pivoted[i]) summands.push_back({rows[i], 0});
  }
  std::sort(summands.begin(), summands.end(), [](const Summand& a, const Summand& b) { return a.row < b.row; });
  std::int64_t rank = 0;
  std::vector<int> tors;
  for (const auto& s : summands) (s.exponent == 0 ? (void)++rank : tors.push_back(s.exponent));
  return {AbelianGroup(rank, std::move(tors)), std::move(summands)};
}

inline AbelianGroup cokernel_p(const SparseMatrix& m, const Prime& p) { return cokernel_detail(m, p).group; }

inline AbelianGroup cokernel_p(const std::vector<std::vector<std::int64_t>>& rows, const Prime& p) {
  return cokernel_p(SparseMatrix::from_rows(rows), p);
}

// Z_(p)-basis of {x : m x = 0}, as integer vectors indexed by columns of m.
inline std::vector<SparseVec> nullspace_p(const SparseMatrix& m, const Prime& prime) {
  const std::int64_t p = prime.value();
  const auto comps = detail::split_components(m);
  std::vector<SparseVec> out;
  for (auto c : comps.isolated_cols) out.push_back({{c, 1}});
  for (std::size_t k = 0; k < comps.rows.size(); ++k) {
    const auto& rows = comps.rows[k];
    const auto& cols = comps.cols[k];
    auto emit = [&](const auto& basis) {
      for (const auto& v : basis) {
        SparseVec s;
        for (std::size_t j = 0; j < v.size(); ++j)
          if (v[j] != 0) s.emplace_back(cols[j], detail::to_i64(v[j]));
        normalize(s);
        out.push_back(std::move(s));
      }
    };
    try {
      emit(detail::local_kernel(detail::dense_block<std::int64_t>(m, rows, cols), cols.size(), p));
    } catch (const detail::Overflow&) {
      emit(detail::local_kernel(detail::dense_block<detail::Big>(m, rows, cols), cols.size(), p));
    }
  }
  return out;
}

// Subgroup of coker(rel) generated by the columns of gens, presented on those
// generators: returns the relation matrix among them (rows = gens columns).
inline SparseMatrix subgroup_relations(const SparseMatrix& gens, const SparseMatrix& rel, const Prime& p) {
  if (gens.rows != rel.rows) throw std::invalid_argument("subgroup_relations: row mismatch");
  SparseMatrix joint = gens;
  joint.hcat(rel);
  const std::size_t k = gens.ncols();
  SparseMatrix out(k);
  for (const auto& v : nullspace_p(joint, p)) {
    SparseVec z;
    for (const auto& e : v)
      if (e.first < k) z.push_back(e);
    if (!z.empty()) out.cols.push_back(std::move(z));
  }
  return out;
}

inline AbelianGroup subgroup_group(const SparseMatrix& gens, const SparseMatrix& rel, const Prime& p) {
  return cokernel_p(subgroup_relations(gens, rel, p), p);
}

// Generators (in source coordinates) of the kernel of the map
// coker(rel_src) -> coker(rel_tgt) induced by f (rows = target, cols = source).
inline SparseMatrix kernel_generators(const SparseMatrix& f, std::size_t src_dim, const SparseMatrix& rel_tgt,
                                      const Prime& p) {
  if (f.ncols() != src_dim) throw std::invalid_argument("kernel_generators: source dimension mismatch");
  if (f.rows != rel_tgt.rows) throw std::invalid_argument("kernel_generators: target mismatch");
  SparseMatrix joint = f;
  joint.hcat(rel_tgt);
  SparseMatrix out(src_dim);
  for (const auto& v : nullspace_p(joint, p)) {
    SparseVec x;
    for (const auto& e : v)
      if (e.first < src_dim) x.push_back(e);
    if (!x.empty()) out.cols.push_back(std::move(x));
  }
  return out;
}

// True when every column of extra already lies in the image of rel.
inline bool columns_in_image(const SparseMatrix& rel, const SparseMatrix& extra, const Prime& p) {
  if (extra.ncols() == 0) return true;
  SparseMatrix joint = rel;
  joint.hcat(extra);
  return cokernel_p(rel, p) == cokernel_p(joint, p);
}

}  // namespace thh
