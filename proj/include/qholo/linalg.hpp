#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qholo/ratfunc.hpp"

namespace qholo {

/// Dense row-major matrix over an exact scalar.
template <class T>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T()) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  T& at(size_t i, size_t j) { return data_[i * cols_ + j]; }
  const T& at(size_t i, size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(size_t i) const {
    return {data_.begin() + static_cast<long>(i * cols_),
            data_.begin() + static_cast<long>((i + 1) * cols_)};
  }

 private:
  size_t rows_, cols_;
  std::vector<T> data_;
};

/// Maintains a reduced row basis over a field; add_row reports whether the
/// row enlarged the span. Rows are normalized to leading coefficient 1 and
/// kept sorted by leading column, so the state after a fixed insertion
/// sequence is deterministic.
template <class F>
class IncrementalRowBasis {
 public:
  explicit IncrementalRowBasis(size_t cols) : cols_(cols) {}

  size_t rank() const { return rows_.size(); }

  bool add_row(std::vector<F> row) {
    if (row.size() != cols_) throw std::invalid_argument("row width mismatch");
    for (const auto& [lead, basis] : rows_) {
      if (row[lead].is_zero()) continue;
      F factor = row[lead];
      for (size_t j = lead; j < cols_; ++j) row[j] -= factor * basis[j];
    }
    size_t lead = cols_;
    for (size_t j = 0; j < cols_; ++j)
      if (!row[j].is_zero()) { lead = j; break; }
    if (lead == cols_) return false;
    F inv = row[lead].inv();
    for (size_t j = lead; j < cols_; ++j) row[j] = row[j] * inv;
    // Reduce existing rows against the newcomer to keep full reduction.
    for (auto& [l, basis] : rows_) {
      if (basis[lead].is_zero()) continue;
      F factor = basis[lead];
      for (size_t j = lead; j < cols_; ++j) basis[j] -= factor * row[j];
    }
    auto pos = rows_.begin();
    while (pos != rows_.end() && pos->first < lead) ++pos;
    rows_.insert(pos, {lead, std::move(row)});
    return true;
  }

 private:
  size_t cols_;
  std::vector<std::pair<size_t, std::vector<F>>> rows_;
};

template <class F>
int exact_rank(const Matrix<F>& m) {
  IncrementalRowBasis<F> basis(m.cols());
  for (size_t i = 0; i < m.rows(); ++i) basis.add_row(m.row(i));
  return static_cast<int>(basis.rank());
}

namespace detail {

/// Strips integer content and normalizes the sign of the first nonzero
/// entry to +1. Zero rows pass through.
inline void strip_content(std::vector<mpz_class>& row) {
  mpz_class g(0);
  for (const auto& v : row) {
    if (v == 0) continue;
    g = gcd_z(g, v);
    if (g == 1) break;
  }
  if (g == 0) return;
  for (auto& v : row)
    if (g != 1) v /= g;
  for (const auto& v : row) {
    if (v == 0) continue;
    if (v < 0)
      for (auto& w : row) w = -w;
    break;
  }
}

inline std::vector<mpz_class> rat_row_to_integers(const std::vector<Rat>& row) {
  mpz_class l(1);
  for (const Rat& v : row)
    if (!v.is_zero()) l = lcm_z(l, v.den());
  std::vector<mpz_class> out(row.size());
  for (size_t j = 0; j < row.size(); ++j) out[j] = row[j].num() * (l / row[j].den());
  strip_content(out);
  return out;
}

}  // namespace detail

/// Canonical nullspace basis via fraction-free Gauss-Jordan elimination with
/// per-row content stripping. One basis vector per free column of the
/// reduced echelon form, scaled to coprime integer entries with a positive
/// entry at the free column.
inline std::vector<std::vector<Rat>> exact_nullspace(
    const std::vector<std::vector<mpz_class>>& input_rows, size_t cols) {
  std::vector<std::vector<mpz_class>> rows;
  rows.reserve(input_rows.size());
  for (auto r : input_rows) {
    if (r.size() != cols) throw std::invalid_argument("row width mismatch");
    detail::strip_content(r);
    bool zero = true;
    for (const auto& v : r)
      if (v != 0) { zero = false; break; }
    if (!zero) rows.push_back(std::move(r));
  }

  std::vector<int> pivot_col;  // per eliminated row
  std::vector<std::vector<mpz_class>> basis_rows;
  size_t next = 0;
  for (size_t col = 0; col < cols && next < rows.size(); ++col) {
    size_t sel = rows.size();
    for (size_t i = next; i < rows.size(); ++i)
      if (rows[i][col] != 0) { sel = i; break; }
    if (sel == rows.size()) continue;
    std::swap(rows[next], rows[sel]);
    const std::vector<mpz_class> piv = rows[next];
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == next || rows[i][col] == 0) continue;
      const mpz_class a = piv[col], b = rows[i][col];
      for (size_t j = 0; j < cols; ++j) rows[i][j] = rows[i][j] * a - piv[j] * b;
      detail::strip_content(rows[i]);
    }
    pivot_col.push_back(static_cast<int>(col));
    ++next;
  }
  rows.resize(next);

  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[static_cast<size_t>(c)] = true;

  std::vector<std::vector<Rat>> basis;
  for (size_t free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<Rat> v(cols, Rat(0));
    v[free_col] = Rat(1);
    for (size_t i = 0; i < rows.size(); ++i) {
      size_t pc = static_cast<size_t>(pivot_col[i]);
      if (rows[i][free_col] != 0)
        v[pc] = Rat(-rows[i][free_col], rows[i][pc]);
    }
    // integer-normalize: coprime entries, positive at the free column
    std::vector<mpz_class> zrow = detail::rat_row_to_integers(v);
    if (zrow[free_col] < 0)
      for (auto& w : zrow) w = -w;
    for (size_t j = 0; j < cols; ++j) v[j] = Rat(zrow[j], mpz_class(1));
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::vector<std::vector<Rat>> exact_nullspace(const Matrix<Rat>& m) {
  std::vector<std::vector<mpz_class>> rows;
  rows.reserve(m.rows());
  for (size_t i = 0; i < m.rows(); ++i)
    rows.push_back(detail::rat_row_to_integers(m.row(i)));
  return exact_nullspace(rows, m.cols());
}

/// Generic-field canonical nullspace (reduced echelon form, one vector per
/// free column, entry 1 at the free column). Used for cyclotomic scalars.
template <class F>
std::vector<std::vector<F>> exact_nullspace_field(const Matrix<F>& m) {
  const size_t cols = m.cols();
  std::vector<std::vector<F>> rows;
  for (size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));

  std::vector<int> pivot_col;
  size_t next = 0;
  for (size_t col = 0; col < cols && next < rows.size(); ++col) {
    size_t sel = rows.size();
    for (size_t i = next; i < rows.size(); ++i)
      if (!rows[i][col].is_zero()) { sel = i; break; }
    if (sel == rows.size()) continue;
    std::swap(rows[next], rows[sel]);
    F inv = rows[next][col].inv();
    for (size_t j = 0; j < cols; ++j) rows[next][j] = rows[next][j] * inv;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == next || rows[i][col].is_zero()) continue;
      F factor = rows[i][col];
      for (size_t j = 0; j < cols; ++j) rows[i][j] -= factor * rows[next][j];
    }
    pivot_col.push_back(static_cast<int>(col));
    ++next;
  }
  rows.resize(next);

  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[static_cast<size_t>(c)] = true;
  std::vector<std::vector<F>> basis;
  for (size_t free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<F> v(cols, F(0));
    v[free_col] = F(1);
    for (size_t i = 0; i < rows.size(); ++i)
      v[static_cast<size_t>(pivot_col[i])] = -rows[i][free_col];
    basis.push_back(std::move(v));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// word-size modular arithmetic, prime stream, CRT and rational reconstruction
// ---------------------------------------------------------------------------

namespace modp {

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline uint64_t powmod(uint64_t base, uint64_t exp, uint64_t p) {
  uint64_t acc = 1 % p;
  base %= p;
  while (exp) {
    if (exp & 1) acc = mulmod(acc, base, p);
    base = mulmod(base, base, p);
    exp >>= 1;
  }
  return acc;
}

inline uint64_t invmod(uint64_t a, uint64_t p) { return powmod(a, p - 2, p); }

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t sp : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n == sp) return true;
    if (n % sp == 0) return false;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) { d >>= 1; ++s; }
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) { composite = false; break; }
    }
    if (composite) return false;
  }
  return true;
}

/// Fixed descending stream of 62-bit primes; deterministic across runs.
class PrimeStream {
 public:
  PrimeStream() : next_((1ull << 62) - 1) {}
  uint64_t next() {
    while (!is_prime_u64(next_)) next_ -= 2;
    return std::exchange(next_, next_ - 2);
  }

 private:
  uint64_t next_;
};

inline uint64_t reduce_mpz(const mpz_class& v, uint64_t p) {
  mpz_class m = v % mpz_class(static_cast<unsigned long>(p));
  if (m < 0) m += mpz_class(static_cast<unsigned long>(p));
  return m.get_ui();
}

struct RrefModP {
  std::vector<int> pivot_cols;
  std::vector<std::vector<uint64_t>> rows;  // reduced rows, pivot entries 1
};

/// Reduced echelon form of integer rows mod p.
inline RrefModP rref_mod_p(const std::vector<std::vector<mpz_class>>& input,
                           size_t cols, uint64_t p) {
  std::vector<std::vector<uint64_t>> rows;
  rows.reserve(input.size());
  for (const auto& r : input) {
    std::vector<uint64_t> m(cols);
    bool zero = true;
    for (size_t j = 0; j < cols; ++j) {
      m[j] = reduce_mpz(r[j], p);
      zero = zero && m[j] == 0;
    }
    if (!zero) rows.push_back(std::move(m));
  }
  RrefModP out;
  size_t next = 0;
  for (size_t col = 0; col < cols && next < rows.size(); ++col) {
    size_t sel = rows.size();
    for (size_t i = next; i < rows.size(); ++i)
      if (rows[i][col] != 0) { sel = i; break; }
    if (sel == rows.size()) continue;
    std::swap(rows[next], rows[sel]);
    uint64_t inv = invmod(rows[next][col], p);
    for (size_t j = col; j < cols; ++j) rows[next][j] = mulmod(rows[next][j], inv, p);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == next || rows[i][col] == 0) continue;
      uint64_t f = rows[i][col];
      for (size_t j = col; j < cols; ++j) {
        uint64_t sub = mulmod(f, rows[next][j], p);
        rows[i][j] = (rows[i][j] + p - sub) % p;
      }
    }
    out.pivot_cols.push_back(static_cast<int>(col));
    ++next;
  }
  rows.resize(next);
  out.rows = std::move(rows);
  return out;
}

/// Wang-style rational reconstruction: residue mod M -> n/d with
/// |n|, d <= sqrt(M/2), gcd(d, M) = 1. Returns nullopt when none exists.
inline std::optional<Rat> rational_reconstruct(const mpz_class& residue,
                                               const mpz_class& modulus) {
  mpz_class bound;
  mpz_sqrt(bound.get_mpz_t(), mpz_class(modulus / 2).get_mpz_t());
  mpz_class r0 = modulus, r1 = residue % modulus;
  if (r1 < 0) r1 += modulus;
  mpz_class t0 = 0, t1 = 1;
  while (r1 > bound) {
    mpz_class quot = r0 / r1;
    mpz_class r2 = r0 - quot * r1;
    mpz_class t2 = t0 - quot * t1;
    r0 = std::move(r1);
    r1 = std::move(r2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (t1 == 0) return std::nullopt;
  mpz_class den = t1 < 0 ? mpz_class(-t1) : t1;
  mpz_class num = t1 < 0 ? mpz_class(-r1) : r1;
  if (den > bound || gcd_z(den, modulus) != 1) return std::nullopt;
  if (gcd_z(num < 0 ? mpz_class(-num) : num, den) != 1) return std::nullopt;
  return Rat(std::move(num), std::move(den));
}

}  // namespace modp

/// Exact canonical nullspace of large integer systems: reduced echelon
/// computation mod a deterministic stream of 62-bit primes, Chinese
/// remaindering, rational reconstruction, and an exact residual check of
/// every reconstructed vector against the input rows. Falls back to pure
/// fraction-free elimination for small systems.
inline std::vector<std::vector<Rat>> nullspace_integer_system(
    const std::vector<std::vector<mpz_class>>& rows, size_t cols) {
  if (cols <= 48 || rows.size() <= 48) return exact_nullspace(rows, cols);

  auto verify = [&](const std::vector<std::vector<Rat>>& basis) {
    for (const auto& v : basis) {
      for (const auto& row : rows) {
        Rat acc(0);
        for (size_t j = 0; j < cols; ++j) {
          if (row[j] == 0 || v[j].is_zero()) continue;
          acc += Rat(row[j], mpz_class(1)) * v[j];
        }
        if (!acc.is_zero()) return false;
      }
    }
    return true;
  };

  modp::PrimeStream primes;
  constexpr int kMaxPrimes = 25;
  std::vector<int> pivot_cols;
  // Accumulated CRT images of the nullspace-defining echelon entries:
  // for free column f and pivot row i we track rows[i][f].
  std::vector<std::vector<mpz_class>> residues;  // per free col, per pivot row
  mpz_class modulus = 1;
  std::vector<size_t> free_cols;

  for (int used = 0; used < kMaxPrimes; ++used) {
    uint64_t p = primes.next();
    modp::RrefModP rref = modp::rref_mod_p(rows, cols, p);
    if (rref.pivot_cols.size() == cols) return {};  // full column rank

    if (!pivot_cols.empty() && rref.pivot_cols.size() < pivot_cols.size())
      continue;  // this prime lost rank; skip it
    if (pivot_cols.empty() || rref.pivot_cols != pivot_cols) {
      // (Re)start accumulation on this prime's pivot structure.
      pivot_cols = rref.pivot_cols;
      modulus = 1;
      free_cols.clear();
      std::vector<bool> is_pivot(cols, false);
      for (int c : pivot_cols) is_pivot[static_cast<size_t>(c)] = true;
      for (size_t j = 0; j < cols; ++j)
        if (!is_pivot[j]) free_cols.push_back(j);
      residues.assign(free_cols.size(),
                      std::vector<mpz_class>(pivot_cols.size(), 0));
    }

    mpz_class pz(static_cast<unsigned long>(p));
    for (size_t f = 0; f < free_cols.size(); ++f) {
      for (size_t i = 0; i < pivot_cols.size(); ++i) {
        uint64_t image = rref.rows[i][free_cols[f]];
        if (modulus == 1) {
          residues[f][i] = mpz_class(static_cast<unsigned long>(image));
        } else {
          // CRT lift: x = a (mod modulus), x = image (mod p)
          mpz_class a = residues[f][i];
          mpz_class diff = mpz_class(static_cast<unsigned long>(image)) - a;
          mpz_class mod_mod_p = modulus % pz;
          if (mod_mod_p < 0) mod_mod_p += pz;
          uint64_t inv = modp::invmod(mod_mod_p.get_ui(), p);
          mpz_class t = (diff * mpz_class(static_cast<unsigned long>(inv))) % pz;
          if (t < 0) t += pz;
          residues[f][i] = a + modulus * t;
        }
      }
    }
    modulus *= pz;

    // Attempt reconstruction of all basis vectors.
    std::vector<std::vector<Rat>> basis;
    bool ok = true;
    for (size_t f = 0; f < free_cols.size() && ok; ++f) {
      std::vector<Rat> v(cols, Rat(0));
      v[free_cols[f]] = Rat(1);
      for (size_t i = 0; i < pivot_cols.size(); ++i) {
        auto rec = modp::rational_reconstruct(residues[f][i], modulus);
        if (!rec) { ok = false; break; }
        v[static_cast<size_t>(pivot_cols[i])] = -*rec;
      }
      if (ok) basis.push_back(std::move(v));
    }
    if (!ok || !verify(basis)) continue;

    for (auto& v : basis) {
      std::vector<mpz_class> z = detail::rat_row_to_integers(v);
      for (size_t j = 0; j < cols; ++j) v[j] = Rat(z[j], mpz_class(1));
    }
    // positive entry at each vector's own free column
    for (size_t f = 0; f < basis.size(); ++f)
      if (basis[f][free_cols[f]].sign() < 0)
        for (auto& x : basis[f]) x = -x;
    return basis;
  }
  throw std::logic_error("nullspace_integer_system: prime budget exhausted");
}

/// Max scalar rank over seeded random evaluation points u = x, x an integer
/// in [2, 2^16]; entries with a vanishing denominator at x trigger a
/// resample (bounded retries). Lower-bounds the symbolic rank, with
/// equality with high probability.
template <class K>
int probabilistic_rank(const Matrix<RatFunc<K>>& m, int samples, uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("probabilistic_rank: samples >= 1");
  std::mt19937_64 rng(seed);
  auto draw = [&rng]() -> long {
    return 2 + static_cast<long>(rng() % 65535ull);
  };
  int best = 0;
  for (int s = 0; s < samples; ++s) {
    constexpr int kRetries = 24;
    int attempt = 0;
    for (; attempt < kRetries; ++attempt) {
      K point(draw());
      bool pole = false;
      Matrix<K> eval(m.rows(), m.cols());
      for (size_t i = 0; i < m.rows() && !pole; ++i)
        for (size_t j = 0; j < m.cols(); ++j) {
          const RatFunc<K>& e = m.at(i, j);
          if (e.den().eval(point).is_zero()) { pole = true; break; }
          eval.at(i, j) = e.eval(point);
        }
      if (pole) continue;
      best = std::max(best, exact_rank(eval));
      break;
    }
    if (attempt == kRetries)
      throw std::domain_error("probabilistic_rank: all sample points hit poles");
  }
  return best;
}

}  // namespace qholo
