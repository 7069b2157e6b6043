#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qholo/linalg.hpp"

using namespace qholo;

namespace {

Matrix<Rat> make(std::initializer_list<std::initializer_list<long>> rows) {
  size_t r = rows.size(), c = rows.begin()->size();
  Matrix<Rat> m(r, c);
  size_t i = 0;
  for (const auto& row : rows) {
    size_t j = 0;
    for (long v : row) m.at(i, j++) = Rat(v);
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("exact_nullspace on the hand-eliminated examples") {
  CHECK(exact_nullspace(make({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})).empty());

  auto zero = exact_nullspace(make({{0, 0, 0}, {0, 0, 0}}));
  REQUIRE(zero.size() == 3);
  CHECK(zero[0] == std::vector<Rat>{Rat(1), Rat(0), Rat(0)});
  CHECK(zero[1] == std::vector<Rat>{Rat(0), Rat(1), Rat(0)});
  CHECK(zero[2] == std::vector<Rat>{Rat(0), Rat(0), Rat(1)});

  auto one = exact_nullspace(make({{1, 1, 0}, {0, 1, 1}}));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == std::vector<Rat>{Rat(1), Rat(-1), Rat(1)});
}

TEST_CASE("nullspace vectors are integer-normalized and coprime") {
  // 2x + 4y = 0 -> (-2, 1): scaled clear of fractions, positive free entry
  auto basis = exact_nullspace(make({{2, 4}}));
  REQUIRE(basis.size() == 1);
  CHECK(basis[0] == std::vector<Rat>{Rat(-2), Rat(1)});
}

TEST_CASE("exact_rank over the rationals") {
  CHECK(exact_rank(make({{1, 2}, {2, 4}})) == 1);
  CHECK(exact_rank(make({{1, 2}, {3, 4}})) == 2);
  CHECK(exact_rank(make({{0, 0}, {0, 0}})) == 0);
}

TEST_CASE("modular nullspace agrees with fraction-free elimination") {
  // 60x64 integer system with planted nullity: A = [B | B*C] vanishes on
  // the columns (C*x, -x).
  std::mt19937_64 rng(424242);
  const size_t n = 60, extra = 4;
  std::vector<std::vector<mpz_class>> rows(n, std::vector<mpz_class>(n + extra));
  std::vector<std::vector<long>> B(n, std::vector<long>(n)), C(n, std::vector<long>(extra));
  for (auto& r : B)
    for (auto& v : r) v = static_cast<long>(rng() % 19) - 9;
  for (auto& r : C)
    for (auto& v : r) v = static_cast<long>(rng() % 19) - 9;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) rows[i][j] = B[i][j];
    for (size_t e = 0; e < extra; ++e) {
      long acc = 0;
      for (size_t j = 0; j < n; ++j) acc += B[i][j] * C[j][e];
      rows[i][n + e] = acc;
    }
  }
  auto fast = nullspace_integer_system(rows, n + extra);
  auto slow = exact_nullspace(rows, n + extra);
  CHECK(fast == slow);
  CHECK(fast.size() >= extra);
}

TEST_CASE("probabilistic_rank lower-bounds and matches the symbolic rank") {
  // constants: exact rank regardless of sample count
  Matrix<RatFunc<Rat>> c(2, 2);
  c.at(0, 0) = RatFunc<Rat>(1);
  c.at(0, 1) = RatFunc<Rat>(2);
  c.at(1, 0) = RatFunc<Rat>(2);
  c.at(1, 1) = RatFunc<Rat>(4);
  CHECK(probabilistic_rank(c, 1, 1) == 1);
  CHECK(probabilistic_rank(c, 3, 99) == 1);

  // q - 1 is a nonzero rational function: rank 1 (the sample range starts
  // at 2, so the root q = 1 is never drawn)
  Matrix<RatFunc<Rat>> qm(1, 1);
  qm.at(0, 0) = RatFunc<Rat>(Poly<Rat>({Rat(-1), Rat(1)}));
  CHECK(probabilistic_rank(qm, 1, 7) == 1);

  // Vandermonde-style [[1,q,q^2],[1,q^2,q^4],[1,q^3,q^6]]: symbolic rank 3
  Matrix<RatFunc<Rat>> v(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      v.at(static_cast<size_t>(i), static_cast<size_t>(j)) =
          RatFunc<Rat>::u_power(static_cast<long>((i + 1) * j));
  CHECK(probabilistic_rank(v, 2, 5) == 3);
  CHECK(exact_rank(v) == 3);
}

TEST_CASE("rational reconstruction round-trips") {
  modp::PrimeStream ps;
  uint64_t p1 = ps.next(), p2 = ps.next();
  CHECK(modp::is_prime_u64(p1));
  CHECK(modp::is_prime_u64(p2));
  CHECK(p1 != p2);

  mpz_class M = mpz_class(static_cast<unsigned long>(p1)) *
                mpz_class(static_cast<unsigned long>(p2));
  // encode -22/7 mod M
  mpz_class den_inv;
  mpz_class seven(7);
  REQUIRE(mpz_invert(den_inv.get_mpz_t(), seven.get_mpz_t(), M.get_mpz_t()) != 0);
  mpz_class residue = (mpz_class(-22) * den_inv) % M;
  if (residue < 0) residue += M;
  auto rec = modp::rational_reconstruct(residue, M);
  REQUIRE(rec.has_value());
  CHECK(*rec == Rat(-22, 7));
}
