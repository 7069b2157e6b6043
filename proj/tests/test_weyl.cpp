#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qholo/weyl.hpp"

using namespace qholo;

namespace {

using Op = Operator<Rat>;

RatFunc<Rat> qpow(long e) { return RatFunc<Rat>::q_power(e); }

Op term1(int a, int b, RatFunc<Rat> c, OpVariant v = OpVariant::Wr) {
  Op op(1, v);
  op.add_term(Monomial({a}, {b}), std::move(c));
  return op;
}

Op random_op(std::mt19937_64& rng, int r, int terms, OpVariant v = OpVariant::Wr) {
  std::uniform_int_distribution<int> exp_dist(v == OpVariant::Wr ? -2 : 0, 2);
  std::uniform_int_distribution<long> c_dist(-4, 4);
  std::uniform_int_distribution<long> e_dist(0, 3);
  Op op(r, v);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> a(static_cast<size_t>(r)), b(static_cast<size_t>(r));
    for (auto& x : a) x = exp_dist(rng);
    for (auto& x : b) x = exp_dist(rng);
    long c = c_dist(rng);
    if (c == 0) c = 1;
    op.add_term(Monomial(std::move(a), std::move(b)),
                RatFunc<Rat>(c) * qpow(e_dist(rng)));
  }
  return op;
}

}  // namespace

TEST_CASE("defining commutation in normal form") {
  Op L = term1(1, 0, RatFunc<Rat>(1));
  Op M = term1(0, 1, RatFunc<Rat>(1));

  // L * M = q M L
  Op LM = op_mul(L, M);
  REQUIRE(LM.term_count() == 1);
  CHECK(LM.coeff(Monomial({1}, {1})) == qpow(1));

  // different indices commute: L_1 * M_2 = M_2 L_1
  Op L1(2, OpVariant::Wr), M2(2, OpVariant::Wr);
  L1.add_term(Monomial({1, 0}, {0, 0}), RatFunc<Rat>(1));
  M2.add_term(Monomial({0, 0}, {0, 1}), RatFunc<Rat>(1));
  Op prod = op_mul(L1, M2);
  CHECK(prod.coeff(Monomial({1, 0}, {0, 1})) == RatFunc<Rat>(1));
}

TEST_CASE("square of L - qM^2 in W_1+") {
  Op P(1, OpVariant::WrPlus);
  P.add_term(Monomial({1}, {0}), RatFunc<Rat>(1));
  P.add_term(Monomial({0}, {2}), -qpow(1));
  Op sq = op_mul(P, P);

  Op expect(1, OpVariant::WrPlus);
  expect.add_term(Monomial({2}, {0}), RatFunc<Rat>(1));
  expect.add_term(Monomial({1}, {2}), -(qpow(1) + qpow(3)));
  expect.add_term(Monomial({0}, {4}), qpow(2));
  CHECK(sq == expect);
}

TEST_CASE("addition and scaling") {
  std::mt19937_64 rng(1001);
  Op A = random_op(rng, 1, 3);
  Op zero(1, OpVariant::Wr);
  CHECK(op_add(A, zero) == A);
  CHECK(op_add(A, op_neg(A)).is_zero());

  Op L = term1(1, 0, RatFunc<Rat>(1));
  Op M = term1(0, 1, RatFunc<Rat>(1));
  CHECK(op_add(op_add(L, M), op_sub(L, M)) == op_scale(RatFunc<Rat>(2), L));
}

TEST_CASE("leading monomial under the graded-lex order") {
  // degree beats everything: M^3 leads L^2
  Op A(1, OpVariant::WrPlus);
  A.add_term(Monomial({2}, {0}), RatFunc<Rat>(1));
  A.add_term(Monomial({0}, {3}), -qpow(1));
  CHECK(op_leading_monomial(A) == Monomial({0}, {3}));

  Op single = term1(2, 5, qpow(2));
  CHECK(op_leading_monomial(single) == Monomial({2}, {5}));

  // equal degree: L_1 beats L_2 lexicographically
  Op B(2, OpVariant::WrPlus);
  B.add_term(Monomial({1, 0}, {0, 1}), qpow(1));
  B.add_term(Monomial({0, 1}, {1, 0}), RatFunc<Rat>(1));
  CHECK(op_leading_monomial(B) == Monomial({1, 0}, {0, 1}));

  CHECK_THROWS_AS(op_leading_monomial(Op(1, OpVariant::Wr)), std::domain_error);
}

TEST_CASE("monomial dominance is a componentwise partial order") {
  CHECK(monomial_dominates(Monomial({2}, {3}), Monomial({2}, {1})));
  CHECK_FALSE(monomial_dominates(Monomial({2}, {1}), Monomial({1}, {2})));

  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<int> d(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    Monomial a({d(rng), d(rng)}, {d(rng), d(rng)});
    Monomial b({d(rng), d(rng)}, {d(rng), d(rng)});
    Monomial c({d(rng), d(rng)}, {d(rng), d(rng)});
    CHECK(monomial_dominates(a, a));
    if (monomial_dominates(a, b) && monomial_dominates(b, a)) CHECK(a == b);
    if (monomial_dominates(a, b) && monomial_dominates(b, c))
      CHECK(monomial_dominates(a, c));
  }
}

TEST_CASE("clear_to_positive multiplies by the minimal monomial") {
  // L^-1 - M  ->  1 - qML
  Op A(1, OpVariant::Wr);
  A.add_term(Monomial({-1}, {0}), RatFunc<Rat>(1));
  A.add_term(Monomial({0}, {1}), RatFunc<Rat>(-1));
  Op cleared = clear_to_positive(A);
  Op expect(1, OpVariant::WrPlus);
  expect.add_term(Monomial({0}, {0}), RatFunc<Rat>(1));
  expect.add_term(Monomial({1}, {1}), -qpow(1));
  CHECK(cleared == expect);

  // already positive: unchanged
  Op B(1, OpVariant::WrPlus);
  B.add_term(Monomial({1}, {2}), qpow(1));
  B.add_term(Monomial({0}, {0}), RatFunc<Rat>(-2));
  CHECK(clear_to_positive(B) == B);

  // M^-2 L -> L
  Op C(1, OpVariant::Wr);
  C.add_term(Monomial({1}, {-2}), RatFunc<Rat>(1));
  Op cc = clear_to_positive(C);
  REQUIRE(cc.term_count() == 1);
  CHECK(cc.coeff(Monomial({1}, {0})) == RatFunc<Rat>(1));
}

TEST_CASE("op_subst_root twists coefficients when M-exponents divide p") {
  Op P(1, OpVariant::WrPlus);
  P.add_term(Monomial({1}, {0}), RatFunc<Rat>(1));
  P.add_term(Monomial({0}, {2}), -qpow(1));

  Operator<Cyclo> Pw = op_subst_root(P, 2);
  Operator<Cyclo> expect(1, OpVariant::WrPlus, BaseField{2, 1});
  expect.add_term(Monomial({1}, {0}), RatFunc<Cyclo>(1));
  expect.add_term(Monomial({0}, {2}), RatFunc<Cyclo>::q_power(1));  // -(zeta_2 q) = q
  CHECK(Pw == expect);

  // unit coefficients pass through for any p
  for (int p : {2, 3, 5}) {
    Op Q(1, OpVariant::WrPlus);
    Q.add_term(Monomial({1}, {0}), RatFunc<Rat>(1));
    Q.add_term(Monomial({0}, {p}), RatFunc<Rat>(-1));
    Operator<Cyclo> Qw = op_subst_root(Q, p);
    CHECK(Qw.coeff(Monomial({0}, {p})) == RatFunc<Cyclo>(-1));
  }

  Op bad(1, OpVariant::WrPlus);
  bad.add_term(Monomial({1}, {0}), RatFunc<Rat>(1));
  bad.add_term(Monomial({0}, {1}), -qpow(1));
  CHECK_THROWS_AS(op_subst_root(bad, 2), std::domain_error);
}

TEST_CASE("op_subst_alpha rescales q- and M-exponents") {
  // L^2 - q^4 M^4 with alpha = 1/2  ->  L^2 - u^4 M^2  (u^4 = q^2)
  Op P(1, OpVariant::WrPlus);
  P.add_term(Monomial({2}, {0}), RatFunc<Rat>(1));
  P.add_term(Monomial({0}, {4}), -qpow(4));
  Op sub = op_subst_alpha(P, 1, 2);
  CHECK(sub.field().power_split == 2);
  Op expect(1, OpVariant::WrPlus, BaseField{0, 2});
  expect.add_term(Monomial({2}, {0}), RatFunc<Rat>(1));
  expect.add_term(Monomial({0}, {2}), -RatFunc<Rat>::u_power(4, 2));
  CHECK(sub == expect);

  // L - M^2 -> L - M
  Op Q(1, OpVariant::WrPlus);
  Q.add_term(Monomial({1}, {0}), RatFunc<Rat>(1));
  Q.add_term(Monomial({0}, {2}), RatFunc<Rat>(-1));
  Op qs = op_subst_alpha(Q, 1, 2);
  CHECK(qs.coeff(Monomial({0}, {1})) == RatFunc<Rat>(-1));

  // q-exponent 1 not divisible by 2
  Op bad(1, OpVariant::WrPlus);
  bad.add_term(Monomial({1}, {0}), RatFunc<Rat>(1));
  bad.add_term(Monomial({0}, {2}), -qpow(1));
  CHECK_THROWS_AS(op_subst_alpha(bad, 1, 2), std::domain_error);
}

TEST_CASE("op_eval_q1_m1 collapses to the classical algebra") {
  Op P(1, OpVariant::WrPlus);
  P.add_term(Monomial({1}, {0}), RatFunc<Rat>(1));
  P.add_term(Monomial({0}, {2}), -qpow(1));
  ClassicalOperator<Rat> cp = op_eval_q1_m1(P);
  ClassicalOperator<Rat> expect(1);
  expect.add_term({1}, MPoly<Rat>(1, Rat(1)));
  expect.add_term({0}, MPoly<Rat>(1, Rat(-1)));
  CHECK(cp == expect);

  // (q - 1) * (L - qM^2) evaluates to zero
  Op scaled = op_scale(RatFunc<Rat>(Poly<Rat>({Rat(-1), Rat(1)})), P);
  CHECK(op_eval_q1_m1(scaled).is_zero());

  // mixed operator (2 + 3m) L -> (2 + 3m) l
  MixedOperator<Rat> mix(1, OpVariant::WrPlus);
  MPoly<RatFunc<Rat>> g(1, RatFunc<Rat>(2));
  g.add_term({1}, RatFunc<Rat>(3));
  mix.add_term(Monomial({1}, {0}), g);
  ClassicalOperator<Rat> cm = op_eval_q1_m1(mix);
  MPoly<Rat> gm(1, Rat(2));
  gm.add_term({1}, Rat(3));
  ClassicalOperator<Rat> expect_m(1);
  expect_m.add_term({1}, gm);
  CHECK(cm == expect_m);
}

TEST_CASE("dq_commutator produces the m-weighted remainder") {
  // P = qM: R = (1 + m) M
  Op P = term1(0, 1, qpow(1), OpVariant::WrPlus);
  MixedOperator<Rat> R = dq_commutator(P);
  MPoly<RatFunc<Rat>> expect_g(1, RatFunc<Rat>(1));
  expect_g.add_term({1}, RatFunc<Rat>(1));
  MixedOperator<Rat> expect(1, OpVariant::WrPlus);
  expect.add_term(Monomial({0}, {1}), expect_g);
  CHECK(R == expect);

  // P = L: R = 0
  CHECK(dq_commutator(term1(1, 0, RatFunc<Rat>(1), OpVariant::WrPlus)).is_zero());

  // P = L - qM^2: R = -(1 + 2m) M^2
  Op P2(1, OpVariant::WrPlus);
  P2.add_term(Monomial({1}, {0}), RatFunc<Rat>(1));
  P2.add_term(Monomial({0}, {2}), -qpow(1));
  MixedOperator<Rat> R2 = dq_commutator(P2);
  MPoly<RatFunc<Rat>> g2(1, RatFunc<Rat>(-1));
  g2.add_term({1}, RatFunc<Rat>(-2));
  MixedOperator<Rat> expect2(1, OpVariant::WrPlus);
  expect2.add_term(Monomial({0}, {2}), g2);
  CHECK(R2 == expect2);

  // non-Laurent coefficient demands cleared denominators
  Op frac = term1(0, 1, ratfunc_normalize(Poly<Rat>({Rat(1)}), Poly<Rat>({Rat(1), Rat(1)})),
                  OpVariant::WrPlus);
  CHECK_THROWS_AS(dq_commutator(frac), std::domain_error);
  CHECK_FALSE(dq_commutator(op_clear_denominators(frac)).is_zero());
}

TEST_CASE("classical normal form uses the shift rule") {
  // l * m = (m + 1) l
  ClassicalOperator<Rat> l(1), m(1);
  l.add_term({1}, MPoly<Rat>(1, Rat(1)));
  m.add_term({0}, MPoly<Rat>::variable(1, 0));
  ClassicalOperator<Rat> lm = classical_mul(l, m);
  MPoly<Rat> m_plus_1 = MPoly<Rat>::variable(1, 0) + MPoly<Rat>(1, Rat(1));
  ClassicalOperator<Rat> expect(1);
  expect.add_term({1}, m_plus_1);
  CHECK(lm == expect);

  // l_1 * m_2 = m_2 l_1
  ClassicalOperator<Rat> l1(2), m2(2);
  l1.add_term({1, 0}, MPoly<Rat>(2, Rat(1)));
  m2.add_term({0, 0}, MPoly<Rat>::variable(2, 1));
  ClassicalOperator<Rat> expect12(2);
  expect12.add_term({1, 0}, MPoly<Rat>::variable(2, 1));
  CHECK(classical_mul(l1, m2) == expect12);

  // (l - 1)^2 = l^2 - 2l + 1
  ClassicalOperator<Rat> lm1(1);
  lm1.add_term({1}, MPoly<Rat>(1, Rat(1)));
  lm1.add_term({0}, MPoly<Rat>(1, Rat(-1)));
  ClassicalOperator<Rat> sq = classical_mul(lm1, lm1);
  ClassicalOperator<Rat> expect_sq(1);
  expect_sq.add_term({2}, MPoly<Rat>(1, Rat(1)));
  expect_sq.add_term({1}, MPoly<Rat>(1, Rat(-2)));
  expect_sq.add_term({0}, MPoly<Rat>(1, Rat(1)));
  CHECK(sq == expect_sq);
}

TEST_CASE("op_mul is associative on random triples") {
  std::mt19937_64 rng(1003);
  for (int trial = 0; trial < 25; ++trial) {
    Op A = random_op(rng, 2, 3), B = random_op(rng, 2, 3), C = random_op(rng, 2, 2);
    CHECK(op_mul(op_mul(A, B), C) == op_mul(A, op_mul(B, C)));
  }
}

TEST_CASE("support and subset containment") {
  Op B(2, OpVariant::WrPlus);
  B.add_term(Monomial({1, 0}, {0, 1}), qpow(1));
  auto sup = op_support(B);
  REQUIRE(sup.size() == 2);
  CHECK(sup[0] == Symbol{false, 0});
  CHECK(sup[1] == Symbol{true, 1});
  CHECK(op_supported_in(B, VariableSubset({{false, 0}, {true, 1}})));
  CHECK_FALSE(op_supported_in(B, VariableSubset({{false, 0}, {true, 0}})));

  CHECK(all_subsets_r_plus_1(1).size() == 1);
  CHECK(all_subsets_r_plus_1(2).size() == 4);
}
