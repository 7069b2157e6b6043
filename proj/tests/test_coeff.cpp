#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qholo/ratfunc.hpp"

using namespace qholo;

namespace {

Poly<Rat> qpoly(std::initializer_list<long> coeffs_ascending) {
  std::vector<Rat> c;
  for (long v : coeffs_ascending) c.emplace_back(v);
  return Poly<Rat>(std::move(c));
}

RatFunc<Rat> random_ratfunc(std::mt19937_64& rng, bool nonzero = false) {
  std::uniform_int_distribution<long> coeff(-5, 5);
  std::uniform_int_distribution<int> deg(0, 3);
  auto poly = [&](bool require_nonzero) {
    Poly<Rat> p;
    do {
      std::vector<Rat> c(static_cast<size_t>(deg(rng)) + 1);
      for (auto& x : c) x = Rat(coeff(rng));
      p = Poly<Rat>(std::move(c));
    } while (require_nonzero && p.is_zero());
    return p;
  };
  return RatFunc<Rat>(poly(nonzero), poly(true));
}

}  // namespace

TEST_CASE("ratfunc_normalize reduces to canonical form") {
  // (q^2 - 1) / (q - 1) -> q + 1
  RatFunc<Rat> a = ratfunc_normalize(qpoly({-1, 0, 1}), qpoly({-1, 1}));
  CHECK(a.num() == qpoly({1, 1}));
  CHECK(a.den() == Poly<Rat>::one());

  // zero numerator collapses the denominator
  RatFunc<Rat> z = ratfunc_normalize(Poly<Rat>(), qpoly({1, 7}));
  CHECK(z.is_zero());
  CHECK(z.den() == Poly<Rat>::one());

  // ((q-1)(q^3+2)) / ((q^3+2)(q+5)) -> (q-1)/(q+5), confirmed by
  // cross-multiplication against the raw inputs
  Poly<Rat> num = qpoly({-1, 1}) * qpoly({2, 0, 0, 1});
  Poly<Rat> den = qpoly({2, 0, 0, 1}) * qpoly({5, 1});
  RatFunc<Rat> r = ratfunc_normalize(num, den);
  CHECK(r.num() == qpoly({-1, 1}));
  CHECK(r.den() == qpoly({5, 1}));
  CHECK(r.num() * den == r.den() * num);

  CHECK_THROWS_AS(ratfunc_normalize(qpoly({1}), Poly<Rat>()), std::domain_error);
}

TEST_CASE("cyclo_reduce folds modulo the cyclotomic polynomial") {
  // Phi_2 = x + 1, so x = -1
  CHECK(cyclo_reduce(qpoly({0, 1}), 2) == Cyclo(-1));
  // Phi_4 = x^2 + 1, so x^2 = -1
  CHECK(cyclo_reduce(qpoly({0, 0, 1}), 4) == Cyclo(-1));
  // Phi_3 reduces to zero against itself
  CHECK(cyclo_reduce(qpoly({1, 1, 1}), 3).is_zero());
}

TEST_CASE("cyclo zeta_p^p = 1 across orders") {
  for (int p = 1; p <= 12; ++p) {
    Poly<Rat> xp_minus_1 = Poly<Rat>::monomial(Rat(1), p) - Poly<Rat>::one();
    CHECK(cyclo_reduce(xp_minus_1, p).is_zero());
    CHECK(Cyclo::zeta_pow(p, p) == Cyclo(1));
  }
}

TEST_CASE("cyclotomic field inversion") {
  // (1 + zeta_5)^-1 * (1 + zeta_5) = 1
  Cyclo a = Cyclo(1) + Cyclo::zeta(5);
  CHECK(a * a.inv() == Cyclo(1));
  CHECK_THROWS_AS(Cyclo(5, Poly<Rat>()).inv(), std::domain_error);
}

TEST_CASE("subst_q_omega scales monomials by root-of-unity powers") {
  RatFunc<Rat> q2{qpoly({0, 0, 1})};
  CHECK(subst_q_omega(q2, 2) == ratfunc_to_cyclo(q2, 2));

  RatFunc<Rat> q1{qpoly({0, 1})};
  RatFunc<Cyclo> minus_q = -ratfunc_to_cyclo(q1, 2);
  CHECK(subst_q_omega(q1, 2) == minus_q);

  // 1/(q-1) with p = 4: denominator becomes zeta_4*q - 1; check by product.
  RatFunc<Rat> r = ratfunc_normalize(qpoly({1}), qpoly({-1, 1}));
  RatFunc<Cyclo> s = subst_q_omega(r, 4);
  RatFunc<Cyclo> zq_minus_1 =
      RatFunc<Cyclo>(Poly<Cyclo>({Cyclo(-1), Cyclo::zeta(4)}));
  CHECK(s * zq_minus_1 == RatFunc<Cyclo>(1));
}

TEST_CASE("conjugate-root substitution inverts subst_q_omega") {
  std::mt19937_64 rng(7001);
  for (int p : {2, 3, 4, 5, 6}) {
    for (int trial = 0; trial < 8; ++trial) {
      RatFunc<Rat> r = random_ratfunc(rng);
      RatFunc<Cyclo> once = subst_q_omega(r, p);
      RatFunc<Cyclo> back = subst_q_zeta_pow(once, p, p - 1);
      CHECK(back == ratfunc_to_cyclo(r, p));
    }
  }
}

TEST_CASE("subst_q_alpha rescales exponents into the u-field") {
  // q^4 with alpha = 1/2 -> u^4 (= q^2 in the new field)
  RatFunc<Rat> q4{qpoly({0, 0, 0, 0, 1})};
  RatFunc<Rat> got = subst_q_alpha(q4, 1, 2);
  CHECK(got == RatFunc<Rat>::u_power(4, 2));
  CHECK(got.power_split() == 2);

  // q^2 + q^-2 with alpha = 3/2 -> u^6 + u^-6 = (u^12 + 1)/u^6
  RatFunc<Rat> lau = ratfunc_normalize(qpoly({1, 0, 0, 0, 1}), qpoly({0, 0, 1}));
  RatFunc<Rat> expect =
      ratfunc_normalize(Poly<Rat>::monomial(Rat(1), 12) + Poly<Rat>::one(),
                        Poly<Rat>::monomial(Rat(1), 6), 2);
  CHECK(subst_q_alpha(lau, 3, 2) == expect);

  // odd exponent is not expressible in q = u^2
  RatFunc<Rat> q1{qpoly({0, 1})};
  CHECK_THROWS_AS(subst_q_alpha(q1, 1, 2), std::domain_error);

  // identity parameters
  std::mt19937_64 rng(7002);
  for (int trial = 0; trial < 10; ++trial) {
    RatFunc<Rat> r = random_ratfunc(rng);
    CHECK(subst_q_alpha(r, 1, 1) == r);
  }
}

TEST_CASE("d_dq follows the quotient rule") {
  RatFunc<Rat> q2{qpoly({0, 0, 1})};
  CHECK(d_dq(q2) == RatFunc<Rat>(qpoly({0, 2})));

  RatFunc<Rat> inv = ratfunc_normalize(qpoly({1}), qpoly({-1, 1}));
  CHECK(d_dq(inv) == ratfunc_normalize(qpoly({-1}), qpoly({-1, 1}) * qpoly({-1, 1})));

  RatFunc<Rat> frac = ratfunc_normalize(qpoly({0, 1}), qpoly({1, 1}));
  CHECK(d_dq(frac) == ratfunc_normalize(qpoly({1}), qpoly({1, 1}) * qpoly({1, 1})));
}

TEST_CASE("d_dq satisfies the Leibniz rule on random pairs") {
  std::mt19937_64 rng(7003);
  for (int trial = 0; trial < 20; ++trial) {
    RatFunc<Rat> a = random_ratfunc(rng), b = random_ratfunc(rng);
    CHECK(d_dq(a * b) == d_dq(a) * b + a * d_dq(b));
  }
}

TEST_CASE("eval_at evaluates after normalization, poles error out") {
  RatFunc<Rat> a = ratfunc_normalize(qpoly({-1, 0, 1}), qpoly({-1, 1}));
  CHECK(eval_at(a, Rat(1)) == Rat(2));

  RatFunc<Rat> q3{qpoly({0, 0, 0, 1})};
  CHECK(eval_at(q3, Rat(1)) == Rat(1));

  RatFunc<Rat> pole = ratfunc_normalize(qpoly({1}), qpoly({-1, 1}));
  CHECK_THROWS_AS(eval_at(pole, Rat(1)), PoleError);

  CHECK(eval_at_root(a, 1) == Cyclo(2));
  // q^2 at q = zeta_4 gives zeta_4^2 = -1
  RatFunc<Rat> q2{qpoly({0, 0, 1})};
  CHECK(eval_at_root(q2, 4) == Cyclo(-1));
}

TEST_CASE("field axioms hold exactly on random triples") {
  std::mt19937_64 rng(7004);
  for (int trial = 0; trial < 40; ++trial) {
    RatFunc<Rat> a = random_ratfunc(rng), b = random_ratfunc(rng), c = random_ratfunc(rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + (-a) == RatFunc<Rat>(0));
    if (!a.is_zero()) CHECK(a * a.inv() == RatFunc<Rat>(1));
  }
}

TEST_CASE("canonical text formatting") {
  RatFunc<Rat> a = ratfunc_normalize(qpoly({-1, 0, 1}), qpoly({2, 1}));
  CHECK(a.str("q") == "(q^2-1)/(q+2)");
  CHECK(RatFunc<Rat>(qpoly({-1, -2})).str("q") == "-2*q-1");
  CHECK(RatFunc<Rat>(0).str("q") == "0");
  Cyclo c = Cyclo::zeta(4) + Cyclo(2);
  CHECK(c.str() == "z+2");
}
