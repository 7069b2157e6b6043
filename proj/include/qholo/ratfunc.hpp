#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qholo/cyclotomic.hpp"
#include "qholo/poly.hpp"
#include "qholo/rational.hpp"

namespace qholo {

/// Coefficient-field descriptor shared by sequences, operators and
/// certificates. cyclo_order 0 means plain rationals, p >= 1 means
/// Q(zeta_p). power_split k >= 1 realizes fractional powers of q through a
/// single central variable u with q = u^k (k = 1 means u = q).
struct BaseField {
  int cyclo_order = 0;
  int power_split = 1;

  friend bool operator==(const BaseField&, const BaseField&) = default;
};

/// Signalled when a rational function (or a sequence value) is evaluated at
/// a zero of its denominator. Carries the offending sequence index when the
/// evaluation happened pointwise on a sequence.
class PoleError : public std::domain_error {
 public:
  explicit PoleError(std::string what, std::vector<long long> index = {})
      : std::domain_error(std::move(what)), index_(std::move(index)) {}
  const std::vector<long long>& index() const { return index_; }

 private:
  std::vector<long long> index_;
};

/// Reduced rational function in the central variable u over an exact scalar
/// field K (Rat or Cyclo). Normal form: den != 0, gcd(num, den) = 1, den
/// monic; the numerator carries all content. The power_split tag k records
/// that u stands for q^{1/k}; values with different k never mix unless one
/// side is a constant.
template <class K>
class RatFunc {
 public:
  RatFunc() : k_(1), num_(), den_(Poly<K>::one()) {}
  RatFunc(long n) : RatFunc() { num_ = Poly<K>(K(n)); }  // NOLINT: literals
  explicit RatFunc(K c) : RatFunc() { num_ = Poly<K>(std::move(c)); }
  RatFunc(Poly<K> num, Poly<K> den, int power_split = 1)
      : k_(power_split), num_(std::move(num)), den_(std::move(den)) {
    if (k_ < 1) throw std::domain_error("RatFunc: power_split must be >= 1");
    normalize();
  }

  explicit RatFunc(Poly<K> num, int power_split = 1)
      : RatFunc(std::move(num), Poly<K>::one(), power_split) {}

  /// u^e as a rational function (e may be negative).
  static RatFunc u_power(long e, int power_split = 1) {
    if (e >= 0)
      return RatFunc(Poly<K>::monomial(K(1), static_cast<int>(e)), power_split);
    return RatFunc(Poly<K>::one(), Poly<K>::monomial(K(1), static_cast<int>(-e)),
                   power_split);
  }

  /// q^e = u^(k*e) in this function's field.
  static RatFunc q_power(long e, int power_split = 1) {
    return u_power(e * power_split, power_split);
  }

  int power_split() const { return k_; }
  const Poly<K>& num() const { return num_; }
  const Poly<K>& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_polynomial() const { return den_.is_one(); }
  /// True when den is a power of u, i.e. the value is a Laurent polynomial.
  bool is_laurent() const { return den_.is_monomial(); }
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }

  RatFunc operator-() const { return raw(-num_, den_, k_); }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    int k = unify(a, b);
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_, k);
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    int k = unify(a, b);
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_, k);
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw std::domain_error("RatFunc: division by zero");
    int k = unify(a, b);
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_, k);
  }

  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
  RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

  RatFunc inv() const {
    if (is_zero()) throw std::domain_error("RatFunc: inverse of zero");
    return RatFunc(den_, num_, k_);
  }

  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    if (a.k_ != b.k_ && !a.is_constant() && !b.is_constant()) return false;
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

  /// Value at u = point; throws PoleError when the denominator vanishes.
  K eval(const K& point) const {
    K d = den_.eval(point);
    if (d.is_zero()) throw PoleError("RatFunc: pole at evaluation point");
    return num_.eval(point) / d;
  }

  /// Formal derivative d/dq, defined when u = q (power_split 1).
  RatFunc d_dq() const {
    if (k_ != 1)
      throw std::domain_error("RatFunc: d_dq requires power_split 1");
    return RatFunc(num_.derivative() * den_ - num_ * den_.derivative(),
                   den_ * den_, k_);
  }

  RatFunc with_power_split(int k) const {
    RatFunc r = *this;
    if (!r.is_constant() && r.k_ != k)
      throw std::domain_error("RatFunc: incompatible power_split retag");
    r.k_ = k;
    return r;
  }

  /// Applies fn(exponent, coeff) -> new exponent to every u-monomial of num
  /// and den, then clears any negative exponents by a common u-power.
  template <class Fn>
  RatFunc map_exponents(Fn&& fn, int new_power_split) const {
    long min_e = 0;
    auto mapped = [&](const Poly<K>& p) {
      std::vector<std::pair<long, K>> terms;
      for (int e = 0; e <= p.degree(); ++e) {
        if (p.coeff(e).is_zero()) continue;
        long t = fn(static_cast<long>(e));
        terms.emplace_back(t, p.coeff(e));
        min_e = std::min(min_e, t);
      }
      return terms;
    };
    auto tn = mapped(num_), td = mapped(den_);
    auto build = [&](const std::vector<std::pair<long, K>>& terms) {
      Poly<K> out;
      for (const auto& [e, c] : terms)
        out = out + Poly<K>::monomial(c, static_cast<int>(e - min_e));
      return out;
    };
    return RatFunc(build(tn), build(td), new_power_split);
  }

  /// Canonical text of num and den (variable name supplied by the caller).
  std::string str(const std::string& var) const;

 private:
  static RatFunc raw(Poly<K> num, Poly<K> den, int k) {
    RatFunc r;
    r.k_ = k;
    r.num_ = std::move(num);
    r.den_ = std::move(den);
    return r;
  }

  static int unify(const RatFunc& a, const RatFunc& b) {
    if (a.is_constant()) return b.k_;
    if (b.is_constant() || a.k_ == b.k_) return a.k_;
    throw std::domain_error("RatFunc: mixed power_split fields");
  }

  void normalize() {
    if (den_.is_zero()) throw std::domain_error("RatFunc: zero denominator");
    if (num_.is_zero()) {
      den_ = Poly<K>::one();
      return;
    }
    Poly<K> g = Poly<K>::gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = num_ / g;
      den_ = den_ / g;
    }
    K lead_inv = den_.leading().inv();
    num_ = num_.scaled(lead_inv);
    den_ = den_.scaled(lead_inv);
  }

  int k_;
  Poly<K> num_, den_;
};

/// Canonical polynomial text over any supported scalar. Rational
/// coefficients print with natural signs ("q^2-1", "-3/2*q"); cyclotomic
/// coefficients with a z-part print parenthesized and join with '+'
/// ("q^2+(-z-1)*q+(z)").
template <class K>
std::string format_poly(const Poly<K>& p, const std::string& var) {
  if constexpr (std::is_same_v<K, Rat>) {
    return format_rat_poly(p, var);
  } else {
    if (p.is_zero()) return "0";
    std::string out;
    for (int e = p.degree(); e >= 0; --e) {
      const K c = p.coeff(e);
      if (c.is_zero()) continue;
      if (c.is_rational()) {
        const Rat rc = c.rational_part();
        const bool neg = rc.sign() < 0;
        if (out.empty()) {
          if (neg) out += "-";
        } else {
          out += neg ? "-" : "+";
        }
        const Rat mag = rc.abs();
        if (e == 0) {
          out += mag.str();
        } else {
          if (!mag.is_one()) out += mag.str() + "*";
          out += var;
          if (e > 1) out += "^" + std::to_string(e);
        }
      } else {
        if (!out.empty()) out += "+";
        out += "(" + c.str() + ")";
        if (e >= 1) {
          out += "*" + var;
          if (e > 1) out += "^" + std::to_string(e);
        }
      }
    }
    return out;
  }
}

template <class K>
std::string RatFunc<K>::str(const std::string& var) const {
  if (den_.is_one()) return format_poly(num_, var);
  return "(" + format_poly(num_, var) + ")/(" + format_poly(den_, var) + ")";
}

/// Display variable for a field: q when u = q, u otherwise.
inline std::string field_var(int power_split) { return power_split == 1 ? "q" : "u"; }

// ---------------------------------------------------------------------------
// coeff-level operations
// ---------------------------------------------------------------------------

/// Reduced fraction num/den; errors on a zero denominator.
template <class K>
RatFunc<K> ratfunc_normalize(Poly<K> num, Poly<K> den, int power_split = 1) {
  return RatFunc<K>(std::move(num), std::move(den), power_split);
}

/// Residue of an integer/rational polynomial modulo Phi_p.
inline Cyclo cyclo_reduce(const Poly<Rat>& poly, int p) {
  return Cyclo::reduce_mod_phi(poly, p);
}

/// q -> zeta_p^j * q on a rational function over Q(zeta_p): every monomial
/// u^e picks up the scalar zeta_p^(j*e). Requires u = q.
inline RatFunc<Cyclo> subst_q_zeta_pow(const RatFunc<Cyclo>& r, int p, long j) {
  if (r.power_split() != 1)
    throw std::domain_error("subst_q_zeta_pow: requires power_split 1");
  auto twist = [&](const Poly<Cyclo>& poly) {
    Poly<Cyclo> out;
    for (int e = 0; e <= poly.degree(); ++e) {
      if (poly.coeff(e).is_zero()) continue;
      out = out + Poly<Cyclo>::monomial(poly.coeff(e) * Cyclo::zeta_pow(p, j * e), e);
    }
    return out;
  };
  return RatFunc<Cyclo>(twist(r.num()), twist(r.den()), 1);
}

/// Embeds a rational-coefficient function into Q(zeta_p) coefficients.
inline RatFunc<Cyclo> ratfunc_to_cyclo(const RatFunc<Rat>& r, int p) {
  auto lift = [&](const Poly<Rat>& poly) {
    Poly<Cyclo> out;
    for (int e = 0; e <= poly.degree(); ++e) {
      if (poly.coeff(e).is_zero()) continue;
      Cyclo c = (p >= 1) ? Cyclo(p, Poly<Rat>(poly.coeff(e))) : Cyclo(poly.coeff(e));
      out = out + Poly<Cyclo>::monomial(std::move(c), e);
    }
    return out;
  };
  return RatFunc<Cyclo>(lift(r.num()), lift(r.den()), r.power_split());
}

/// q -> omega*q for omega = zeta_p: q^e becomes zeta_p^e q^e, result over
/// Q(zeta_p), reduced.
inline RatFunc<Cyclo> subst_q_omega(const RatFunc<Rat>& r, int p) {
  if (r.power_split() != 1)
    throw std::domain_error("subst_q_omega: requires a plain q base (k = 1)");
  return subst_q_zeta_pow(ratfunc_to_cyclo(r, p), p, 1);
}

/// q -> q^(a/k) with gcd(a,k) = 1. Every u-exponent e (which must be
/// divisible by k so the result stays a rational function of q = u^k) maps
/// to a*e; the result lives over the u-field with power_split k. Laurent
/// exponents from negative a are cleared by a common u-power.
template <class K>
RatFunc<K> subst_q_alpha(const RatFunc<K>& r, long a, int k) {
  if (k < 1) throw std::domain_error("subst_q_alpha: k must be >= 1");
  if (std::abs(a) > 0 && gcd_z(mpz_class(a), mpz_class(k)) != 1)
    throw std::domain_error("subst_q_alpha: gcd(a, k) must be 1");
  if (r.power_split() != 1)
    throw std::domain_error("subst_q_alpha: requires a plain q base (k = 1)");
  auto check = [&](const Poly<K>& p) {
    for (int e = 0; e <= p.degree(); ++e)
      if (!p.coeff(e).is_zero() && e % k != 0)
        throw std::domain_error(
            "subst_q_alpha: exponent " + std::to_string(e) +
            " not divisible by " + std::to_string(k));
  };
  check(r.num());
  check(r.den());
  return r.map_exponents([a](long e) { return e * a; }, k);
}

/// Value of r at u = point with a pole signal on denominator zeros.
template <class K>
K eval_at(const RatFunc<K>& r, const K& point) {
  return r.eval(point);
}

/// Value of a rational function over Q at q = zeta_p (p = 1 means q = 1).
inline Cyclo eval_at_root(const RatFunc<Rat>& r, int p) {
  if (r.power_split() != 1)
    throw std::domain_error("eval_at_root: requires a plain q base (k = 1)");
  return ratfunc_to_cyclo(r, p).eval(Cyclo::zeta(p));
}

inline Cyclo eval_at_root(const RatFunc<Cyclo>& r, int p) {
  if (r.power_split() != 1)
    throw std::domain_error("eval_at_root: requires a plain q base (k = 1)");
  return r.eval(Cyclo::zeta(p));
}

template <class K>
RatFunc<K> d_dq(const RatFunc<K>& r) {
  return r.d_dq();
}

}  // namespace qholo
