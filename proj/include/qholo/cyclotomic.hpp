#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qholo/poly.hpp"
#include "qholo/rational.hpp"

namespace qholo {

/// p-th cyclotomic polynomial over Q, computed by the recursion
/// x^p - 1 = prod_{d | p} Phi_d(x) with exact division. Results are cached;
/// the cache is guarded for concurrent use.
inline const Poly<Rat>& cyclotomic_poly(int p) {
  if (p < 1) throw std::domain_error("cyclotomic_poly: order must be >= 1");
  static std::map<int, Poly<Rat>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;

  // Compute iteratively so recursive lookups hit the cache without re-locking.
  std::function<const Poly<Rat>&(int)> get = [&](int n) -> const Poly<Rat>& {
    auto found = cache.find(n);
    if (found != cache.end()) return found->second;
    Poly<Rat> xn_minus_1 = Poly<Rat>::monomial(Rat(1), n) - Poly<Rat>::one();
    Poly<Rat> divisor = Poly<Rat>::one();
    for (int d = 1; d < n; ++d)
      if (n % d == 0) divisor = divisor * get(d);
    return cache.emplace(n, xn_minus_1 / divisor).first->second;
  };
  return get(p);
}

/// Element of the cyclotomic field Q(zeta_p), stored as a residue modulo
/// Phi_p of degree < deg Phi_p. Order 0 marks a plain rational constant that
/// promotes to any order on contact; public construction from a polynomial
/// always carries an explicit order p >= 1.
class Cyclo {
 public:
  Cyclo() : p_(0) {}
  Cyclo(long n) : p_(0), rep_(Rat(n)) {}  // NOLINT: implicit for literals
  explicit Cyclo(Rat r) : p_(0), rep_(std::move(r)) {}
  Cyclo(int p, Poly<Rat> rep) : p_(p), rep_(std::move(rep)) {
    if (p < 1) throw std::domain_error("Cyclo: order must be >= 1");
    reduce();
  }

  /// Reduction of an arbitrary rational polynomial modulo Phi_p.
  static Cyclo reduce_mod_phi(const Poly<Rat>& poly, int p) { return Cyclo(p, poly); }

  /// zeta_p^e (e may be negative).
  static Cyclo zeta_pow(int p, long e) {
    if (p < 1) throw std::domain_error("Cyclo: order must be >= 1");
    long m = e % p;
    if (m < 0) m += p;
    return Cyclo(p, Poly<Rat>::monomial(Rat(1), static_cast<int>(m)));
  }
  static Cyclo zeta(int p) { return zeta_pow(p, 1); }

  int order() const { return p_; }
  const Poly<Rat>& rep() const { return rep_; }
  bool is_zero() const { return rep_.is_zero(); }
  bool is_one() const { return rep_.is_one(); }

  /// True when the element lies in Q (degree 0 residue or constant).
  bool is_rational() const { return rep_.is_constant(); }
  Rat rational_part() const {
    if (!is_rational()) throw std::domain_error("Cyclo: element is not rational");
    return rep_.coeff(0);
  }

  Cyclo operator-() const { return make(p_, -rep_); }

  friend Cyclo operator+(const Cyclo& a, const Cyclo& b) {
    int p = unify(a, b);
    return make(p, a.rep_ + b.rep_);
  }
  friend Cyclo operator-(const Cyclo& a, const Cyclo& b) {
    int p = unify(a, b);
    return make(p, a.rep_ - b.rep_);
  }
  friend Cyclo operator*(const Cyclo& a, const Cyclo& b) {
    int p = unify(a, b);
    Cyclo r = make(p, a.rep_ * b.rep_);
    r.reduce();
    return r;
  }
  friend Cyclo operator/(const Cyclo& a, const Cyclo& b) { return a * b.inv(); }

  Cyclo& operator+=(const Cyclo& o) { return *this = *this + o; }
  Cyclo& operator-=(const Cyclo& o) { return *this = *this - o; }
  Cyclo& operator*=(const Cyclo& o) { return *this = *this * o; }
  Cyclo& operator/=(const Cyclo& o) { return *this = *this / o; }

  friend bool operator==(const Cyclo& a, const Cyclo& b) {
    if (a.p_ != b.p_ && a.p_ != 0 && b.p_ != 0) return false;
    return a.rep_ == b.rep_;
  }
  friend bool operator!=(const Cyclo& a, const Cyclo& b) { return !(a == b); }

  /// Field inverse via the extended Euclidean algorithm against Phi_p
  /// (Phi_p is irreducible over Q, so every nonzero residue is a unit).
  Cyclo inv() const {
    if (is_zero()) throw std::domain_error("Cyclo: inverse of zero");
    if (p_ == 0 || rep_.is_constant()) return make(p_, Poly<Rat>(rep_.coeff(0).inv()));
    const Poly<Rat>& phi = cyclotomic_poly(p_);
    // Extended gcd: s*rep + t*phi = g with g a nonzero constant.
    Poly<Rat> r0 = phi, r1 = rep_;
    Poly<Rat> s0 = Poly<Rat>::zero(), s1 = Poly<Rat>::one();
    while (!r1.is_zero()) {
      auto [q, rem] = Poly<Rat>::divrem(r0, r1);
      Poly<Rat> s2 = s0 - q * s1;
      r0 = std::move(r1);
      r1 = std::move(rem);
      s0 = std::move(s1);
      s1 = std::move(s2);
    }
    if (r0.degree() != 0)
      throw std::logic_error("Cyclo: residue shares a factor with Phi_p");
    return Cyclo(p_, s0.scaled(r0.coeff(0).inv()));
  }

  /// Galois-style substitution zeta -> zeta^j.
  Cyclo map_zeta_pow(long j) const {
    if (p_ == 0) return *this;
    Poly<Rat> out;
    for (int i = 0; i <= rep_.degree(); ++i) {
      if (rep_.coeff(i).is_zero()) continue;
      out = out + zeta_pow(p_, j * i).rep_.scaled(rep_.coeff(i));
    }
    return Cyclo(p_, out);
  }

  /// Canonical text over generator "z": e.g. "z^2-1/2*z", "-1", "0".
  std::string str() const { return format_rat_poly(rep_, "z"); }

 private:
  static Cyclo make(int p, Poly<Rat> rep) {
    Cyclo c;
    c.p_ = p;
    c.rep_ = std::move(rep);
    if (p >= 1) c.reduce();
    return c;
  }

  static int unify(const Cyclo& a, const Cyclo& b) {
    if (a.p_ == 0) return b.p_;
    if (b.p_ == 0 || a.p_ == b.p_) return a.p_;
    throw std::domain_error("Cyclo: mixed cyclotomic orders");
  }

  void reduce() {
    if (p_ < 1) return;
    const Poly<Rat>& phi = cyclotomic_poly(p_);
    if (rep_.degree() >= phi.degree()) rep_ = Poly<Rat>::divrem(rep_, phi).second;
  }

  int p_;         // 0 = plain rational constant
  Poly<Rat> rep_;
};

}  // namespace qholo
