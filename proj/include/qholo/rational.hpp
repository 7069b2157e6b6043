#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace qholo {

/// Arbitrary-precision rational number in canonical form:
/// gcd(|numerator|, denominator) = 1 and denominator > 0.
///
/// Thin value wrapper around GMP's mpq_class; all arithmetic stays exact.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(long n) : v_(n) {}  // NOLINT: implicit for literals
  Rat(long n, long d) : v_(n, d) {
    if (d == 0) throw std::domain_error("Rat: zero denominator");
    v_.canonicalize();
  }
  explicit Rat(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }
  Rat(mpz_class n, mpz_class d) : v_(std::move(n), std::move(d)) {
    if (v_.get_den() == 0) throw std::domain_error("Rat: zero denominator");
    v_.canonicalize();
  }

  /// Parses "a", "-a" or "a/b" with arbitrary-precision decimal digits.
  static Rat parse(const std::string& s) {
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rat(mpq_class(mpz_class(s)));
      mpz_class n(s.substr(0, slash)), d(s.substr(slash + 1));
      return Rat(std::move(n), std::move(d));
    } catch (const std::invalid_argument&) {
      throw std::domain_error("Rat: cannot parse '" + s + "'");
    }
  }

  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }
  int sign() const { return sgn(v_); }

  const mpq_class& value() const { return v_; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }

  Rat operator-() const { return Rat(mpq_class(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("Rat: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }

  Rat inv() const {
    if (is_zero()) throw std::domain_error("Rat: inverse of zero");
    return Rat(mpq_class(1) / v_);
  }

  Rat abs() const { return sign() < 0 ? -*this : *this; }

  /// Canonical text: "a" when the denominator is 1, else "a/b".
  std::string str() const { return v_.get_str(); }

 private:
  mpq_class v_;
};

inline mpz_class gcd_z(const mpz_class& a, const mpz_class& b) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline mpz_class lcm_z(const mpz_class& a, const mpz_class& b) {
  mpz_class l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

}  // namespace qholo
