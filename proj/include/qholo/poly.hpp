#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qholo/rational.hpp"

namespace qholo {

/// Dense univariate polynomial over an exact field scalar K.
///
/// K must be value-semantic with K(), K(long), +,-,*,/, ==, is_zero(),
/// is_one(), inv() and str(). Coefficient 0 is never stored as a trailing
/// entry; the zero polynomial has an empty coefficient vector and degree -1.
template <class K>
class Poly {
 public:
  Poly() = default;
  explicit Poly(K c) { c_.push_back(std::move(c)); trim(); }
  explicit Poly(std::vector<K> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Poly zero() { return Poly(); }
  static Poly one() { return Poly(K(1)); }
  /// c * x^e
  static Poly monomial(K c, int e) {
    if (e < 0) throw std::domain_error("Poly: negative exponent");
    Poly p;
    if (!c.is_zero()) {
      p.c_.assign(static_cast<size_t>(e) + 1, K(0));
      p.c_.back() = std::move(c);
    }
    return p;
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_one() const { return c_.size() == 1 && c_[0].is_one(); }
  bool is_constant() const { return c_.size() <= 1; }
  /// True when exactly one coefficient is nonzero (or the polynomial is 0).
  bool is_monomial() const {
    int nz = 0;
    for (const K& c : c_) nz += c.is_zero() ? 0 : 1;
    return nz <= 1;
  }

  const K& leading() const {
    if (is_zero()) throw std::domain_error("Poly: leading of zero");
    return c_.back();
  }

  K coeff(int i) const {
    if (i < 0 || i > degree()) return K(0);
    return c_[static_cast<size_t>(i)];
  }
  const std::vector<K>& coeffs() const { return c_; }

  void set_coeff(int i, K v) {
    if (i < 0) throw std::domain_error("Poly: negative index");
    if (static_cast<size_t>(i) >= c_.size()) c_.resize(static_cast<size_t>(i) + 1, K(0));
    c_[static_cast<size_t>(i)] = std::move(v);
    trim();
  }

  Poly operator-() const {
    Poly r = *this;
    for (K& c : r.c_) c = -c;
    return r;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.c_.resize(std::max(a.c_.size(), b.c_.size()), K(0));
    for (size_t i = 0; i < a.c_.size(); ++i) r.c_[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) r.c_[i] += b.c_[i];
    r.trim();
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    Poly r;
    r.c_.assign(a.c_.size() + b.c_.size() - 1, K(0));
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (size_t j = 0; j < b.c_.size(); ++j) {
        if (b.c_[j].is_zero()) continue;
        r.c_[i + j] += a.c_[i] * b.c_[j];
      }
    }
    r.trim();
    return r;
  }

  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  Poly scaled(const K& s) const {
    if (s.is_zero()) return Poly();
    Poly r = *this;
    for (K& c : r.c_) c = c * s;
    r.trim();
    return r;
  }

  /// Multiply by x^e.
  Poly shifted(int e) const {
    if (is_zero()) return Poly();
    if (e < 0) throw std::domain_error("Poly: negative shift");
    Poly r;
    r.c_.assign(c_.size() + static_cast<size_t>(e), K(0));
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i + static_cast<size_t>(e)] = c_[i];
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// Euclidean division; den must be nonzero.
  static std::pair<Poly, Poly> divrem(Poly num, const Poly& den) {
    if (den.is_zero()) throw std::domain_error("Poly: division by zero polynomial");
    Poly q;
    const int dd = den.degree();
    const K lead_inv = den.leading().inv();
    if (num.degree() >= dd) q.c_.assign(static_cast<size_t>(num.degree() - dd) + 1, K(0));
    while (!num.is_zero() && num.degree() >= dd) {
      const int shift = num.degree() - dd;
      K factor = num.leading() * lead_inv;
      q.c_[static_cast<size_t>(shift)] = factor;
      // num -= factor * x^shift * den, done in place
      for (int i = 0; i <= dd; ++i) {
        K delta = den.coeff(i) * factor;
        num.c_[static_cast<size_t>(i + shift)] -= delta;
      }
      num.trim();
    }
    q.trim();
    return {std::move(q), std::move(num)};
  }

  friend Poly operator/(const Poly& a, const Poly& b) {
    auto [q, r] = divrem(a, b);
    if (!r.is_zero()) throw std::domain_error("Poly: inexact division");
    return q;
  }
  friend Poly operator%(const Poly& a, const Poly& b) { return divrem(a, b).second; }

  /// Monic gcd; gcd(0,0) = 0.
  static Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
      Poly r = divrem(a, b).second;
      a = std::move(b);
      b = std::move(r);
    }
    if (!a.is_zero()) a = a.scaled(a.leading().inv());
    return a;
  }

  static Poly lcm(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    Poly l = (a * b) / gcd(a, b);
    return l.scaled(l.leading().inv());
  }

  K eval(const K& x) const {
    K acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  Poly derivative() const {
    Poly r;
    if (c_.size() <= 1) return r;
    r.c_.resize(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) r.c_[i - 1] = c_[i] * K(static_cast<long>(i));
    r.trim();
    return r;
  }

  /// Substitute x -> x^m (exponent dilation), m >= 1.
  Poly dilated(int m) const {
    if (m < 1) throw std::domain_error("Poly: dilation factor must be >= 1");
    if (m == 1 || is_zero()) return *this;
    Poly r;
    r.c_.assign(static_cast<size_t>(degree()) * m + 1, K(0));
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i * static_cast<size_t>(m)] = c_[i];
    r.trim();
    return r;
  }

  int trailing_degree() const {
    for (size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].is_zero()) return static_cast<int>(i);
    return -1;
  }

  /// Divide out x^e (must divide exactly).
  Poly unshifted(int e) const {
    if (e == 0) return *this;
    if (is_zero()) return Poly();
    if (trailing_degree() < e) throw std::domain_error("Poly: unshift does not divide");
    Poly r;
    r.c_.assign(c_.begin() + e, c_.end());
    return r;
  }

  Poly monic() const {
    if (is_zero()) return *this;
    return scaled(leading().inv());
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  std::vector<K> c_;
};

/// Canonical text for a rational-coefficient polynomial: expanded form,
/// descending powers, explicit "+"/"-", no spaces. Examples: "q^2-1",
/// "-3/2*q^3+q", "0".
inline std::string format_rat_poly(const Poly<Rat>& p, const std::string& var) {
  if (p.is_zero()) return "0";
  std::string out;
  for (int e = p.degree(); e >= 0; --e) {
    const Rat c = p.coeff(e);
    if (c.is_zero()) continue;
    const bool neg = c.sign() < 0;
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? "-" : "+";
    }
    const Rat mag = c.abs();
    if (e == 0) {
      out += mag.str();
    } else {
      if (!mag.is_one()) out += mag.str() + "*";
      out += var;
      if (e > 1) out += "^" + std::to_string(e);
    }
  }
  return out;
}

/// Scales a rational-coefficient polynomial to integer coefficients with
/// content 1 and positive leading coefficient. Returns the scaled polynomial.
inline Poly<Rat> integer_normalized(const Poly<Rat>& p) {
  if (p.is_zero()) return p;
  mpz_class den_lcm(1), num_gcd(0);
  for (const Rat& c : p.coeffs()) {
    if (c.is_zero()) continue;
    den_lcm = lcm_z(den_lcm, c.den());
  }
  std::vector<Rat> scaled;
  scaled.reserve(p.coeffs().size());
  for (const Rat& c : p.coeffs()) scaled.push_back(c * Rat(den_lcm, mpz_class(1)));
  for (const Rat& c : scaled)
    if (!c.is_zero()) num_gcd = gcd_z(num_gcd, c.num());
  if (num_gcd == 0) num_gcd = 1;
  Rat inv_g(mpz_class(1), num_gcd);
  for (Rat& c : scaled) c = c * inv_g;
  Poly<Rat> out{std::move(scaled)};
  if (out.leading().sign() < 0) out = -out;
  return out;
}

}  // namespace qholo
