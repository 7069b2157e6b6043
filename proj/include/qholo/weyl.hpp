#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qholo/ratfunc.hpp"

namespace qholo {

// ---------------------------------------------------------------------------
// Monomials L^alpha M^beta and the fixed monomial order
// ---------------------------------------------------------------------------

/// Exponent data of a monomial in the 2r generators. alpha holds the
/// L-exponents, beta the M-exponents; entries may be negative in W_r.
struct Monomial {
  std::vector<int> alpha, beta;

  Monomial() = default;
  Monomial(std::vector<int> a, std::vector<int> b)
      : alpha(std::move(a)), beta(std::move(b)) {
    if (alpha.size() != beta.size())
      throw std::invalid_argument("Monomial: alpha/beta arity mismatch");
  }
  static Monomial unit(int r) {
    return Monomial(std::vector<int>(static_cast<size_t>(r), 0),
                    std::vector<int>(static_cast<size_t>(r), 0));
  }

  int arity() const { return static_cast<int>(alpha.size()); }

  /// |eta|: the sum of the absolute values of all exponents.
  long abs_degree() const {
    long d = 0;
    for (int a : alpha) d += std::abs(a);
    for (int b : beta) d += std::abs(b);
    return d;
  }

  bool is_unit() const { return abs_degree() == 0; }

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Fixed order: first by total absolute degree, then lexicographically with
/// L_1 > ... > L_r > M_1 > ... > M_r. Returns <0, 0, >0 like strcmp.
inline int monomial_cmp(const Monomial& a, const Monomial& b) {
  if (a.arity() != b.arity())
    throw std::invalid_argument("monomial_cmp: arity mismatch");
  long da = a.abs_degree(), db = b.abs_degree();
  if (da != db) return da < db ? -1 : 1;
  for (size_t i = 0; i < a.alpha.size(); ++i)
    if (a.alpha[i] != b.alpha[i]) return a.alpha[i] < b.alpha[i] ? -1 : 1;
  for (size_t i = 0; i < a.beta.size(); ++i)
    if (a.beta[i] != b.beta[i]) return a.beta[i] < b.beta[i] ? -1 : 1;
  return 0;
}

/// Map comparator placing the largest monomial first, so iteration order is
/// the canonical certificate/file order.
struct MonomialDesc {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return monomial_cmp(a, b) > 0;
  }
};

/// Componentwise >= on (alpha, beta).
inline bool monomial_dominates(const Monomial& a, const Monomial& b) {
  if (a.arity() != b.arity())
    throw std::invalid_argument("monomial_dominates: arity mismatch");
  for (size_t i = 0; i < a.alpha.size(); ++i)
    if (a.alpha[i] < b.alpha[i]) return false;
  for (size_t i = 0; i < a.beta.size(); ++i)
    if (a.beta[i] < b.beta[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Generator symbols and variable subsets
// ---------------------------------------------------------------------------

/// One of the 2r generators; index is 0-based, display is 1-based ("L1").
struct Symbol {
  bool is_m = false;
  int index = 0;

  std::string name() const {
    return (is_m ? "M" : "L") + std::to_string(index + 1);
  }
  std::string classical_name() const {
    return (is_m ? "m" : "l") + std::to_string(index + 1);
  }
  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol& a, const Symbol& b) {
    if (a.is_m != b.is_m) return a.is_m <=> b.is_m;  // L's before M's
    return a.index <=> b.index;
  }
};

/// Subset of the generators, optionally with a positive multiplicity per
/// member (the powers L_i^{a_i}, M_j^{b_j} spanning the search space).
struct VariableSubset {
  std::vector<Symbol> members;        // sorted, unique
  std::vector<int> multiplicities;    // parallel to members; empty = all 1

  VariableSubset() = default;
  explicit VariableSubset(std::vector<Symbol> syms, std::vector<int> mult = {})
      : members(std::move(syms)), multiplicities(std::move(mult)) {
    std::sort(members.begin(), members.end());
    if (!multiplicities.empty() && multiplicities.size() != members.size())
      throw std::invalid_argument("VariableSubset: multiplicity arity mismatch");
    for (int m : multiplicities)
      if (m < 1) throw std::invalid_argument("VariableSubset: multiplicities must be >= 1");
  }

  int multiplicity_of(size_t i) const {
    return multiplicities.empty() ? 1 : multiplicities[i];
  }

  bool contains(const Symbol& s) const {
    for (const Symbol& m : members)
      if (m == s) return true;
    return false;
  }

  std::string str() const {
    std::string out = "{";
    for (size_t i = 0; i < members.size(); ++i) {
      if (i) out += ",";
      out += members[i].name();
      if (multiplicity_of(i) != 1) out += "^" + std::to_string(multiplicity_of(i));
    }
    return out + "}";
  }

  friend bool operator==(const VariableSubset&, const VariableSubset&) = default;
  friend auto operator<=>(const VariableSubset&, const VariableSubset&) = default;
};

/// All cardinality-(r+1) subsets of {L_1..L_r, M_1..M_r}, in lexicographic
/// order of the sorted symbol lists.
inline std::vector<VariableSubset> all_subsets_r_plus_1(int r) {
  std::vector<Symbol> symbols;
  for (int i = 0; i < r; ++i) symbols.push_back({false, i});
  for (int i = 0; i < r; ++i) symbols.push_back({true, i});
  std::vector<VariableSubset> out;
  const int n = 2 * r, k = r + 1;
  std::vector<int> idx(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
  while (true) {
    std::vector<Symbol> pick;
    for (int i : idx) pick.push_back(symbols[static_cast<size_t>(i)]);
    out.emplace_back(std::move(pick));
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<size_t>(pos)];
    for (int i = pos + 1; i < k; ++i)
      idx[static_cast<size_t>(i)] = idx[static_cast<size_t>(i - 1)] + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operators in W_r / W_{r,+}
// ---------------------------------------------------------------------------

enum class OpVariant { Wr, WrPlus };

inline std::string variant_name(OpVariant v) {
  return v == OpVariant::Wr ? "Wr" : "Wr+";
}

/// Normal-form element of the quantum Weyl algebra: a finite sum of
/// coeff(q) * M^beta * L^alpha with all M-factors to the left of all
/// L-factors. The commutation scalars from reordering are absorbed into the
/// coefficients. Terms are kept in descending monomial order.
template <class K>
class Operator {
 public:
  using Coeff = RatFunc<K>;
  using TermMap = std::map<Monomial, Coeff, MonomialDesc>;

  Operator() : r_(0), variant_(OpVariant::WrPlus) {}
  Operator(int r, OpVariant variant, BaseField field = {})
      : r_(r), variant_(variant), field_(field) {
    if (r < 1) throw std::invalid_argument("Operator: arity must be >= 1");
  }

  static Operator identity(int r, OpVariant variant, BaseField field = {}) {
    Operator op(r, variant, field);
    op.add_term(Monomial::unit(r), Coeff(1));
    return op;
  }

  int arity() const { return r_; }
  OpVariant variant() const { return variant_; }
  const BaseField& field() const { return field_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }

  void add_term(Monomial m, Coeff c) {
    if (m.arity() != r_) throw std::invalid_argument("Operator: term arity mismatch");
    if (variant_ == OpVariant::WrPlus) {
      for (int a : m.alpha)
        if (a < 0) throw std::domain_error("Operator: negative L-exponent in Wr+");
      for (int b : m.beta)
        if (b < 0) throw std::domain_error("Operator: negative M-exponent in Wr+");
    }
    if (c.is_zero()) return;
    c = c.with_power_split(field_.power_split);
    auto [it, inserted] = terms_.try_emplace(std::move(m), c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Coeff coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  friend bool operator==(const Operator& a, const Operator& b) {
    return a.r_ == b.r_ && a.variant_ == b.variant_ && a.field_ == b.field_ &&
           a.terms_ == b.terms_;
  }
  friend bool operator!=(const Operator& a, const Operator& b) { return !(a == b); }

 private:
  int r_;
  OpVariant variant_;
  BaseField field_;
  TermMap terms_;
};

namespace detail {
template <class K>
void check_compatible(const Operator<K>& a, const Operator<K>& b) {
  if (a.arity() != b.arity())
    throw std::invalid_argument("operator arity mismatch");
  if (a.variant() != b.variant())
    throw std::invalid_argument("operator variant mismatch");
  if (!(a.field() == b.field()))
    throw std::invalid_argument("operator coefficient field mismatch");
}
}  // namespace detail

template <class K>
Operator<K> op_add(const Operator<K>& a, const Operator<K>& b) {
  detail::check_compatible(a, b);
  Operator<K> out = a;
  for (const auto& [m, c] : b.terms()) out.add_term(m, c);
  return out;
}

template <class K>
Operator<K> op_scale(const RatFunc<K>& c, const Operator<K>& a) {
  Operator<K> out(a.arity(), a.variant(), a.field());
  if (c.is_zero()) return out;
  for (const auto& [m, v] : a.terms()) out.add_term(m, v * c);
  return out;
}

template <class K>
Operator<K> op_neg(const Operator<K>& a) {
  return op_scale<K>(RatFunc<K>(-1), a);
}

template <class K>
Operator<K> op_sub(const Operator<K>& a, const Operator<K>& b) {
  return op_add(a, op_neg(b));
}

/// Normal-form product. Termwise, with q^(alpha1 . beta2) produced by the
/// commutation L_i^a M_i^b = q^(ab) M_i^b L_i^a:
///   (c1 M^b1 L^a1)(c2 M^b2 L^a2) = c1 c2 q^(a1.b2) M^(b1+b2) L^(a1+a2).
template <class K>
Operator<K> op_mul(const Operator<K>& a, const Operator<K>& b) {
  detail::check_compatible(a, b);
  const int r = a.arity();
  Operator<K> out(r, a.variant(), a.field());
  for (const auto& [m1, c1] : a.terms()) {
    for (const auto& [m2, c2] : b.terms()) {
      long dot = 0;
      Monomial m = m1;
      for (int i = 0; i < r; ++i) {
        dot += static_cast<long>(m1.alpha[static_cast<size_t>(i)]) *
               m2.beta[static_cast<size_t>(i)];
        m.alpha[static_cast<size_t>(i)] += m2.alpha[static_cast<size_t>(i)];
        m.beta[static_cast<size_t>(i)] += m2.beta[static_cast<size_t>(i)];
      }
      RatFunc<K> c = c1 * c2 *
          RatFunc<K>::q_power(dot, a.field().power_split);
      out.add_term(std::move(m), std::move(c));
    }
  }
  return out;
}

/// Symbols (L_i or M_j) appearing with a nonzero exponent somewhere.
template <class K>
std::vector<Symbol> op_support(const Operator<K>& a) {
  std::set<Symbol> s;
  for (const auto& [m, c] : a.terms()) {
    for (int i = 0; i < a.arity(); ++i) {
      if (m.alpha[static_cast<size_t>(i)] != 0) s.insert({false, i});
      if (m.beta[static_cast<size_t>(i)] != 0) s.insert({true, i});
    }
  }
  return {s.begin(), s.end()};
}

/// True when every symbol used by the operator lies in the subset.
template <class K>
bool op_supported_in(const Operator<K>& a, const VariableSubset& subset) {
  for (const Symbol& s : op_support(a))
    if (!subset.contains(s)) return false;
  return true;
}

template <class K>
Monomial op_leading_monomial(const Operator<K>& a) {
  if (a.is_zero()) throw std::domain_error("op_leading_monomial: zero operator");
  return a.terms().begin()->first;
}

/// Left-multiplies by the componentwise-minimal monomial M^s L^t making all
/// exponents non-negative; annihilation of any sequence is preserved since
/// monomials act invertibly. Already-positive operators pass through with
/// only the variant retagged.
template <class K>
Operator<K> clear_to_positive(const Operator<K>& a) {
  const int r = a.arity();
  std::vector<int> t(static_cast<size_t>(r), 0), s(static_cast<size_t>(r), 0);
  for (const auto& [m, c] : a.terms()) {
    for (int i = 0; i < r; ++i) {
      t[static_cast<size_t>(i)] = std::max(t[static_cast<size_t>(i)], -m.alpha[static_cast<size_t>(i)]);
      s[static_cast<size_t>(i)] = std::max(s[static_cast<size_t>(i)], -m.beta[static_cast<size_t>(i)]);
    }
  }
  Operator<K> out(r, OpVariant::WrPlus, a.field());
  for (const auto& [m, c] : a.terms()) {
    long dot = 0;
    Monomial nm = m;
    for (int i = 0; i < r; ++i) {
      dot += static_cast<long>(t[static_cast<size_t>(i)]) * m.beta[static_cast<size_t>(i)];
      nm.alpha[static_cast<size_t>(i)] += t[static_cast<size_t>(i)];
      nm.beta[static_cast<size_t>(i)] += s[static_cast<size_t>(i)];
    }
    out.add_term(std::move(nm),
                 c * RatFunc<K>::q_power(dot, a.field().power_split));
  }
  return out;
}

/// Coefficient substitution q -> omega q for omega = zeta_p. Requires every
/// M-exponent divisible by p; monomials are unchanged, so an annihilator of
/// f maps to an annihilator of f(omega q).
inline Operator<Cyclo> op_subst_root(const Operator<Rat>& a, int p) {
  if (a.field().power_split != 1)
    throw std::domain_error("op_subst_root: requires a plain q base");
  BaseField f{p, 1};
  Operator<Cyclo> out(a.arity(), a.variant(), f);
  for (const auto& [m, c] : a.terms()) {
    for (int b : m.beta)
      if (b % p != 0)
        throw std::domain_error("op_subst_root: M-exponent " + std::to_string(b) +
                                " not divisible by " + std::to_string(p));
    out.add_term(m, subst_q_omega(c, p));
  }
  return out;
}

/// Coefficient/exponent substitution realizing q -> q^(a/k): q-exponents
/// scale by a (u-field with q = u^k), each M_i^(k b) becomes M_i^(a b),
/// L-exponents unchanged.
template <class K>
Operator<K> op_subst_alpha(const Operator<K>& op, long a, int k) {
  if (op.field().power_split != 1)
    throw std::domain_error("op_subst_alpha: requires a plain q base");
  BaseField f = op.field();
  f.power_split = k;
  Operator<K> out(op.arity(), op.variant(), f);
  for (const auto& [m, c] : op.terms()) {
    Monomial nm = m;
    for (size_t i = 0; i < nm.beta.size(); ++i) {
      if (nm.beta[i] % k != 0)
        throw std::domain_error("op_subst_alpha: M-exponent " +
                                std::to_string(nm.beta[i]) + " not divisible by " +
                                std::to_string(k));
      nm.beta[i] = static_cast<int>(static_cast<long>(nm.beta[i]) / k * a);
    }
    out.add_term(std::move(nm), subst_q_alpha(c, a, k));
  }
  return out;
}

/// Multiplies through by the least common multiple of the coefficient
/// denominators, yielding polynomial coefficients. Annihilation is
/// preserved (the lcm is a central nonzero scalar).
template <class K>
Operator<K> op_clear_denominators(const Operator<K>& a) {
  Poly<K> l = Poly<K>::one();
  for (const auto& [m, c] : a.terms()) l = Poly<K>::lcm(l, c.den());
  if (l.is_one()) return a;
  return op_scale(RatFunc<K>(l, a.field().power_split), a);
}

/// Rescales so the coefficient of the leading monomial is 1.
template <class K>
Operator<K> op_monic(const Operator<K>& a) {
  if (a.is_zero()) return a;
  return op_scale(a.terms().begin()->second.inv(), a);
}

// ---------------------------------------------------------------------------
// Polynomials in the index-multiplication operators m_1..m_r
// ---------------------------------------------------------------------------

/// Comparator on exponent vectors: graded then lexicographic, descending.
struct ExpVecDesc {
  bool operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    long da = 0, db = 0;
    for (int x : a) da += x;
    for (int x : b) db += x;
    if (da != db) return da > db;
    return a > b;
  }
};

/// Polynomial in m_1..m_r with coefficients C (a field scalar for classical
/// operators, a rational function for mixed ones).
template <class C>
class MPoly {
 public:
  MPoly() : r_(0) {}
  explicit MPoly(int r) : r_(r) {}
  MPoly(int r, C constant) : r_(r) {
    add_term(std::vector<int>(static_cast<size_t>(r), 0), std::move(constant));
  }

  static MPoly variable(int r, int j) {
    MPoly p(r);
    std::vector<int> e(static_cast<size_t>(r), 0);
    e[static_cast<size_t>(j)] = 1;
    p.add_term(std::move(e), C(1));
    return p;
  }

  int arity() const { return r_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<std::vector<int>, C, ExpVecDesc>& terms() const { return terms_; }

  /// True when the polynomial is a constant (possibly zero).
  bool is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    for (int e : terms_.begin()->first)
      if (e != 0) return false;
    return true;
  }

  long total_degree() const {
    long d = 0;
    for (const auto& [e, c] : terms_) {
      long t = 0;
      for (int x : e) t += x;
      d = std::max(d, t);
    }
    return d;
  }

  void add_term(std::vector<int> exps, C coeff) {
    if (static_cast<int>(exps.size()) != r_)
      throw std::invalid_argument("MPoly: exponent arity mismatch");
    for (int e : exps)
      if (e < 0) throw std::domain_error("MPoly: negative exponent");
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(std::move(exps), coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  MPoly operator-() const {
    MPoly out(r_);
    for (const auto& [e, c] : terms_) out.add_term(e, -c);
    return out;
  }
  friend MPoly operator+(const MPoly& a, const MPoly& b) {
    if (a.r_ != b.r_) throw std::invalid_argument("MPoly: arity mismatch");
    MPoly out = a;
    for (const auto& [e, c] : b.terms_) out.add_term(e, c);
    return out;
  }
  friend MPoly operator-(const MPoly& a, const MPoly& b) { return a + (-b); }
  friend MPoly operator*(const MPoly& a, const MPoly& b) {
    if (a.r_ != b.r_) throw std::invalid_argument("MPoly: arity mismatch");
    MPoly out(a.r_);
    for (const auto& [e1, c1] : a.terms_)
      for (const auto& [e2, c2] : b.terms_) {
        std::vector<int> e = e1;
        for (size_t i = 0; i < e.size(); ++i) e[i] += e2[i];
        out.add_term(std::move(e), c1 * c2);
      }
    return out;
  }
  MPoly scaled(const C& s) const {
    MPoly out(r_);
    if (s.is_zero()) return out;
    for (const auto& [e, c] : terms_) out.add_term(e, c * s);
    return out;
  }

  /// Substitution m_j -> m_j + delta_j via binomial expansion; realizes the
  /// shift rule l^alpha p(m) = p(m + alpha) l^alpha.
  MPoly shifted(const std::vector<int>& delta) const {
    MPoly out(r_);
    for (const auto& [e, c] : terms_) {
      // expand prod_j (m_j + delta_j)^(e_j)
      MPoly term(r_, c);
      for (int j = 0; j < r_; ++j) {
        MPoly base = MPoly::variable(r_, j) + MPoly(r_, C(static_cast<long>(delta[static_cast<size_t>(j)])));
        for (int rep = 0; rep < e[static_cast<size_t>(j)]; ++rep) term = term * base;
      }
      out = out + term;
    }
    return out;
  }

  /// Value at an integer index vector.
  C eval(const std::vector<long long>& n) const {
    if (static_cast<int>(n.size()) != r_)
      throw std::invalid_argument("MPoly: index arity mismatch");
    C acc(0);
    for (const auto& [e, c] : terms_) {
      C term = c;
      for (int j = 0; j < r_; ++j)
        for (int rep = 0; rep < e[static_cast<size_t>(j)]; ++rep)
          term = term * C(static_cast<long>(n[static_cast<size_t>(j)]));
      acc += term;
    }
    return acc;
  }

  /// Coefficient-wise map to another coefficient type.
  template <class D, class Fn>
  MPoly<D> map(Fn&& fn) const {
    MPoly<D> out(r_);
    for (const auto& [e, c] : terms_) out.add_term(e, fn(c));
    return out;
  }

  friend bool operator==(const MPoly&, const MPoly&) = default;

 private:
  int r_;
  std::map<std::vector<int>, C, ExpVecDesc> terms_;
};

// ---------------------------------------------------------------------------
// Classical Weyl algebra A_r
// ---------------------------------------------------------------------------

/// Normal-form element of A_r: finite sum of p(m) l^alpha with polynomial
/// coefficients, all l-exponents non-negative.
template <class K>
class ClassicalOperator {
 public:
  ClassicalOperator() : r_(0) {}
  explicit ClassicalOperator(int r) : r_(r) {
    if (r < 1) throw std::invalid_argument("ClassicalOperator: arity must be >= 1");
  }

  int arity() const { return r_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<std::vector<int>, MPoly<K>, ExpVecDesc>& terms() const { return terms_; }

  void add_term(std::vector<int> l_exps, MPoly<K> coeff) {
    if (static_cast<int>(l_exps.size()) != r_)
      throw std::invalid_argument("ClassicalOperator: arity mismatch");
    for (int e : l_exps)
      if (e < 0) throw std::domain_error("ClassicalOperator: negative l-exponent");
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(std::move(l_exps), coeff);
    if (!inserted) {
      it->second = it->second + coeff;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend bool operator==(const ClassicalOperator&, const ClassicalOperator&) = default;

 private:
  int r_;
  std::map<std::vector<int>, MPoly<K>, ExpVecDesc> terms_;
};

template <class K>
ClassicalOperator<K> classical_add(const ClassicalOperator<K>& a,
                                   const ClassicalOperator<K>& b) {
  if (a.arity() != b.arity()) throw std::invalid_argument("classical_add: arity mismatch");
  ClassicalOperator<K> out = a;
  for (const auto& [e, c] : b.terms()) out.add_term(e, c);
  return out;
}

template <class K>
ClassicalOperator<K> classical_scale(const K& s, const ClassicalOperator<K>& a) {
  ClassicalOperator<K> out(a.arity());
  for (const auto& [e, c] : a.terms()) out.add_term(e, c.scaled(s));
  return out;
}

/// Normal-form product via the shift rule l^alpha p(m) = p(m + alpha) l^alpha.
template <class K>
ClassicalOperator<K> classical_mul(const ClassicalOperator<K>& a,
                                   const ClassicalOperator<K>& b) {
  if (a.arity() != b.arity()) throw std::invalid_argument("classical_mul: arity mismatch");
  ClassicalOperator<K> out(a.arity());
  for (const auto& [e1, p1] : a.terms()) {
    for (const auto& [e2, p2] : b.terms()) {
      std::vector<int> e = e1;
      for (size_t i = 0; i < e.size(); ++i) e[i] += e2[i];
      out.add_term(std::move(e), p1 * p2.shifted(e1));
    }
  }
  return out;
}

/// Symbols (l_i / m_j) used by a classical operator, as L/M symbols.
template <class K>
std::vector<Symbol> classical_support(const ClassicalOperator<K>& a) {
  std::set<Symbol> s;
  for (const auto& [l, p] : a.terms()) {
    for (int i = 0; i < a.arity(); ++i)
      if (l[static_cast<size_t>(i)] != 0) s.insert({false, i});
    for (const auto& [e, c] : p.terms())
      for (int i = 0; i < a.arity(); ++i)
        if (e[static_cast<size_t>(i)] != 0) s.insert({true, i});
  }
  return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------
// Mixed operators: W_r terms with m-polynomial factors
// ---------------------------------------------------------------------------

/// Element of W_r extended by the integer-multiplication operators m_j:
/// finite sum of g(m) * c(q) * M^beta L^alpha, stored per monomial as an
/// m-polynomial with rational-function coefficients. These arise from
/// commuting D_q past W_r operators.
template <class K>
class MixedOperator {
 public:
  using MCoeff = MPoly<RatFunc<K>>;

  MixedOperator() : r_(0), variant_(OpVariant::WrPlus) {}
  MixedOperator(int r, OpVariant variant, BaseField field = {})
      : r_(r), variant_(variant), field_(field) {
    if (r < 1) throw std::invalid_argument("MixedOperator: arity must be >= 1");
  }

  int arity() const { return r_; }
  OpVariant variant() const { return variant_; }
  const BaseField& field() const { return field_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, MCoeff, MonomialDesc>& terms() const { return terms_; }

  void add_term(Monomial m, MCoeff coeff) {
    if (m.arity() != r_) throw std::invalid_argument("MixedOperator: arity mismatch");
    if (coeff.arity() != r_)
      throw std::invalid_argument("MixedOperator: m-poly arity mismatch");
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(std::move(m), coeff);
    if (!inserted) {
      it->second = it->second + coeff;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend bool operator==(const MixedOperator&, const MixedOperator&) = default;

 private:
  int r_;
  OpVariant variant_;
  BaseField field_;
  std::map<Monomial, MCoeff, MonomialDesc> terms_;
};

/// Embeds a plain operator as a mixed one (m-polynomial factor 1).
template <class K>
MixedOperator<K> to_mixed(const Operator<K>& a) {
  MixedOperator<K> out(a.arity(), a.variant(), a.field());
  for (const auto& [m, c] : a.terms())
    out.add_term(m, MPoly<RatFunc<K>>(a.arity(), c));
  return out;
}

/// Commutator remainder R with D_q(T . f) = T . (D_q f) + R . f as
/// operators on sequences. For a term c(q) g(m) M^beta L^alpha the remainder
/// term is [c'(q) + c(q)/q * (beta . m)] g(m) M^beta L^alpha. Coefficients
/// must be Laurent polynomials in q; clear denominators first.
template <class K>
MixedOperator<K> dq_commutator(const MixedOperator<K>& t) {
  if (t.field().power_split != 1)
    throw std::domain_error("dq_commutator: requires a plain q base");
  const int r = t.arity();
  MixedOperator<K> out(r, t.variant(), t.field());
  for (const auto& [mono, g] : t.terms()) {
    MPoly<RatFunc<K>> acc(r);
    for (const auto& [mexp, c] : g.terms()) {
      if (!c.is_laurent())
        throw std::domain_error(
            "dq_commutator: coefficient is not a Laurent polynomial in q; "
            "clear denominators first");
      RatFunc<K> dc = c.d_dq();
      if (!dc.is_zero()) acc.add_term(mexp, dc);
      RatFunc<K> c_over_q = c * RatFunc<K>::u_power(-1);
      for (int j = 0; j < r; ++j) {
        int bj = mono.beta[static_cast<size_t>(j)];
        if (bj == 0) continue;
        std::vector<int> e = mexp;
        e[static_cast<size_t>(j)] += 1;
        acc.add_term(std::move(e), c_over_q * RatFunc<K>(static_cast<long>(bj)));
      }
    }
    if (!acc.is_zero()) out.add_term(mono, std::move(acc));
  }
  return out;
}

template <class K>
MixedOperator<K> dq_commutator(const Operator<K>& t) {
  return dq_commutator(to_mixed(t));
}

/// Substitutes q = 1 and M_i = 1: coefficients evaluate at u = 1 (a pole
/// there raises PoleError), monomials collapse to l^alpha, and surviving
/// m-polynomials become A_r coefficients. The result may be zero.
template <class K>
ClassicalOperator<K> op_eval_q1_m1(const MixedOperator<K>& t) {
  if (t.field().power_split != 1)
    throw std::domain_error("op_eval_q1_m1: requires a plain q base");
  ClassicalOperator<K> out(t.arity());
  for (const auto& [mono, g] : t.terms()) {
    MPoly<K> evaluated =
        g.template map<K>([](const RatFunc<K>& c) { return c.eval(K(1)); });
    std::vector<int> l = mono.alpha;
    for (int a : l)
      if (a < 0)
        throw std::domain_error("op_eval_q1_m1: negative shift; clear to positive first");
    out.add_term(std::move(l), std::move(evaluated));
  }
  return out;
}

template <class K>
ClassicalOperator<K> op_eval_q1_m1(const Operator<K>& t) {
  return op_eval_q1_m1(to_mixed(t));
}

}  // namespace qholo
