#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "qholo/weyl.hpp"

namespace qholo {

using Index = std::vector<long long>;

/// Axis-aligned box of indices, lower <= upper componentwise.
class Window {
 public:
  Window() = default;
  Window(Index lower, Index upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size())
      throw std::invalid_argument("Window: arity mismatch");
    for (size_t i = 0; i < lower_.size(); ++i)
      if (lower_[i] > upper_[i])
        throw std::invalid_argument("Window: lower exceeds upper");
  }

  /// r-dimensional cube [lo, hi]^r.
  static Window cube(int r, long long lo, long long hi) {
    return Window(Index(static_cast<size_t>(r), lo), Index(static_cast<size_t>(r), hi));
  }

  int arity() const { return static_cast<int>(lower_.size()); }
  const Index& lower() const { return lower_; }
  const Index& upper() const { return upper_; }

  size_t size() const {
    size_t n = 1;
    for (size_t i = 0; i < lower_.size(); ++i)
      n *= static_cast<size_t>(upper_[i] - lower_[i] + 1);
    return n;
  }

  bool contains(const Index& n) const {
    if (n.size() != lower_.size()) return false;
    for (size_t i = 0; i < n.size(); ++i)
      if (n[i] < lower_[i] || n[i] > upper_[i]) return false;
    return true;
  }

  bool disjoint_from(const Window& o) const {
    for (size_t i = 0; i < lower_.size(); ++i)
      if (upper_[i] < o.lower_[i] || o.upper_[i] < lower_[i]) return true;
    return false;
  }

  Window translated(long long t) const {
    Index lo = lower_, hi = upper_;
    for (auto& v : lo) v += t;
    for (auto& v : hi) v += t;
    return Window(std::move(lo), std::move(hi));
  }

  /// All points in row-major order, last coordinate fastest.
  std::vector<Index> points() const {
    std::vector<Index> out;
    out.reserve(size());
    Index cur = lower_;
    while (true) {
      out.push_back(cur);
      size_t i = cur.size();
      while (i-- > 0) {
        if (cur[i] < upper_[i]) {
          ++cur[i];
          for (size_t j = i + 1; j < cur.size(); ++j) cur[j] = lower_[j];
          break;
        }
        if (i == 0) return out;
      }
    }
  }

  /// Syntax "a..b" or "a..b,c..d".
  static Window parse(const std::string& text);
  std::string str() const {
    std::string out;
    for (size_t i = 0; i < lower_.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(lower_[i]) + ".." + std::to_string(upper_[i]);
    }
    return out;
  }

  friend bool operator==(const Window&, const Window&) = default;

 private:
  Index lower_, upper_;
};

inline Window Window::parse(const std::string& text) {
  Index lo, hi;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    std::string part = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
    size_t dots = part.find("..");
    if (dots == std::string::npos)
      throw std::invalid_argument("Window: expected 'a..b' in '" + text + "'");
    lo.push_back(std::stoll(part.substr(0, dots)));
    hi.push_back(std::stoll(part.substr(dots + 2)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return Window(std::move(lo), std::move(hi));
}

enum class Domain { Naturals, Integers };

namespace detail {
inline void check_index_domain(const Index& n, Domain d, int r) {
  if (static_cast<int>(n.size()) != r)
    throw std::invalid_argument("sequence index arity mismatch");
  if (d == Domain::Naturals)
    for (long long v : n)
      if (v < 0)
        throw std::domain_error("sequence index outside the naturals domain");
}
}  // namespace detail

/// Evaluable map Z^r (or N^r) -> rational functions over the value field,
/// with an unbounded per-sequence memo cache. Copies share the cache; the
/// cache tolerates concurrent readers and idempotent concurrent first
/// writes.
template <class K>
class Sequence {
 public:
  using Value = RatFunc<K>;
  using EvalFn = std::function<Value(const Index&)>;

  Sequence() = default;
  Sequence(int r, Domain domain, BaseField field, std::string name, EvalFn eval)
      : impl_(std::make_shared<Impl>()) {
    impl_->r = r;
    impl_->domain = domain;
    impl_->field = field;
    impl_->name = std::move(name);
    impl_->eval = std::move(eval);
  }

  int arity() const { return impl_->r; }
  Domain domain() const { return impl_->domain; }
  const BaseField& field() const { return impl_->field; }
  const std::string& name() const { return impl_->name; }

  Value at(const Index& n) const {
    detail::check_index_domain(n, impl_->domain, impl_->r);
    {
      std::lock_guard<std::mutex> lock(impl_->mu);
      auto it = impl_->memo.find(n);
      if (it != impl_->memo.end()) return it->second;
    }
    Value v = impl_->eval(n);
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->memo.emplace(n, std::move(v)).first->second;
  }

  bool is_zero_on(const Window& w) const {
    for (const Index& n : w.points())
      if (!at(n).is_zero()) return false;
    return true;
  }

 private:
  struct Impl {
    int r = 0;
    Domain domain = Domain::Integers;
    BaseField field;
    std::string name;
    EvalFn eval;
    std::mutex mu;
    std::map<Index, Value> memo;
  };
  std::shared_ptr<Impl> impl_;
};

/// Scalar-valued sequence (values in the coefficient field itself), the
/// home of evaluations at roots of unity and of classical guessing.
template <class K>
class ScalarSequence {
 public:
  using EvalFn = std::function<K(const Index&)>;

  ScalarSequence() = default;
  ScalarSequence(int r, Domain domain, std::string name, EvalFn eval)
      : impl_(std::make_shared<Impl>()) {
    impl_->r = r;
    impl_->domain = domain;
    impl_->name = std::move(name);
    impl_->eval = std::move(eval);
  }

  int arity() const { return impl_->r; }
  Domain domain() const { return impl_->domain; }
  const std::string& name() const { return impl_->name; }

  K at(const Index& n) const {
    detail::check_index_domain(n, impl_->domain, impl_->r);
    {
      std::lock_guard<std::mutex> lock(impl_->mu);
      auto it = impl_->memo.find(n);
      if (it != impl_->memo.end()) return it->second;
    }
    K v = impl_->eval(n);
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->memo.emplace(n, std::move(v)).first->second;
  }

  bool is_zero_on(const Window& w) const {
    for (const Index& n : w.points())
      if (!at(n).is_zero()) return false;
    return true;
  }

 private:
  struct Impl {
    int r = 0;
    Domain domain = Domain::Integers;
    std::string name;
    EvalFn eval;
    std::mutex mu;
    std::map<Index, K> memo;
  };
  std::shared_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Operator actions
// ---------------------------------------------------------------------------

/// Module action: (q^c L^alpha M^beta f)_n = q^c u^(k beta.n) f_(n+alpha),
/// extended linearly. The M-action multiplies by u^(k n_i) so that it
/// realizes q^(n_i) over fields with q = u^k.
template <class K>
Sequence<K> apply(const Operator<K>& op, const Sequence<K>& f) {
  if (op.arity() != f.arity())
    throw std::invalid_argument("apply: arity mismatch");
  if (!(op.field() == f.field()))
    throw std::invalid_argument("apply: operator/sequence field mismatch");
  const int k = f.field().power_split;
  return Sequence<K>(
      f.arity(), f.domain(), f.field(), "(" + f.name() + " acted)",
      [op, f, k](const Index& n) {
        RatFunc<K> acc(0);
        for (const auto& [m, c] : op.terms()) {
          long long dot = 0;
          Index shifted = n;
          for (size_t i = 0; i < n.size(); ++i) {
            dot += static_cast<long long>(m.beta[i]) * n[i];
            shifted[i] += m.alpha[i];
          }
          acc += c * RatFunc<K>::u_power(dot * k, k) * f.at(shifted);
        }
        return acc;
      });
}

/// Classical action: (m_j g)_n = n_j g_n, (l_i g)_n = g_(n+delta_i),
/// extended by polynomial coefficients and linearity.
template <class K>
ScalarSequence<K> apply_classical(const ClassicalOperator<K>& op,
                                  const ScalarSequence<K>& g) {
  if (op.arity() != g.arity())
    throw std::invalid_argument("apply_classical: arity mismatch");
  return ScalarSequence<K>(
      g.arity(), g.domain(), "(" + g.name() + " acted)",
      [op, g](const Index& n) {
        K acc(0);
        for (const auto& [l, poly] : op.terms()) {
          Index shifted = n;
          for (size_t i = 0; i < n.size(); ++i) shifted[i] += l[i];
          acc += poly.eval(n) * g.at(shifted);
        }
        return acc;
      });
}

/// Mixed action: each term acts as (m-polynomial at n) * (q-coefficient) *
/// (M^beta L^alpha f).
template <class K>
Sequence<K> apply_mixed(const MixedOperator<K>& op, const Sequence<K>& f) {
  if (op.arity() != f.arity())
    throw std::invalid_argument("apply_mixed: arity mismatch");
  const int k = f.field().power_split;
  return Sequence<K>(
      f.arity(), f.domain(), f.field(), "(" + f.name() + " mixed-acted)",
      [op, f, k](const Index& n) {
        RatFunc<K> acc(0);
        for (const auto& [m, g] : op.terms()) {
          long long dot = 0;
          Index shifted = n;
          for (size_t i = 0; i < n.size(); ++i) {
            dot += static_cast<long long>(m.beta[i]) * n[i];
            shifted[i] += m.alpha[i];
          }
          acc += g.eval(n) * RatFunc<K>::u_power(dot * k, k) * f.at(shifted);
        }
        return acc;
      });
}

// ---------------------------------------------------------------------------
// Sequence-level transforms
// ---------------------------------------------------------------------------

/// Termwise d/dq; the value field must have u = q.
template <class K>
Sequence<K> seq_dq(const Sequence<K>& f) {
  if (f.field().power_split != 1)
    throw std::domain_error("seq_dq: requires a plain q base (k = 1)");
  return Sequence<K>(f.arity(), f.domain(), f.field(), "dq(" + f.name() + ")",
                     [f](const Index& n) { return f.at(n).d_dq(); });
}

/// f(omega q) for omega = zeta_p: values pass through subst_q_omega.
inline Sequence<Cyclo> seq_subst_root(const Sequence<Rat>& f, int p) {
  BaseField field{p, 1};
  return Sequence<Cyclo>(f.arity(), f.domain(), field,
                         "root" + std::to_string(p) + "(" + f.name() + ")",
                         [f, p](const Index& n) { return subst_q_omega(f.at(n), p); });
}

/// q -> zeta_p^j q on an already-cyclotomic sequence (j = p-1 applies the
/// conjugate root).
inline Sequence<Cyclo> seq_twist_root(const Sequence<Cyclo>& f, long j) {
  int p = f.field().cyclo_order;
  return Sequence<Cyclo>(
      f.arity(), f.domain(), f.field(),
      "twist" + std::to_string(j) + "(" + f.name() + ")",
      [f, p, j](const Index& n) { return subst_q_zeta_pow(f.at(n), p, j); });
}

/// f(q^alpha) with alpha = a/k: every value maps q -> u^a and the value
/// field records q = u^k, so the module action tracks q^(n_i) = u^(k n_i).
template <class K>
Sequence<K> seq_subst_alpha(const Sequence<K>& f, long a, int k) {
  if (k < 1) throw std::domain_error("seq_subst_alpha: k must be >= 1");
  if (std::abs(a) > 0 && gcd_z(mpz_class(a), mpz_class(k)) != 1)
    throw std::domain_error("seq_subst_alpha: gcd(a, k) must be 1");
  if (f.field().power_split != 1)
    throw std::domain_error("seq_subst_alpha: requires a plain q base");
  BaseField field = f.field();
  field.power_split = k;
  return Sequence<K>(
      f.arity(), f.domain(), field,
      "alpha" + std::to_string(a) + "/" + std::to_string(k) + "(" + f.name() + ")",
      [f, a, k](const Index& n) {
        return f.at(n).map_exponents([a](long e) { return e * a; }, k);
      });
}

/// Pointwise evaluation at q = zeta_p (p = 1 means q = 1); a pole at some
/// index raises PoleError carrying that index.
inline ScalarSequence<Cyclo> seq_eval_at_root(const Sequence<Rat>& f, int p) {
  return ScalarSequence<Cyclo>(
      f.arity(), f.domain(), "eval" + std::to_string(p) + "(" + f.name() + ")",
      [f, p](const Index& n) -> Cyclo {
        try {
          return eval_at_root(f.at(n), p);
        } catch (const PoleError&) {
          throw PoleError("pole at q = zeta_" + std::to_string(p), n);
        }
      });
}

inline ScalarSequence<Cyclo> seq_eval_at_root(const Sequence<Cyclo>& f, int p) {
  return ScalarSequence<Cyclo>(
      f.arity(), f.domain(), "eval" + std::to_string(p) + "(" + f.name() + ")",
      [f, p](const Index& n) -> Cyclo {
        try {
          return eval_at_root(f.at(n), p);
        } catch (const PoleError&) {
          throw PoleError("pole at q = zeta_" + std::to_string(p), n);
        }
      });
}

/// Rational view of a Q(zeta_1)-valued sequence (zeta_1 = 1).
inline ScalarSequence<Rat> scalar_seq_to_rational(const ScalarSequence<Cyclo>& g) {
  return ScalarSequence<Rat>(g.arity(), g.domain(), g.name(),
                             [g](const Index& n) { return g.at(n).rational_part(); });
}

// ---------------------------------------------------------------------------
// Built-in library
// ---------------------------------------------------------------------------

namespace detail {
/// (q;q)_n as an exact polynomial; empty product for n = 0, zero for n < 0.
inline Poly<Rat> pochhammer_poly(long long n) {
  if (n < 0) return Poly<Rat>();
  Poly<Rat> acc = Poly<Rat>::one();
  for (long long j = 1; j <= n; ++j)
    acc = acc * (Poly<Rat>::one() - Poly<Rat>::monomial(Rat(1), static_cast<int>(j)));
  return acc;
}
}  // namespace detail

/// q^(n^2), arity 1.
inline Sequence<Rat> seq_q_power_square() {
  return Sequence<Rat>(1, Domain::Integers, {}, "qpow2", [](const Index& n) {
    return RatFunc<Rat>::q_power(n[0] * n[0]);
  });
}

/// q^(n k), arity 2.
inline Sequence<Rat> seq_q_power_bilinear() {
  return Sequence<Rat>(2, Domain::Integers, {}, "qnk", [](const Index& n) {
    return RatFunc<Rat>::q_power(n[0] * n[1]);
  });
}

/// (q;q)_n, arity 1; zero for n < 0.
inline Sequence<Rat> seq_q_pochhammer() {
  return Sequence<Rat>(1, Domain::Integers, {}, "poch", [](const Index& n) {
    return RatFunc<Rat>(detail::pochhammer_poly(n[0]));
  });
}

/// Gaussian binomial [n choose k]_q, arity 2; zero outside 0 <= k <= n.
inline Sequence<Rat> seq_q_binomial() {
  return Sequence<Rat>(2, Domain::Integers, {}, "qbinom", [](const Index& n) {
    long long nn = n[0], kk = n[1];
    if (kk < 0 || kk > nn) return RatFunc<Rat>(0);
    return ratfunc_normalize(detail::pochhammer_poly(nn),
                             detail::pochhammer_poly(kk) *
                                 detail::pochhammer_poly(nn - kk));
  });
}

/// [n]_q = (1 - q^n)/(1 - q), arity 1 (Laurent-extended for n < 0).
inline Sequence<Rat> seq_q_integer() {
  return Sequence<Rat>(1, Domain::Integers, {}, "qint", [](const Index& n) {
    RatFunc<Rat> one(1);
    RatFunc<Rat> qn = RatFunc<Rat>::q_power(n[0]);
    RatFunc<Rat> q = RatFunc<Rat>::q_power(1);
    return (one - qn) / (one - q);
  });
}

/// 1 at the origin of Z^r, 0 elsewhere.
inline Sequence<Rat> seq_delta_at_origin(int r = 1) {
  return Sequence<Rat>(r, Domain::Integers, {}, "delta", [](const Index& n) {
    for (long long v : n)
      if (v != 0) return RatFunc<Rat>(0);
    return RatFunc<Rat>(1);
  });
}

template <class K>
Sequence<K> seq_product(const Sequence<K>& f, const Sequence<K>& g) {
  if (f.arity() != g.arity() || !(f.field() == g.field()))
    throw std::invalid_argument("seq_product: incompatible sequences");
  return Sequence<K>(f.arity(), f.domain(), f.field(),
                     "prod(" + f.name() + "," + g.name() + ")",
                     [f, g](const Index& n) { return f.at(n) * g.at(n); });
}

template <class K>
Sequence<K> seq_sum(const Sequence<K>& f, const Sequence<K>& g) {
  if (f.arity() != g.arity() || !(f.field() == g.field()))
    throw std::invalid_argument("seq_sum: incompatible sequences");
  return Sequence<K>(f.arity(), f.domain(), f.field(),
                     "sum(" + f.name() + "," + g.name() + ")",
                     [f, g](const Index& n) { return f.at(n) + g.at(n); });
}

/// Restriction to the main diagonal: arity drops to 1.
template <class K>
Sequence<K> seq_diagonal(const Sequence<K>& f) {
  return Sequence<K>(1, f.domain(), f.field(), "diag(" + f.name() + ")",
                     [f](const Index& n) {
                       return f.at(Index(static_cast<size_t>(f.arity()), n[0]));
                     });
}

template <class K>
Sequence<K> seq_scale(const RatFunc<K>& c, const Sequence<K>& f) {
  return Sequence<K>(f.arity(), f.domain(), f.field(), "scaled(" + f.name() + ")",
                     [c, f](const Index& n) { return c * f.at(n); });
}

/// Finitely-supported sequence from an explicit table (0 off the table).
template <class K>
Sequence<K> sequence_from_table(int r, std::map<Index, RatFunc<K>> table,
                                BaseField field = {}) {
  auto shared = std::make_shared<std::map<Index, RatFunc<K>>>(std::move(table));
  return Sequence<K>(r, Domain::Integers, field, "table",
                     [shared](const Index& n) {
                       auto it = shared->find(n);
                       return it == shared->end() ? RatFunc<K>(0) : it->second;
                     });
}

/// Registry facade for the CLI: builtin names with fixed arity.
struct BuiltinInfo {
  std::string name;
  int arity;
  std::string description;
};

inline std::vector<BuiltinInfo> builtin_catalog() {
  return {
      {"qpow2", 1, "q^(n^2)"},
      {"qnk", 2, "q^(n*k)"},
      {"qbinom", 2, "Gaussian binomial [n choose k]_q (0 outside 0<=k<=n)"},
      {"qint", 1, "[n]_q = (1-q^n)/(1-q)"},
      {"poch", 1, "(q;q)_n (0 for n < 0)"},
      {"delta", 1, "1 at the origin, 0 elsewhere"},
  };
}

inline Sequence<Rat> make_builtin(const std::string& name) {
  if (name == "qpow2") return seq_q_power_square();
  if (name == "qnk") return seq_q_power_bilinear();
  if (name == "qbinom") return seq_q_binomial();
  if (name == "qint") return seq_q_integer();
  if (name == "poch") return seq_q_pochhammer();
  if (name == "delta") return seq_delta_at_origin();
  throw std::invalid_argument("unknown sequence '" + name + "'");
}

}  // namespace qholo
