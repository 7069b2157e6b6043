#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qholo/linalg.hpp"
#include "qholo/sequence.hpp"

namespace qholo {

/// Search space for an annihilator: which variables may appear, maximal
/// exponents (counted in steps of the subset multiplicities), the maximal
/// q-degree of the unknown coefficients, and divisibility constraints on
/// M-exponents and coefficient q-exponents.
struct Ansatz {
  VariableSubset subset;
  int shift_bound = 1;   // L-exponent step count
  int m_bound = 1;       // M-exponent step count
  int q_bound = 2;       // max q-exponent in coefficients
  int divisible_m = 1;   // M-exponents restricted to multiples of this
  int divisible_q = 1;   // coefficient q-exponents restricted to multiples

  std::string str() const {
    std::string out = subset.str() + " d=" + std::to_string(shift_bound) +
                      " m=" + std::to_string(m_bound) +
                      " e=" + std::to_string(q_bound);
    if (divisible_m != 1) out += " m|" + std::to_string(divisible_m);
    if (divisible_q != 1) out += " q|" + std::to_string(divisible_q);
    return out;
  }
};

template <class K>
struct GuessResult {
  Operator<K> op;
  Window fit_window, verify_window;
  int basis_dim = 0;
  bool degenerate = false;
};

enum class GuessStatus { Found, None, Underdetermined, Degenerate };

template <class K>
struct GuessOutcome {
  GuessStatus status = GuessStatus::None;
  std::optional<GuessResult<K>> result;
  std::optional<Index> counterexample;
  std::string message;

  bool found() const { return status == GuessStatus::Found; }
};

namespace detail {

/// Ansatz monomials in descending fixed order. Exponents of each subset
/// member run over multiples of its multiplicity up to bound * multiplicity,
/// filtered by the divisibility constraint; variables outside the subset
/// stay at exponent zero. The unit monomial is included.
inline std::vector<Monomial> ansatz_monomials(int r, const Ansatz& a) {
  std::vector<std::vector<int>> choices;
  for (size_t i = 0; i < a.subset.members.size(); ++i) {
    const Symbol& s = a.subset.members[i];
    const int step = a.subset.multiplicity_of(i);
    const int bound = s.is_m ? a.m_bound : a.shift_bound;
    std::vector<int> exps;
    for (int c = 0; c <= bound; ++c) {
      int e = c * step;
      if (s.is_m && e % a.divisible_m != 0) continue;
      exps.push_back(e);
    }
    choices.push_back(std::move(exps));
  }
  std::vector<Monomial> out;
  std::vector<size_t> pick(choices.size(), 0);
  while (true) {
    Monomial m = Monomial::unit(r);
    for (size_t i = 0; i < choices.size(); ++i) {
      const Symbol& s = a.subset.members[i];
      int e = choices[i][pick[i]];
      (s.is_m ? m.beta : m.alpha)[static_cast<size_t>(s.index)] = e;
    }
    out.push_back(std::move(m));
    size_t i = pick.size();
    bool done = true;
    while (i-- > 0) {
      if (pick[i] + 1 < choices[i].size()) {
        ++pick[i];
        for (size_t j = i + 1; j < pick.size(); ++j) pick[j] = 0;
        done = false;
        break;
      }
    }
    if (done) break;
  }
  std::sort(out.begin(), out.end(),
            [](const Monomial& x, const Monomial& y) { return monomial_cmp(x, y) > 0; });
  return out;
}

inline std::vector<int> coefficient_exponents(const Ansatz& a) {
  std::vector<int> out;
  for (int e = 0; e <= a.q_bound; e += a.divisible_q) out.push_back(e);
  return out;
}

/// Window points ordered by L1 norm then lexicographically: cheap
/// (low-degree) rows first, deterministically.
inline std::vector<Index> ordered_points(const Window& w) {
  std::vector<Index> pts = w.points();
  std::stable_sort(pts.begin(), pts.end(), [](const Index& a, const Index& b) {
    long long na = 0, nb = 0;
    for (long long v : a) na += std::abs(v);
    for (long long v : b) nb += std::abs(v);
    if (na != nb) return na < nb;
    return a < b;
  });
  return pts;
}

/// Equations from one window index: the per-unknown multipliers
/// u^(k j) * f(n+alpha) * q^(beta.n), cleared to a common polynomial form,
/// yield one scalar row per u-power.
template <class K>
void append_index_rows(const Sequence<K>& f, const std::vector<Monomial>& monos,
                       const std::vector<int>& qexps, const Index& n,
                       std::vector<std::vector<K>>& rows) {
  const int k = f.field().power_split;
  std::vector<RatFunc<K>> values;
  values.reserve(monos.size());
  Poly<K> den_lcm = Poly<K>::one();
  for (const Monomial& m : monos) {
    Index shifted = n;
    long long dot = 0;
    for (size_t i = 0; i < shifted.size(); ++i) {
      shifted[i] += m.alpha[i];
      dot += static_cast<long long>(m.beta[i]) * n[i];
    }
    RatFunc<K> v = f.at(shifted) * RatFunc<K>::u_power(dot * k, k);
    den_lcm = Poly<K>::lcm(den_lcm, v.den());
    values.push_back(std::move(v));
  }
  // cleared multiplier polynomials and the overall degree of the identity
  std::vector<Poly<K>> cleared(monos.size());
  int max_deg = -1;
  for (size_t i = 0; i < monos.size(); ++i) {
    cleared[i] = values[i].num() * (den_lcm / values[i].den());
    max_deg = std::max(max_deg, cleared[i].degree() +
                                    (cleared[i].is_zero() ? 0 : k * qexps.back()));
  }
  if (max_deg < 0) return;  // all terms vanish at this index
  const size_t cols = monos.size() * qexps.size();
  std::vector<std::vector<K>> local(static_cast<size_t>(max_deg) + 1,
                                    std::vector<K>(cols, K(0)));
  for (size_t i = 0; i < monos.size(); ++i) {
    if (cleared[i].is_zero()) continue;
    for (size_t j = 0; j < qexps.size(); ++j) {
      const size_t col = i * qexps.size() + j;
      const int off = k * qexps[j];
      for (int t = 0; t <= cleared[i].degree(); ++t) {
        K c = cleared[i].coeff(t);
        if (!c.is_zero()) local[static_cast<size_t>(t + off)][col] = std::move(c);
      }
    }
  }
  for (auto& row : local) {
    bool zero = true;
    for (const K& c : row)
      if (!c.is_zero()) { zero = false; break; }
    if (!zero) rows.push_back(std::move(row));
  }
}

inline std::vector<std::vector<Rat>> solve_rows(
    const std::vector<std::vector<Rat>>& rows, size_t cols) {
  std::vector<std::vector<mpz_class>> zrows;
  zrows.reserve(rows.size());
  for (const auto& r : rows) zrows.push_back(rat_row_to_integers(r));
  return nullspace_integer_system(zrows, cols);
}

inline std::vector<std::vector<Cyclo>> solve_rows(
    const std::vector<std::vector<Cyclo>>& rows, size_t cols) {
  Matrix<Cyclo> m(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
  return exact_nullspace_field(m);
}

}  // namespace detail

/// Ansatz-based annihilator search. Builds the exact linear system from the
/// fit window (adding indices until the system is saturated), extracts the
/// canonical nullspace vector with the fewest nonzero monomials, and
/// accepts only candidates that annihilate f on fit and verify windows.
template <class K>
GuessOutcome<K> guess_annihilator(const Sequence<K>& f, const Ansatz& ansatz,
                                  const Window& fit, const Window& verify) {
  GuessOutcome<K> out;
  if (fit.arity() != f.arity() || verify.arity() != f.arity())
    throw std::invalid_argument("guess_annihilator: window arity mismatch");
  if (!fit.disjoint_from(verify))
    throw std::invalid_argument("guess_annihilator: fit and verify windows overlap");

  const int r = f.arity();
  const std::vector<Monomial> monos = detail::ansatz_monomials(r, ansatz);
  const std::vector<int> qexps = detail::coefficient_exponents(ansatz);
  const size_t cols = monos.size() * qexps.size();

  if (f.is_zero_on(fit)) {
    GuessResult<K> res;
    res.op = Operator<K>::identity(r, OpVariant::WrPlus, f.field());
    res.fit_window = fit;
    res.verify_window = verify;
    res.degenerate = true;
    out.status = GuessStatus::Degenerate;
    out.result = std::move(res);
    out.message = "sequence vanishes on the fit window; unit annihilator is degenerate";
    return out;
  }

  const std::vector<Index> points = detail::ordered_points(fit);
  std::vector<std::vector<K>> rows;
  size_t consumed = 0;
  size_t target = cols + std::max<size_t>(12, cols / 4);

  auto add_points_until = [&](size_t row_target) {
    while (consumed < points.size() && rows.size() < row_target)
      detail::append_index_rows(f, monos, qexps, points[consumed++], rows);
  };

  auto verify_candidate = [&](const Operator<K>& op) -> std::optional<Index> {
    Sequence<K> acted = apply(op, f);
    for (const Index& n : fit.points())
      if (!acted.at(n).is_zero()) return n;
    for (const Index& n : verify.points())
      if (!acted.at(n).is_zero()) return n;
    return std::nullopt;
  };

  while (true) {
    add_points_until(target);
    auto basis = detail::solve_rows(rows, cols);
    if (basis.empty()) {
      out.status = GuessStatus::None;
      out.message = "trivial nullspace for ansatz " + ansatz.str();
      return out;
    }

    // candidate order: fewest nonzero monomials, then basis position
    std::vector<size_t> order(basis.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto monomial_count = [&](const std::vector<K>& v) {
      size_t c = 0;
      for (size_t i = 0; i < monos.size(); ++i)
        for (size_t j = 0; j < qexps.size(); ++j)
          if (!v[i * qexps.size() + j].is_zero()) { ++c; break; }
      return c;
    };
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return monomial_count(basis[a]) < monomial_count(basis[b]);
    });

    std::optional<Index> last_counterexample;
    for (size_t idx : order) {
      const std::vector<K>& v = basis[idx];
      Operator<K> op(r, OpVariant::WrPlus, f.field());
      const int k = f.field().power_split;
      for (size_t i = 0; i < monos.size(); ++i) {
        Poly<K> c;
        for (size_t j = 0; j < qexps.size(); ++j) {
          const K& x = v[i * qexps.size() + j];
          if (!x.is_zero()) c = c + Poly<K>::monomial(x, k * qexps[j]);
        }
        if (!c.is_zero()) op.add_term(monos[i], RatFunc<K>(std::move(c), k));
      }
      if (op.is_zero()) continue;
      auto bad = verify_candidate(op);
      if (!bad) {
        GuessResult<K> res;
        res.op = std::move(op);
        res.fit_window = fit;
        res.verify_window = verify;
        res.basis_dim = static_cast<int>(basis.size());
        out.status = GuessStatus::Found;
        out.result = std::move(res);
        return out;
      }
      last_counterexample = bad;
    }

    if (consumed >= points.size()) {
      out.counterexample = last_counterexample;
      if (rows.size() < cols) {
        out.status = GuessStatus::Underdetermined;
        out.message = "underdetermined, enlarge window (rows " +
                      std::to_string(rows.size()) + " < unknowns " +
                      std::to_string(cols) + ")";
      } else {
        out.status = GuessStatus::None;
        out.message = "all nullspace candidates failed holdout verification";
      }
      return out;
    }
    target = std::max(target * 2, rows.size() + cols);
  }
}

/// Search restricted to powers of the prescribed multiplicity tuple
/// (alpha_1..alpha_r, beta_1..beta_r), whose support must have size exactly
/// r+1. Exponent of each supported variable runs over multiples of its
/// tuple entry.
template <class K>
GuessOutcome<K> guess_with_multiplicities(const Sequence<K>& f,
                                          const std::vector<int>& eta,
                                          int shift_bound, int m_bound, int q_bound,
                                          const Window& fit, const Window& verify) {
  const int r = f.arity();
  if (static_cast<int>(eta.size()) != 2 * r)
    throw std::invalid_argument("guess_with_multiplicities: tuple length must be 2r");
  std::vector<Symbol> members;
  std::vector<int> mult;
  for (int i = 0; i < 2 * r; ++i) {
    if (eta[static_cast<size_t>(i)] == 0) continue;
    if (eta[static_cast<size_t>(i)] < 0)
      throw std::invalid_argument("guess_with_multiplicities: negative tuple entry");
    members.push_back(i < r ? Symbol{false, i} : Symbol{true, i - r});
    mult.push_back(eta[static_cast<size_t>(i)]);
  }
  if (static_cast<int>(members.size()) != r + 1)
    throw std::invalid_argument(
        "guess_with_multiplicities: support size must be exactly r+1");
  Ansatz a;
  a.subset = VariableSubset(std::move(members), std::move(mult));
  a.shift_bound = shift_bound;
  a.m_bound = m_bound;
  a.q_bound = q_bound;
  return guess_annihilator(f, a, fit, verify);
}

enum class DivisibleMode { MExponents, MAndQExponents };

/// Ansatz restricted so M-exponents (and, in the alpha mode, coefficient
/// q-exponents) are multiples of the parameter. m_bound counts multiples:
/// M-exponents range over {0, p, ..., m_bound * p}. Parameter 1 reduces to
/// plain guessing.
template <class K>
GuessOutcome<K> guess_divisible(const Sequence<K>& f, const VariableSubset& subset,
                                int p_or_k, DivisibleMode mode, int shift_bound,
                                int m_bound, int q_bound, const Window& fit,
                                const Window& verify) {
  if (p_or_k < 1) throw std::invalid_argument("guess_divisible: parameter must be >= 1");
  Ansatz a;
  a.subset = subset;
  a.shift_bound = shift_bound;
  a.m_bound = m_bound * p_or_k;
  a.q_bound = q_bound;
  a.divisible_m = p_or_k;
  if (mode == DivisibleMode::MAndQExponents) a.divisible_q = p_or_k;
  return guess_annihilator(f, a, fit, verify);
}

// ---------------------------------------------------------------------------
// Classical guessing
// ---------------------------------------------------------------------------

template <class K>
struct ClassicalGuessResult {
  ClassicalOperator<K> op;
  Window fit_window, verify_window;
  int basis_dim = 0;
  bool degenerate = false;
};

template <class K>
struct ClassicalGuessOutcome {
  GuessStatus status = GuessStatus::None;
  std::optional<ClassicalGuessResult<K>> result;
  std::optional<Index> counterexample;
  std::string message;

  bool found() const { return status == GuessStatus::Found; }
};

/// All nullspace solutions of the classical system (used to inspect the
/// full solution set, e.g. for locating a known recurrence among them).
template <class K>
struct ClassicalSystem {
  std::vector<std::vector<int>> l_exps;          // per column group
  std::vector<std::vector<int>> m_exps;          // per column within group
  std::vector<std::vector<K>> nullspace;
};

namespace detail {

inline void enumerate_m_exps(int r, const std::vector<int>& m_vars, int budget,
                             std::vector<int>& cur, size_t pos,
                             std::vector<std::vector<int>>& out) {
  if (pos == m_vars.size()) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= budget; ++e) {
    cur[static_cast<size_t>(m_vars[pos])] = e;
    enumerate_m_exps(r, m_vars, budget - e, cur, pos + 1, out);
  }
  cur[static_cast<size_t>(m_vars[pos])] = 0;
}

}  // namespace detail

/// Ansatz sum of p_alpha(m) l^alpha over the subset's l-variables with
/// m-polynomial coefficients (total degree bound) in the subset's
/// m-variables; one scalar equation per window index.
template <class K>
ClassicalGuessOutcome<K> guess_classical(const ScalarSequence<K>& g,
                                         const VariableSubset& subset,
                                         int shift_bound, int m_degree_bound,
                                         const Window& fit, const Window& verify,
                                         ClassicalSystem<K>* system_out = nullptr) {
  ClassicalGuessOutcome<K> out;
  if (!fit.disjoint_from(verify))
    throw std::invalid_argument("guess_classical: fit and verify windows overlap");
  const int r = g.arity();

  std::vector<int> l_vars, m_vars;
  for (const Symbol& s : subset.members)
    (s.is_m ? m_vars : l_vars).push_back(s.index);

  // l-exponent vectors over the allowed shifts, descending canonical order
  std::vector<std::vector<int>> l_choices;
  {
    std::vector<int> cur(static_cast<size_t>(r), 0);
    std::function<void(size_t)> rec = [&](size_t pos) {
      if (pos == l_vars.size()) {
        l_choices.push_back(cur);
        return;
      }
      for (int e = 0; e <= shift_bound; ++e) {
        cur[static_cast<size_t>(l_vars[pos])] = e;
        rec(pos + 1);
      }
      cur[static_cast<size_t>(l_vars[pos])] = 0;
    };
    rec(0);
    std::sort(l_choices.begin(), l_choices.end(), ExpVecDesc{});
  }
  std::vector<std::vector<int>> m_choices;
  {
    std::vector<int> cur(static_cast<size_t>(r), 0);
    detail::enumerate_m_exps(r, m_vars, m_degree_bound, cur, 0, m_choices);
    std::sort(m_choices.begin(), m_choices.end(), ExpVecDesc{});
  }

  const size_t cols = l_choices.size() * m_choices.size();

  if (g.is_zero_on(fit)) {
    ClassicalGuessResult<K> res;
    ClassicalOperator<K> unit(r);
    unit.add_term(std::vector<int>(static_cast<size_t>(r), 0), MPoly<K>(r, K(1)));
    res.op = std::move(unit);
    res.fit_window = fit;
    res.verify_window = verify;
    res.degenerate = true;
    out.status = GuessStatus::Degenerate;
    out.result = std::move(res);
    out.message = "sequence vanishes on the fit window; unit annihilator is degenerate";
    return out;
  }

  std::vector<std::vector<K>> rows;
  for (const Index& n : detail::ordered_points(fit)) {
    std::vector<K> row(cols, K(0));
    bool nonzero = false;
    for (size_t a = 0; a < l_choices.size(); ++a) {
      Index shifted = n;
      for (size_t i = 0; i < shifted.size(); ++i) shifted[i] += l_choices[a][i];
      K val = g.at(shifted);
      if (val.is_zero()) continue;
      for (size_t b = 0; b < m_choices.size(); ++b) {
        K factor = val;
        for (int j = 0; j < r; ++j)
          for (int rep = 0; rep < m_choices[b][static_cast<size_t>(j)]; ++rep)
            factor = factor * K(static_cast<long>(n[static_cast<size_t>(j)]));
        if (!factor.is_zero()) {
          row[a * m_choices.size() + b] = std::move(factor);
          nonzero = true;
        }
      }
    }
    if (nonzero) rows.push_back(std::move(row));
  }

  auto basis = detail::solve_rows(rows, cols);
  if (system_out) {
    system_out->l_exps = l_choices;
    system_out->m_exps = m_choices;
    system_out->nullspace = basis;
  }
  if (basis.empty()) {
    out.status = GuessStatus::None;
    out.message = "trivial nullspace for subset " + subset.str();
    return out;
  }

  auto l_count = [&](const std::vector<K>& v) {
    size_t c = 0;
    for (size_t a = 0; a < l_choices.size(); ++a)
      for (size_t b = 0; b < m_choices.size(); ++b)
        if (!v[a * m_choices.size() + b].is_zero()) { ++c; break; }
    return c;
  };
  std::vector<size_t> order(basis.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return l_count(basis[x]) < l_count(basis[y]);
  });

  std::optional<Index> last_bad;
  for (size_t idx : order) {
    const auto& v = basis[idx];
    ClassicalOperator<K> op(r);
    for (size_t a = 0; a < l_choices.size(); ++a) {
      MPoly<K> poly(r);
      for (size_t b = 0; b < m_choices.size(); ++b) {
        const K& x = v[a * m_choices.size() + b];
        if (!x.is_zero()) poly.add_term(m_choices[b], x);
      }
      if (!poly.is_zero()) op.add_term(l_choices[a], std::move(poly));
    }
    if (op.is_zero()) continue;
    ScalarSequence<K> acted = apply_classical(op, g);
    std::optional<Index> bad;
    for (const Index& n : fit.points())
      if (!acted.at(n).is_zero()) { bad = n; break; }
    if (!bad)
      for (const Index& n : verify.points())
        if (!acted.at(n).is_zero()) { bad = n; break; }
    if (!bad) {
      ClassicalGuessResult<K> res;
      res.op = std::move(op);
      res.fit_window = fit;
      res.verify_window = verify;
      res.basis_dim = static_cast<int>(basis.size());
      out.status = GuessStatus::Found;
      out.result = std::move(res);
      return out;
    }
    last_bad = bad;
  }
  out.status = rows.size() < cols ? GuessStatus::Underdetermined : GuessStatus::None;
  out.counterexample = last_bad;
  out.message = "all nullspace candidates failed holdout verification";
  return out;
}

}  // namespace qholo
