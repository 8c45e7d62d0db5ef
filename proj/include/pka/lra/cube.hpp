#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pka/lra/poly.hpp"

namespace pka::lra {

struct LraOptions {
  std::size_t max_cubes = 16;
  std::size_t fm_budget = 512;
  // Inequalities are tested for implied equalities only while there are at most this many.
  std::size_t implied_eq_limit = 12;
};

/// A conjunction of polynomial equalities (p = 0) and inequalities (p >= 0)
/// over integer-valued symbols.
struct Cube {
  std::vector<Poly> eqs;
  std::vector<Poly> ges;
  bool bottom = false;

  static Cube falsum() {
    Cube c;
    c.bottom = true;
    return c;
  }
  bool is_top() const { return !bottom && eqs.empty() && ges.empty(); }
  bool mentions(Sym s) const {
    for (const auto& p : eqs)
      if (p.mentions(s)) return true;
    for (const auto& p : ges)
      if (p.mentions(s)) return true;
    return false;
  }
  std::set<Sym> symbols() const {
    std::set<Sym> out;
    for (const auto& p : eqs) {
      auto s = p.symbols();
      out.insert(s.begin(), s.end());
    }
    for (const auto& p : ges) {
      auto s = p.symbols();
      out.insert(s.begin(), s.end());
    }
    return out;
  }
  bool operator==(const Cube& o) const { return bottom == o.bottom && eqs == o.eqs && ges == o.ges; }
};

namespace detail {

inline Rational floor_q(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

enum class GeState { Ok, Trivial, False };

/// Primitive integer coefficients with the constant rounded down.
inline GeState normalize_ge(Poly& p) {
  if (p.is_constant()) return p.constant_term() >= 0 ? GeState::Trivial : GeState::False;
  p.make_primitive();
  Rational c = p.constant_term();
  Rational f = floor_q(c);
  if (f != c) p.add_term(Monomial::constant(), f - c);
  return GeState::Ok;
}

/// The non-constant part of a polynomial.
inline Poly linear_part(const Poly& p) {
  Poly r = p;
  r.add_term(Monomial::constant(), -p.constant_term());
  return r;
}

/// Keeps the tightest inequality per linear part; reports a contradiction.
inline bool dedupe_ges(std::vector<Poly>& ges) {
  std::map<Poly, Rational> best;
  for (auto& p : ges) {
    Rational c = p.constant_term();
    Poly lin = linear_part(p);
    auto it = best.find(lin);
    if (it == best.end() || c < it->second) best[lin] = c;
  }
  ges.clear();
  for (auto& [lin, c] : best) {
    Poly p = lin;
    p.add_term(Monomial::constant(), c);
    ges.push_back(std::move(p));
  }
  return true;
}

struct Row {
  Poly poly;  // lead coefficient 1
  Monomial lead;
};

/// Reduced row echelon form; nothing if the system is inconsistent.
inline std::optional<std::vector<Row>> gauss(const std::vector<Poly>& input, const SymOrder& ord) {
  std::vector<Row> rows;
  for (const Poly& in : input) {
    Poly p = in;
    for (const Row& r : rows) {
      Rational c = p.coeff(r.lead);
      if (c != 0) p.add(r.poly, -c);
    }
    if (p.is_zero()) continue;
    if (p.is_constant()) return std::nullopt;
    Monomial lead = *ord.leading(p);
    p = p.scaled(1 / p.coeff(lead));
    for (Row& r : rows) {
      Rational c = r.poly.coeff(lead);
      if (c != 0) r.poly.add(p, -c);
    }
    rows.push_back({std::move(p), lead});
  }
  return rows;
}

/// s = rhs when a row reads s + (terms of degree <= 1) = 0.
inline std::optional<std::pair<Sym, Poly>> linear_definition(const Row& r) {
  if (r.lead.degree() != 1) return std::nullopt;
  Poly rhs = r.poly;
  rhs.add_term(r.lead, -1);
  if (rhs.degree() > 1) return std::nullopt;
  return std::make_pair(r.lead.a, -rhs);
}

/// Rewrites products containing a linearly defined symbol. Returns true on change.
inline bool rewrite_products(Poly& p, const std::vector<Row>& rows) {
  bool any = false;
  for (int guard = 0; guard < 64; ++guard) {
    bool changed = false;
    for (const Row& r : rows) {
      auto def = linear_definition(r);
      if (!def || !p.mentions_in_product(def->first)) continue;
      // substitute only inside products: split off the linear occurrence
      Rational lin = p.coeff(Monomial::of(def->first));
      Poly q = p;
      q.add_term(Monomial::of(def->first), -lin);
      auto sub = q.substitute(def->first, def->second);
      if (!sub) continue;
      sub->add_term(Monomial::of(def->first), lin);
      p = std::move(*sub);
      changed = any = true;
    }
    if (!changed) break;
  }
  return any;
}

inline void reduce_by_rows(Poly& p, const std::vector<Row>& rows) {
  for (const Row& r : rows) {
    Rational c = p.coeff(r.lead);
    if (c != 0) p.add(r.poly, -c);
  }
}

/// Normal form of `p` modulo the equalities `rows`.
inline Poly normal_form(Poly p, const std::vector<Row>& rows) {
  for (int i = 0; i < 8; ++i) {
    bool changed = rewrite_products(p, rows);
    Poly before = p;
    reduce_by_rows(p, rows);
    if (!changed && p == before) break;
  }
  return p;
}

/// Fourier-Motzkin over inequalities p >= 0.
class FourierMotzkin {
 public:
  FourierMotzkin(std::vector<Poly> ges, std::size_t budget) : budget_(budget) {
    for (auto& p : ges) add(std::move(p));
  }

  bool infeasible() const { return infeasible_; }
  bool exhausted() const { return exhausted_; }

  void eliminate(const Monomial& m) {
    if (infeasible_) return;
    std::vector<Poly> pos, neg, keep;
    for (auto& [lin, c] : set_) {
      Poly p = lin;
      p.add_term(Monomial::constant(), c);
      Rational a = p.coeff(m);
      if (a > 0) pos.push_back(std::move(p));
      else if (a < 0) neg.push_back(std::move(p));
      else keep.push_back(std::move(p));
    }
    if (pos.empty() && neg.empty()) return;
    set_.clear();
    for (auto& p : keep) add(std::move(p));
    if (pos.size() * neg.size() + set_.size() > budget_) {
      exhausted_ = true;  // dropping the constraints only weakens the system
      return;
    }
    for (const auto& p : pos)
      for (const auto& n : neg) {
        Rational a = p.coeff(m), b = -n.coeff(m);
        Poly comb = p.scaled(b);
        comb.add(n, a);
        add(std::move(comb));
        if (infeasible_) return;
      }
  }

  /// Eliminates every monomial for which `pick` holds, cheapest first.
  template <class Pred>
  void eliminate_all(Pred pick) {
    for (;;) {
      if (infeasible_) return;
      std::map<Monomial, std::pair<std::size_t, std::size_t>> counts;
      for (auto& [lin, c] : set_)
        for (const auto& [m, a] : lin.terms())
          if (pick(m)) (a > 0 ? counts[m].first : counts[m].second)++;
      if (counts.empty()) return;
      auto best = counts.begin();
      for (auto it = counts.begin(); it != counts.end(); ++it) {
        auto cost = [](const auto& pc) {
          return static_cast<long long>(pc.first * pc.second) - static_cast<long long>(pc.first + pc.second);
        };
        if (cost(it->second) < cost(best->second)) best = it;
      }
      eliminate(best->first);
    }
  }

  std::vector<Poly> constraints() const {
    std::vector<Poly> out;
    for (auto& [lin, c] : set_) {
      Poly p = lin;
      p.add_term(Monomial::constant(), c);
      out.push_back(std::move(p));
    }
    return out;
  }

 private:
  std::map<Poly, Rational> set_;  // linear part -> tightest constant
  std::size_t budget_;
  bool infeasible_ = false;
  bool exhausted_ = false;

  void add(Poly p) {
    GeState s = normalize_ge(p);
    if (s == GeState::Trivial) return;
    if (s == GeState::False) {
      infeasible_ = true;
      return;
    }
    Rational c = p.constant_term();
    Poly lin = linear_part(p);
    // an opposite inequality with a smaller sum of constants is a contradiction
    auto opp = set_.find(-lin);
    if (opp != set_.end() && opp->second + c < 0) {
      infeasible_ = true;
      return;
    }
    auto it = set_.find(lin);
    if (it == set_.end()) set_.emplace(std::move(lin), c);
    else if (c < it->second) it->second = c;
  }
};

inline bool fm_infeasible(const std::vector<Poly>& ges, std::size_t budget) {
  FourierMotzkin fm(ges, budget);
  fm.eliminate_all([](const Monomial&) { return true; });
  return fm.infeasible();
}

}  // namespace detail

/// Rewrites `c` into its normal form under `ord`: reduced equalities, products
/// over defined symbols expanded, inequalities reduced and tightened, and
/// contradictions detected.
inline void canonicalize(Cube& c, const LraOptions& opts, const SymOrder& ord = SymOrder::standard(),
                         bool check_feasible = true) {
  using namespace detail;
  if (c.bottom) {
    c.eqs.clear();
    c.ges.clear();
    return;
  }
  auto fail = [&] {
    c = Cube::falsum();
  };
  bool tested_implied = false;
  for (int iter = 0; iter < 64; ++iter) {
    auto rows = gauss(c.eqs, ord);
    if (!rows) return fail();
    bool changed = false;
    for (std::size_t i = 0; i < rows->size(); ++i) {
      std::vector<Row> others;
      for (std::size_t j = 0; j < rows->size(); ++j)
        if (j != i) others.push_back((*rows)[j]);
      Poly p = (*rows)[i].poly;
      if (rewrite_products(p, others)) {
        (*rows)[i].poly = p;
        changed = true;
      }
    }
    c.eqs.clear();
    for (auto& r : *rows) c.eqs.push_back(r.poly);
    if (changed) continue;

    std::vector<Poly> ges;
    for (Poly p : c.ges) {
      p = normal_form(std::move(p), *rows);
      GeState s = normalize_ge(p);
      if (s == GeState::False) return fail();
      if (s == GeState::Ok) ges.push_back(std::move(p));
    }
    dedupe_ges(ges);
    // opposite pairs
    std::vector<char> used(ges.size(), 0);
    std::vector<Poly> new_eqs;
    for (std::size_t i = 0; i < ges.size(); ++i) {
      if (used[i]) continue;
      Poly neg = -linear_part(ges[i]);
      for (std::size_t j = i + 1; j < ges.size(); ++j) {
        if (used[j] || linear_part(ges[j]) != neg) continue;
        Rational sum = ges[i].constant_term() + ges[j].constant_term();
        if (sum < 0) return fail();
        if (sum == 0) {
          used[i] = used[j] = 1;
          new_eqs.push_back(ges[i]);
        }
      }
    }
    c.ges.clear();
    for (std::size_t i = 0; i < ges.size(); ++i)
      if (!used[i]) c.ges.push_back(ges[i]);
    if (!new_eqs.empty()) {
      for (auto& e : new_eqs) c.eqs.push_back(e);
      continue;
    }
    // integer solvability of each equality
    for (const Poly& e : c.eqs) {
      Poly q = e;
      q.make_primitive();
      if (q.constant_term().get_den() != 1) return fail();
    }
    if (check_feasible && !c.ges.empty()) {
      if (fm_infeasible(c.ges, opts.fm_budget)) return fail();
      if (!tested_implied && c.ges.size() <= opts.implied_eq_limit && c.ges.size() >= 2) {
        tested_implied = true;
        bool found = false;
        for (std::size_t i = 0; i < c.ges.size(); ++i) {
          std::vector<Poly> sys = c.ges;
          Poly strict = c.ges[i];
          strict.add_term(Monomial::constant(), -1);
          sys.push_back(strict);
          if (fm_infeasible(sys, opts.fm_budget)) {
            c.eqs.push_back(c.ges[i]);
            found = true;
          }
        }
        if (found) {
          std::vector<Poly> rest;
          for (const Poly& g : c.ges) {
            bool is_eq = false;
            for (const Poly& e : c.eqs)
              if (e == g) is_eq = true;
            if (!is_eq) rest.push_back(g);
          }
          c.ges = rest;
          continue;
        }
      }
    }
    break;
  }
  std::sort(c.eqs.begin(), c.eqs.end());
  std::sort(c.ges.begin(), c.ges.end());
}

inline std::vector<detail::Row> rows_of(const Cube& c, const SymOrder& ord = SymOrder::standard()) {
  std::vector<detail::Row> rows;
  for (const Poly& p : c.eqs) {
    auto lead = ord.leading(p);
    if (!lead) continue;
    rows.push_back({p.scaled(1 / p.coeff(*lead)), *lead});
  }
  return rows;
}

/// c |= p >= 0, for a canonical cube.
inline bool entails_ge(const Cube& c, const Poly& target, const LraOptions& opts) {
  using namespace detail;
  if (c.bottom) return true;
  Poly p = normal_form(target, rows_of(c));
  GeState s = normalize_ge(p);
  if (s == GeState::Trivial) return true;
  if (s == GeState::False && c.ges.empty()) return false;
  if (s == GeState::Ok) {
    Poly lin = linear_part(p);
    for (const Poly& g : c.ges)
      if (linear_part(g) == lin && g.constant_term() <= p.constant_term()) return true;
  }
  std::vector<Poly> sys = c.ges;
  Poly neg = -p;
  neg.add_term(Monomial::constant(), -1);
  sys.push_back(neg);
  return fm_infeasible(sys, opts.fm_budget);
}

/// c |= p = 0, for a canonical cube.
inline bool entails_eq(const Cube& c, const Poly& target, const LraOptions& opts) {
  if (c.bottom) return true;
  Poly p = detail::normal_form(target, rows_of(c));
  if (p.is_zero()) return true;
  if (p.is_constant()) return false;
  return entails_ge(c, p, opts) && entails_ge(c, -p, opts);
}

inline bool entails_cube(const Cube& c, const Cube& d, const LraOptions& opts) {
  if (c.bottom) return true;
  if (d.bottom) return false;
  for (const Poly& e : d.eqs)
    if (!entails_eq(c, e, opts)) return false;
  for (const Poly& g : d.ges)
    if (!entails_ge(c, g, opts)) return false;
  return true;
}

inline Cube conjoin(const Cube& a, const Cube& b, const LraOptions& opts) {
  if (a.bottom || b.bottom) return Cube::falsum();
  Cube c = a;
  c.eqs.insert(c.eqs.end(), b.eqs.begin(), b.eqs.end());
  c.ges.insert(c.ges.end(), b.ges.begin(), b.ges.end());
  canonicalize(c, opts);
  return c;
}

/// Projects the symbols in `xs` out of `c`. Exact for symbols with a linear
/// definition and for linear occurrences in inequalities (up to the FM
/// budget); constraints where a symbol survives inside a product are dropped.
inline Cube eliminate(Cube c, const std::set<Sym>& xs, const LraOptions& opts) {
  using namespace detail;
  if (c.bottom || xs.empty()) return c;
  bool relevant = false;
  for (Sym s : xs)
    if (c.mentions(s)) relevant = true;
  if (!relevant) return c;
  SymOrder ord = SymOrder::eliminating(xs);
  canonicalize(c, opts, ord, false);
  if (c.bottom) return c;
  auto mentions_x = [&](const Poly& p) {
    for (Sym s : xs)
      if (p.mentions(s)) return true;
    return false;
  };
  auto rows = rows_of(c, ord);
  std::vector<Poly> eqs;
  for (const auto& r : rows) {
    if (r.lead.degree() == 1 && xs.count(r.lead.a)) continue;  // defining row of an eliminated symbol
    if (mentions_x(r.poly)) continue;
    eqs.push_back(r.poly);
  }
  std::vector<Poly> ges;
  for (const Poly& g : c.ges) {
    bool in_product = false;
    for (Sym s : xs)
      if (g.mentions_in_product(s)) in_product = true;
    if (!in_product) ges.push_back(g);
  }
  FourierMotzkin fm(ges, opts.fm_budget);
  fm.eliminate_all([&](const Monomial& m) { return m.degree() == 1 && xs.count(m.a); });
  Cube out;
  if (fm.infeasible()) return Cube::falsum();
  out.eqs = std::move(eqs);
  for (Poly& g : fm.constraints())
    if (!mentions_x(g)) out.ges.push_back(std::move(g));
  canonicalize(out, opts);
  return out;
}

// ---------------------------------------------------------------------------
// Joins
// ---------------------------------------------------------------------------

namespace detail {

/// Basis of the null space of a dense rational matrix (rows x cols).
inline std::vector<std::vector<Rational>> null_space(std::vector<std::vector<Rational>> m, std::size_t cols) {
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < m.size(); ++col) {
    std::size_t sel = r;
    while (sel < m.size() && m[sel][col] == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[sel], m[r]);
    Rational inv = 1 / m[r][col];
    for (auto& v : m[r]) v *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][col] == 0) continue;
      Rational f = m[i][col];
      for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_col.push_back(col);
    ++r;
  }
  std::vector<char> is_pivot(cols, 0);
  for (auto pc : pivot_col) is_pivot[pc] = 1;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -m[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace detail

/// Equalities of the affine hull of the union of the solution sets of two
/// equality systems (products are treated as independent coordinates).
inline std::vector<Poly> affine_join(const std::vector<Poly>& e1, const std::vector<Poly>& e2) {
  using namespace detail;
  SymOrder ord = SymOrder::standard();
  auto r1 = gauss(e1, ord);
  auto r2 = gauss(e2, ord);
  if (!r1) return e2;
  if (!r2) return e1;
  std::vector<Monomial> dims;
  {
    std::set<Monomial> s;
    for (const auto* rs : {&*r1, &*r2})
      for (const Row& r : *rs)
        for (const auto& [m, c] : r.poly.terms())
          if (m.degree() > 0) s.insert(m);
    dims.assign(s.begin(), s.end());
  }
  if (dims.empty()) return {};
  std::map<Monomial, std::size_t> idx;
  for (std::size_t i = 0; i < dims.size(); ++i) idx[dims[i]] = i;
  const std::size_t n = dims.size();
  std::vector<std::vector<Rational>> gens;  // homogeneous: last coordinate 1 for points, 0 for directions
  for (const auto* rs : {&*r1, &*r2}) {
    std::set<Monomial> leads;
    for (const Row& r : *rs) leads.insert(r.lead);
    std::vector<Rational> point(n + 1, 0);
    point[n] = 1;
    for (const Row& r : *rs) point[idx.at(r.lead)] = -r.poly.constant_term();
    gens.push_back(point);
    for (std::size_t f = 0; f < n; ++f) {
      if (leads.count(dims[f])) continue;
      std::vector<Rational> dir(n + 1, 0);
      dir[f] = 1;
      for (const Row& r : *rs) dir[idx.at(r.lead)] = -r.poly.coeff(dims[f]);
      gens.push_back(std::move(dir));
    }
  }
  auto eqs = null_space(gens, n + 1);
  std::vector<Poly> out;
  for (const auto& v : eqs) {
    Poly p;
    for (std::size_t i = 0; i < n; ++i) p.add_term(dims[i], v[i]);
    p.add_term(Monomial::constant(), v[n]);
    if (!p.is_zero()) out.push_back(std::move(p));
  }
  return out;
}

/// Inequalities of `c`, with each equality split into two.
inline std::vector<Poly> inequality_view(const Cube& c) {
  std::vector<Poly> out = c.ges;
  for (const Poly& e : c.eqs) {
    out.push_back(e);
    out.push_back(-e);
  }
  return out;
}

/// A single cube above both arguments: the affine hull together with every
/// inequality of one side entailed by the other.
inline Cube hull(const Cube& a, const Cube& b, const LraOptions& opts) {
  if (a.bottom) return b;
  if (b.bottom) return a;
  Cube out;
  out.eqs = affine_join(a.eqs, b.eqs);
  for (const Poly& g : inequality_view(a))
    if (entails_ge(b, g, opts)) out.ges.push_back(g);
  for (const Poly& g : inequality_view(b))
    if (entails_ge(a, g, opts)) out.ges.push_back(g);
  canonicalize(out, opts);
  return out;
}

inline Cube hull_all(const std::vector<Cube>& cubes, const LraOptions& opts) {
  Cube acc = Cube::falsum();
  for (const Cube& c : cubes) acc = hull(acc, c, opts);
  return acc;
}

}  // namespace pka::lra
