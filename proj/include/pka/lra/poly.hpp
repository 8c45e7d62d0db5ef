#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pka/lang/program.hpp"

namespace pka::lra {

using Rational = mpq_class;
using Integer = mpz_class;

/// A symbol is a program variable in one of four roles, packed as var*4 + role.
using Sym = std::uint32_t;
enum class Role : std::uint32_t { Pre = 0, Post = 1, Mid = 2, Aux = 3 };

inline Sym pre(VarId x) { return static_cast<Sym>(x * 4 + 0); }
inline Sym post(VarId x) { return static_cast<Sym>(x * 4 + 1); }
inline Sym mid(VarId x) { return static_cast<Sym>(x * 4 + 2); }
inline Sym aux(std::size_t i) { return static_cast<Sym>(i * 4 + 3); }
inline Role role(Sym s) { return static_cast<Role>(s & 3u); }
inline VarId var_of(Sym s) { return s >> 2; }

inline constexpr Sym kNoSym = 0xFFFFFFFFu;

/// Product of at most two symbols; `a <= b` when both are present.
struct Monomial {
  Sym a = kNoSym;
  Sym b = kNoSym;

  static Monomial constant() { return {}; }
  static Monomial of(Sym s) { return {s, kNoSym}; }
  static Monomial of(Sym s, Sym t) { return s <= t ? Monomial{s, t} : Monomial{t, s}; }

  int degree() const { return a == kNoSym ? 0 : b == kNoSym ? 1 : 2; }
  bool contains(Sym s) const { return a == s || b == s; }
  bool operator<(const Monomial& o) const { return a != o.a ? a < o.a : b < o.b; }
  bool operator==(const Monomial& o) const { return a == o.a && b == o.b; }
};

/// Sparse polynomial with rational coefficients; the constant term is keyed by Monomial::constant().
class Poly {
 public:
  using Terms = std::map<Monomial, Rational>;

  Poly() = default;
  static Poly constant(const Rational& c) {
    Poly p;
    p.add_term(Monomial::constant(), c);
    return p;
  }
  static Poly symbol(Sym s, const Rational& c = 1) {
    Poly p;
    p.add_term(Monomial::of(s), c);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0); }
  Rational constant_term() const {
    auto it = terms_.find(Monomial::constant());
    return it == terms_.end() ? Rational(0) : it->second;
  }
  Rational coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }
  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  void add(const Poly& o, const Rational& scale = 1) {
    for (const auto& [m, c] : o.terms_) add_term(m, c * scale);
  }
  Poly& operator+=(const Poly& o) {
    add(o);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    add(o, -1);
    return *this;
  }
  Poly operator+(const Poly& o) const {
    Poly r = *this;
    r.add(o);
    return r;
  }
  Poly operator-(const Poly& o) const {
    Poly r = *this;
    r.add(o, -1);
    return r;
  }
  Poly operator-() const { return scaled(-1); }
  Poly scaled(const Rational& s) const {
    Poly r;
    if (s == 0) return r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
    return r;
  }

  /// Product, or nothing when the degree would exceed two.
  std::optional<Poly> times(const Poly& o) const {
    Poly r;
    for (const auto& [m1, c1] : terms_)
      for (const auto& [m2, c2] : o.terms_) {
        if (m1.degree() + m2.degree() > 2) return std::nullopt;
        Monomial m;
        if (m1.degree() == 0) m = m2;
        else if (m2.degree() == 0) m = m1;
        else m = Monomial::of(m1.a, m2.a);
        r.add_term(m, c1 * c2);
      }
    return r;
  }

  bool operator==(const Poly& o) const { return terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }
  bool operator<(const Poly& o) const { return terms_ < o.terms_; }

  bool mentions(Sym s) const {
    for (const auto& [m, c] : terms_)
      if (m.contains(s)) return true;
    return false;
  }
  bool mentions_in_product(Sym s) const {
    for (const auto& [m, c] : terms_)
      if (m.degree() == 2 && m.contains(s)) return true;
    return false;
  }
  std::set<Sym> symbols() const {
    std::set<Sym> out;
    for (const auto& [m, c] : terms_) {
      if (m.a != kNoSym) out.insert(m.a);
      if (m.b != kNoSym) out.insert(m.b);
    }
    return out;
  }

  /// Renames symbols through `f`.
  Poly rename(const std::function<Sym(Sym)>& f) const {
    Poly r;
    for (const auto& [m, c] : terms_) {
      Monomial n;
      if (m.degree() == 1) n = Monomial::of(f(m.a));
      else if (m.degree() == 2) n = Monomial::of(f(m.a), f(m.b));
      r.add_term(n, c);
    }
    return r;
  }

  /// Replaces symbol `s` by `by`; nothing when a product would exceed degree two.
  std::optional<Poly> substitute(Sym s, const Poly& by) const {
    Poly r;
    for (const auto& [m, c] : terms_) {
      if (!m.contains(s)) {
        r.add_term(m, c);
        continue;
      }
      std::optional<Poly> part;
      if (m.degree() == 1) {
        part = by;
      } else if (m.a == s && m.b == s) {
        part = by.times(by);
      } else {
        Sym other = m.a == s ? m.b : m.a;
        part = by.times(Poly::symbol(other));
      }
      if (!part) return std::nullopt;
      r.add(*part, c);
    }
    return r;
  }

  Rational evaluate(const std::function<Rational(Sym)>& val) const {
    Rational out = 0;
    for (const auto& [m, c] : terms_) {
      Rational t = c;
      if (m.a != kNoSym) t *= val(m.a);
      if (m.b != kNoSym) t *= val(m.b);
      out += t;
    }
    return out;
  }

  /// Scales to coprime integer coefficients on the non-constant part. The
  /// constant may remain fractional. Returns the positive factor applied.
  Rational make_primitive() {
    Integer den = 1, num = 0;
    for (const auto& [m, c] : terms_) {
      if (m.degree() == 0) continue;
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
    }
    for (const auto& [m, c] : terms_) {
      if (m.degree() == 0) continue;
      Integer n = c.get_num() * (den / c.get_den());
      mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), n.get_mpz_t());
    }
    if (num == 0) return 1;
    Rational f(den, num);
    f.canonicalize();
    for (auto& [m, c] : terms_) c *= f;
    return f;
  }

 private:
  Terms terms_;
};

/// Total order on symbols used to pick pivots: higher rank is eliminated first.
struct SymOrder {
  std::function<std::uint64_t(Sym)> rank;

  static std::uint64_t role_rank(Role r) {
    switch (r) {
      case Role::Pre: return 0;
      case Role::Post: return 1;
      case Role::Aux: return 2;
      case Role::Mid: return 3;
    }
    return 0;
  }
  static SymOrder standard() {
    return {[](Sym s) { return (role_rank(role(s)) << 32) | var_of(s); }};
  }
  /// Symbols in `top` outrank everything else.
  static SymOrder eliminating(const std::set<Sym>& top) {
    return {[top](Sym s) {
      std::uint64_t base = (role_rank(role(s)) << 32) | var_of(s);
      return top.count(s) ? base | (std::uint64_t{1} << 40) : base;
    }};
  }

  /// Linear monomials outrank products, which outrank the constant.
  bool less(const Monomial& x, const Monomial& y) const {
    int dx = x.degree() == 1 ? 2 : x.degree() == 2 ? 1 : 0;
    int dy = y.degree() == 1 ? 2 : y.degree() == 2 ? 1 : 0;
    if (dx != dy) return dx < dy;
    if (dx == 0) return false;
    if (dx == 2) return rank(x.a) < rank(y.a);
    auto hx = std::max(rank(x.a), rank(x.b)), lx = std::min(rank(x.a), rank(x.b));
    auto hy = std::max(rank(y.a), rank(y.b)), ly = std::min(rank(y.a), rank(y.b));
    return hx != hy ? hx < hy : lx < ly;
  }

  std::optional<Monomial> leading(const Poly& p) const {
    std::optional<Monomial> best;
    for (const auto& [m, c] : p.terms()) {
      if (m.degree() == 0) continue;
      if (!best || less(*best, m)) best = m;
    }
    return best;
  }
};

/// Names symbols for printing: x, x', x'' and k<i>.
inline std::string sym_name(Sym s, const std::vector<std::string>& names) {
  switch (role(s)) {
    case Role::Pre: return names.at(var_of(s));
    case Role::Post: return names.at(var_of(s)) + "'";
    case Role::Mid: return names.at(var_of(s)) + "''";
    case Role::Aux: return "k" + std::to_string(var_of(s));
  }
  return "?";
}

inline std::string render_rational(const Rational& r) { return r.get_str(); }

/// Renders `p` as a sum of terms in a stable order.
inline std::string render_poly(const Poly& p, const std::vector<std::string>& names, const SymOrder& ord = SymOrder::standard()) {
  std::vector<std::pair<Monomial, Rational>> terms(p.terms().begin(), p.terms().end());
  std::stable_sort(terms.begin(), terms.end(), [&](const auto& x, const auto& y) { return ord.less(y.first, x.first); });
  std::string out;
  for (const auto& [m, c] : terms) {
    Rational mag = abs(c);
    bool neg = c < 0;
    std::string body;
    if (m.degree() == 0) {
      body = render_rational(mag);
    } else {
      std::string mono = sym_name(m.a, names);
      if (m.degree() == 2) mono = m.a == m.b ? mono + "^2" : sym_name(m.a, names) + "*" + sym_name(m.b, names);
      if (m.degree() == 2 && m.a != m.b) {
        // put the higher-ranked factor first
        if (ord.rank(m.a) < ord.rank(m.b)) mono = sym_name(m.b, names) + "*" + sym_name(m.a, names);
      }
      body = mag == 1 ? mono : render_rational(mag) + "*" + mono;
    }
    if (out.empty()) out = neg ? "-" + body : body;
    else out += neg ? " - " + body : " + " + body;
  }
  return out.empty() ? "0" : out;
}

}  // namespace pka::lra
