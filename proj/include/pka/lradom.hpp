#pragma once

#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "pka/lang/cond.hpp"
#include "pka/lang/program.hpp"
#include "pka/lra/cube.hpp"
#include "pka/lra/formula.hpp"
#include "pka/lra/ops.hpp"
#include "pka/lra/star.hpp"

namespace pka {

enum class Widening { Trivial, Drop };

/// Transition formulas of linear (and degree-two) integer arithmetic.
class LraDomain {
 public:
  using value_type = lra::TransFormula;
  using F = lra::TransFormula;

  struct Config {
    lra::LraOptions opts;
    Widening widening = Widening::Trivial;
    lra::StarMode star = lra::StarMode::Guarded;
    lra::EntailmentObserver observer;
  };

  explicit LraDomain(std::vector<std::string> names) : names_(std::move(names)) {}
  LraDomain(std::vector<std::string> names, Config cfg) : names_(std::move(names)), cfg_(std::move(cfg)) {}

  std::size_t num_vars() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const Config& config() const { return cfg_; }
  Config& config() { return cfg_; }

  F zero() const { return F::falsum(); }
  F one() const { return F::of(lra::identity_cube(num_vars())); }
  F verum() const { return F::verum(); }

  F plus(const F& a, const F& b) const { return lra::disjoin(a, b, cfg_.opts); }
  F times(const F& a, const F& b) const { return lra::compose(a, b, num_vars(), cfg_.opts); }
  F star(const F& a) const { return lra::lra_star(a, num_vars(), cfg_.star, cfg_.opts); }
  F exists(VarId x, const F& a) const {
    if (x >= num_vars()) throw Error("exists: variable out of range");
    return lra::exists_var(x, a, cfg_.opts);
  }

  F widen(const F& a, const F& b) const {
    if (cfg_.widening == Widening::Trivial) return equal(a, b) ? a : verum();
    return drop_widen(a, b);
  }

  /// a |= b
  bool entails(const F& a, const F& b) const {
    bool v = lra::entails(a, b, cfg_.opts);
    if (cfg_.observer) cfg_.observer(a, b, v);
    return v;
  }
  bool equal(const F& a, const F& b) const { return entails(a, b) && entails(b, a); }

  std::string render(const F& a) const { return lra::render_formula(a, names_); }

  F action(const Action& act) const {
    using namespace lra;
    Cube c;
    auto frame = [&](std::optional<VarId> except) {
      for (VarId y = 0; y < num_vars(); ++y)
        if (!except || *except != y) c.eqs.push_back(Poly::symbol(post(y)) - Poly::symbol(pre(y)));
    };
    if (auto* a = std::get_if<Assign>(&act)) {
      frame(a->var);
      // division and higher degrees leave the target unconstrained
      if (auto p = exp_poly(a->rhs)) c.eqs.push_back(Poly::symbol(post(a->var)) - *p);
    } else if (auto* g = std::get_if<Assume>(&act)) {
      frame(std::nullopt);
      auto l = exp_poly(g->guard.lhs), r = exp_poly(g->guard.rhs);
      if (l && r) c.ges.push_back(*l - *r);
    } else if (auto* h = std::get_if<Havoc>(&act)) {
      frame(h->var);
    } else {
      throw Error("call edges have no intraprocedural semantics");
    }
    canonicalize(c, cfg_.opts);
    return F::of(std::move(c));
  }

  /// The condition as a formula over post-state symbols.
  F assertion(const BExpPtr& b) const {
    using namespace lra;
    std::vector<Cube> cubes;
    for (const auto& conj : guard_dnf(b)) {
      Cube c;
      bool exact = true;
      for (const Guard& g : conj) {
        auto l = exp_poly(g.lhs, post), r = exp_poly(g.rhs, post);
        if (l && r) c.ges.push_back(*l - *r);
        else exact = false;
      }
      // an untranslatable conjunct makes the assertion unprovable, not vacuous
      if (!exact) continue;
      canonicalize(c, cfg_.opts);
      cubes.push_back(std::move(c));
    }
    return normalize(std::move(cubes), cfg_.opts);
  }

  /// Parses `x' = x + 1 /\ y >= 0 \/ false` style formulas over this domain's variables.
  F parse(const std::string& text) const;

 private:
  std::vector<std::string> names_;
  Config cfg_;

  F drop_widen(const F& a, const F& b) const {
    using namespace lra;
    if (a.is_false()) return b.is_false() ? b : F::of(hull_all(b.cubes, cfg_.opts));
    Cube h = hull_all(a.cubes, cfg_.opts);
    Cube out;
    out.eqs = h.eqs;
    for (const Cube& c : b.cubes) out.eqs = affine_join(out.eqs, c.eqs);
    for (const Poly& g : inequality_view(h)) {
      bool kept = true;
      for (const Cube& c : b.cubes)
        if (!entails_ge(c, g, cfg_.opts)) {
          kept = false;
          break;
        }
      if (kept) out.ges.push_back(g);
    }
    canonicalize(out, cfg_.opts);
    return F::of(std::move(out));
  }
};

namespace lra::detail {

class FormulaParser {
 public:
  FormulaParser(const std::string& s, const std::vector<std::string>& names, const LraOptions& opts)
      : s_(s), names_(names), opts_(opts) {}

  TransFormula parse() {
    auto d = disj();
    skip();
    if (i_ != s_.size()) fail("trailing input");
    std::vector<Cube> cubes;
    for (auto& c : d) {
      canonicalize(c, opts_);
      cubes.push_back(std::move(c));
    }
    return normalize(std::move(cubes), opts_);
  }

 private:
  const std::string& s_;
  const std::vector<std::string>& names_;
  const LraOptions& opts_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& m) const {
    throw Error("formula: " + m + " at offset " + std::to_string(i_));
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(const std::string& t) {
    skip();
    if (s_.compare(i_, t.size(), t) == 0) {
      i_ += t.size();
      return true;
    }
    return false;
  }
  bool at_word(const std::string& w) {
    skip();
    if (s_.compare(i_, w.size(), w) != 0) return false;
    std::size_t j = i_ + w.size();
    return j >= s_.size() || !(std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_');
  }

  using Dnf = std::vector<Cube>;

  Dnf disj() {
    Dnf out = conj();
    while (eat("\\/")) {
      Dnf r = conj();
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }
  Dnf conj() {
    Dnf out = atom();
    while (eat("/\\")) {
      Dnf r = atom();
      Dnf prod;
      for (const Cube& a : out)
        for (const Cube& b : r) {
          Cube c = a;
          c.eqs.insert(c.eqs.end(), b.eqs.begin(), b.eqs.end());
          c.ges.insert(c.ges.end(), b.ges.begin(), b.ges.end());
          prod.push_back(std::move(c));
        }
      out = std::move(prod);
    }
    return out;
  }
  Dnf atom() {
    if (at_word("true")) {
      i_ += 4;
      return {Cube{}};
    }
    if (at_word("false")) {
      i_ += 5;
      return {};
    }
    skip();
    if (i_ < s_.size() && s_[i_] == '(') {
      // a parenthesised formula, unless it is the start of a term
      std::size_t save = i_;
      ++i_;
      try {
        Dnf d = disj();
        if (eat(")")) {
          skip();
          if (i_ >= s_.size() || s_[i_] == '/' || s_[i_] == '\\' || s_[i_] == ')') return d;
        }
      } catch (const Error&) {
      }
      i_ = save;
    }
    Poly l = sum();
    std::string op;
    for (const char* o : {"<=", ">=", "=", "<", ">"})
      if (eat(o)) {
        op = o;
        break;
      }
    if (op.empty()) fail("expected comparison");
    Poly r = sum();
    Cube c;
    if (op == "=") c.eqs.push_back(l - r);
    else if (op == ">=") c.ges.push_back(l - r);
    else if (op == "<=") c.ges.push_back(r - l);
    else if (op == ">") c.ges.push_back(l - r - Poly::constant(1));
    else c.ges.push_back(r - l - Poly::constant(1));
    return {c};
  }
  Poly sum() {
    Poly p = product();
    for (;;) {
      if (eat("+")) p += product();
      else if (peek_minus()) {
        ++i_;
        p -= product();
      } else {
        return p;
      }
    }
  }
  bool peek_minus() {
    skip();
    return i_ < s_.size() && s_[i_] == '-';
  }
  Poly product() {
    Poly p = factor();
    while (eat("*")) {
      auto q = p.times(factor());
      if (!q) fail("degree above two");
      p = *q;
    }
    return p;
  }
  Poly factor() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end");
    if (s_[i_] == '-') {
      ++i_;
      return -factor();
    }
    if (s_[i_] == '(') {
      ++i_;
      Poly p = sum();
      if (!eat(")")) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      std::size_t j = i_;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      Poly p = Poly::constant(Rational(s_.substr(i_, j - i_)));
      i_ = j;
      return p;
    }
    std::size_t j = i_;
    while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
    if (j == i_) fail("unexpected character");
    std::string name = s_.substr(i_, j - i_);
    i_ = j;
    int primes = 0;
    while (i_ < s_.size() && s_[i_] == '\'') {
      ++primes;
      ++i_;
    }
    for (VarId x = 0; x < names_.size(); ++x)
      if (names_[x] == name) {
        if (primes == 0) return Poly::symbol(pre(x));
        if (primes == 1) return Poly::symbol(post(x));
        fail("too many primes");
      }
    fail("unknown variable '" + name + "'");
  }
};

}  // namespace lra::detail

inline lra::TransFormula LraDomain::parse(const std::string& text) const {
  return lra::detail::FormulaParser(text, names_, cfg_.opts).parse();
}

}  // namespace pka
