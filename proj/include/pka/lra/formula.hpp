#pragma once

#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pka/lang/interp.hpp"
#include "pka/lang/program.hpp"
#include "pka/lra/cube.hpp"

namespace pka::lra {

/// A transition formula in disjunctive normal form over x (before) and x' (after).
/// No cubes means false; a single empty cube means true.
struct TransFormula {
  std::vector<Cube> cubes;

  static TransFormula falsum() { return {}; }
  static TransFormula verum() { return {{Cube{}}}; }
  static TransFormula of(Cube c) {
    if (c.bottom) return {};
    return {{std::move(c)}};
  }
  bool is_false() const { return cubes.empty(); }
};

inline std::string render_eq(const Poly& p, const std::vector<std::string>& names) {
  Poly q = p;
  q.make_primitive();
  SymOrder ord = SymOrder::standard();
  auto lead = ord.leading(q);
  if (lead && q.coeff(*lead) < 0) q = -q;
  if (lead && lead->degree() == 1 && q.coeff(*lead) == 1) {
    Poly rest = q;
    rest.add_term(*lead, -1);
    return sym_name(lead->a, names) + " = " + render_poly(-rest, names);
  }
  return render_poly(q, names) + " = 0";
}

inline std::string render_ge(const Poly& p, const std::vector<std::string>& names) {
  SymOrder ord = SymOrder::standard();
  auto lead = ord.leading(p);
  if (lead && lead->degree() == 1 && (p.coeff(*lead) == 1 || p.coeff(*lead) == -1)) {
    Poly rest = p;
    Rational c = p.coeff(*lead);
    rest.add_term(*lead, -c);
    if (c == 1) return sym_name(lead->a, names) + " >= " + render_poly(-rest, names);
    return sym_name(lead->a, names) + " <= " + render_poly(rest, names);
  }
  return render_poly(p, names) + " >= 0";
}

inline std::string render_cube(const Cube& c, const std::vector<std::string>& names) {
  if (c.bottom) return "false";
  if (c.is_top()) return "true";
  std::vector<std::string> parts;
  for (const Poly& e : c.eqs) parts.push_back(render_eq(e, names));
  for (const Poly& g : c.ges) parts.push_back(render_ge(g, names));
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " /\\ " : "") + parts[i];
  return out;
}

inline std::string render_formula(const TransFormula& f, const std::vector<std::string>& names) {
  if (f.cubes.empty()) return "false";
  std::string out;
  for (std::size_t i = 0; i < f.cubes.size(); ++i) {
    std::string c = render_cube(f.cubes[i], names);
    if (f.cubes.size() > 1) c = "(" + c + ")";
    out += (i ? " \\/ " : "") + c;
  }
  return out;
}

/// Polynomial of an expression over pre-state symbols; nothing for division or degree above two.
inline std::optional<Poly> exp_poly(const ExpPtr& e, const std::function<Sym(VarId)>& sym = pre) {
  switch (e->kind) {
    case Exp::Kind::Int:
      return Poly::constant(Rational(static_cast<long>(e->value)));
    case Exp::Kind::Var:
      return Poly::symbol(sym(e->var));
    case Exp::Kind::Bin: {
      auto l = exp_poly(e->lhs, sym);
      auto r = exp_poly(e->rhs, sym);
      if (!l || !r) return std::nullopt;
      switch (e->op) {
        case BinOp::Add: return *l + *r;
        case BinOp::Sub: return *l - *r;
        case BinOp::Mul: return l->times(*r);
        case BinOp::Div: return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

/// Observer for entailment queries, used to export them as SMT-LIB scripts.
using EntailmentObserver = std::function<void(const TransFormula& lhs, const TransFormula& rhs, bool verdict)>;

inline std::string smt2_entailment(const TransFormula& lhs, const TransFormula& rhs, bool verdict,
                                   const std::vector<std::string>& names) {
  std::set<Sym> syms;
  for (const auto* f : {&lhs, &rhs})
    for (const Cube& c : f->cubes) {
      auto s = c.symbols();
      syms.insert(s.begin(), s.end());
    }
  auto sname = [&](Sym s) {
    std::string n = names.at(var_of(s));
    switch (role(s)) {
      case Role::Pre: return n;
      case Role::Post: return n + "_post";
      case Role::Mid: return n + "_mid";
      case Role::Aux: return "k" + std::to_string(var_of(s));
    }
    return n;
  };
  auto term = [&](const Poly& p) {
    std::string out = "(+ 0";
    for (const auto& [m, c] : p.terms()) {
      std::string coeff = c.get_den() == 1 ? c.get_num().get_str() : "(/ " + c.get_num().get_str() + " " + c.get_den().get_str() + ")";
      if (c < 0) {
        Rational a = -c;
        coeff = a.get_den() == 1 ? "(- " + a.get_num().get_str() + ")" : "(- (/ " + a.get_num().get_str() + " " + a.get_den().get_str() + "))";
      }
      if (m.degree() == 0) out += " " + coeff;
      else if (m.degree() == 1) out += " (* " + coeff + " " + sname(m.a) + ")";
      else out += " (* " + coeff + " " + sname(m.a) + " " + sname(m.b) + ")";
    }
    return out + ")";
  };
  auto formula = [&](const TransFormula& f) {
    if (f.cubes.empty()) return std::string("false");
    std::string out = "(or";
    for (const Cube& c : f.cubes) {
      out += " (and true";
      for (const Poly& e : c.eqs) out += " (= " + term(e) + " 0)";
      for (const Poly& g : c.ges) out += " (>= " + term(g) + " 0)";
      out += ")";
    }
    return out + ")";
  };
  std::ostringstream os;
  os << "; expected: " << (verdict ? "unsat" : "unknown (entailment not established)") << "\n";
  os << "(set-logic QF_NIA)\n";
  for (Sym s : syms) os << "(declare-const " << sname(s) << " Int)\n";
  os << "(assert " << formula(lhs) << ")\n";
  os << "(assert (not " << formula(rhs) << "))\n";
  os << "(check-sat)\n";
  return os.str();
}

/// Does the pair of environments satisfy the formula?
inline bool eval_formula(const TransFormula& f, const Env& before, const Env& after) {
  auto val = [&](Sym s) -> Rational {
    switch (role(s)) {
      case Role::Pre: return Rational(static_cast<long>(before.at(var_of(s))));
      case Role::Post: return Rational(static_cast<long>(after.at(var_of(s))));
      default: throw Error("formula mentions an intermediate symbol");
    }
  };
  for (const Cube& c : f.cubes) {
    bool ok = true;
    for (const Poly& e : c.eqs)
      if (e.evaluate(val) != 0) {
        ok = false;
        break;
      }
    if (!ok) continue;
    for (const Poly& g : c.ges)
      if (g.evaluate(val) < 0) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

}  // namespace pka::lra
