#pragma once

#include <sstream>
#include <string>

#include "pka/lang/program.hpp"

namespace pka {

namespace detail {
inline int exp_prec(const Exp& e) {
  if (e.kind != Exp::Kind::Bin) return 3;
  return (e.op == BinOp::Add || e.op == BinOp::Sub) ? 1 : 2;
}
}  // namespace detail

inline std::string render_exp(const Program& prog, const ExpPtr& e) {
  switch (e->kind) {
    case Exp::Kind::Int:
      return std::to_string(e->value);
    case Exp::Kind::Var:
      return prog.var_names.at(e->var);
    case Exp::Kind::Bin: {
      int p = detail::exp_prec(*e);
      std::string l = render_exp(prog, e->lhs);
      std::string r = render_exp(prog, e->rhs);
      if (detail::exp_prec(*e->lhs) < p) l = "(" + l + ")";
      // right operand of - and / needs parens at equal precedence
      if (detail::exp_prec(*e->rhs) < p ||
          (detail::exp_prec(*e->rhs) == p && (e->op == BinOp::Sub || e->op == BinOp::Div)))
        r = "(" + r + ")";
      const char* op = e->op == BinOp::Add ? " + " : e->op == BinOp::Sub ? " - " : e->op == BinOp::Mul ? " * " : " / ";
      return l + op + r;
    }
  }
  return "?";
}

inline std::string render_guard(const Program& prog, const Guard& g) {
  return render_exp(prog, g.lhs) + " >= " + render_exp(prog, g.rhs);
}

inline std::string render_bexp(const Program& prog, const BExpPtr& b) {
  switch (b->kind) {
    case BExp::Kind::Cmp: {
      static const char* ops[] = {" < ", " <= ", " > ", " >= ", " == ", " != "};
      return render_exp(prog, b->l) + ops[static_cast<int>(b->cmp)] + render_exp(prog, b->r);
    }
    case BExp::Kind::And:
      return "(" + render_bexp(prog, b->a) + " && " + render_bexp(prog, b->b) + ")";
    case BExp::Kind::Or:
      return "(" + render_bexp(prog, b->a) + " || " + render_bexp(prog, b->b) + ")";
    case BExp::Kind::Not:
      return "!" + render_bexp(prog, b->a);
  }
  return "?";
}

inline std::string render_action(const Program& prog, const Action& a) {
  struct V {
    const Program& p;
    std::string operator()(const Assign& x) const { return p.var_names.at(x.var) + " := " + render_exp(p, x.rhs); }
    std::string operator()(const Assume& x) const { return "[" + render_guard(p, x.guard) + "]"; }
    std::string operator()(const Havoc& x) const { return "havoc " + p.var_names.at(x.var); }
    std::string operator()(const Call& x) const { return "call " + p.procedures.at(x.callee).name; }
  };
  return std::visit(V{prog}, a);
}

/// One line per edge, grouped by procedure.
inline std::string render_program(const Program& prog) {
  std::ostringstream os;
  for (const Procedure& p : prog.procedures) {
    os << "proc " << p.name << " entry=v" << p.graph.entry << " exit=v" << p.graph.exit;
    if (!p.locals.empty()) {
      os << " locals=";
      for (std::size_t i = 0; i < p.locals.size(); ++i) os << (i ? "," : "") << prog.var_names[p.locals[i]];
    }
    os << "\n";
    for (EdgeId id : p.graph.edges) {
      const Edge& e = prog.edge(id);
      os << "  e" << e.id << ": v" << e.src << " -> v" << e.tgt << "  " << render_action(prog, e.action) << "\n";
    }
  }
  for (const Assertion& a : prog.assertions)
    os << "assert at v" << a.vertex << " (" << prog.procedures[a.proc].name << "): " << a.text << "\n";
  return os.str();
}

}  // namespace pka
