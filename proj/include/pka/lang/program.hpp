#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pka {

using VarId = std::size_t;
using VertexId = std::size_t;
using EdgeId = std::size_t;
using ProcId = std::size_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Arithmetic expressions
// ---------------------------------------------------------------------------

enum class BinOp { Add, Sub, Mul, Div };

struct Exp;
using ExpPtr = std::shared_ptr<const Exp>;

struct Exp {
  enum class Kind { Int, Var, Bin } kind;
  std::int64_t value = 0;
  VarId var = 0;
  BinOp op = BinOp::Add;
  ExpPtr lhs, rhs;

  static ExpPtr integer(std::int64_t v) {
    auto e = std::make_shared<Exp>();
    e->kind = Kind::Int;
    e->value = v;
    return e;
  }
  static ExpPtr variable(VarId x) {
    auto e = std::make_shared<Exp>();
    e->kind = Kind::Var;
    e->var = x;
    return e;
  }
  static ExpPtr binary(BinOp op, ExpPtr l, ExpPtr r) {
    auto e = std::make_shared<Exp>();
    e->kind = Kind::Bin;
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }
};

/// `lhs >= rhs`. Every comparison is desugared into one or more of these.
struct Guard {
  ExpPtr lhs;
  ExpPtr rhs;
};

inline Guard trivial_guard() { return {Exp::integer(0), Exp::integer(0)}; }

// ---------------------------------------------------------------------------
// Boolean expressions (kept as trees for assertions)
// ---------------------------------------------------------------------------

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

struct BExp;
using BExpPtr = std::shared_ptr<const BExp>;

struct BExp {
  enum class Kind { Cmp, And, Or, Not } kind;
  CmpOp cmp = CmpOp::Eq;
  ExpPtr l, r;
  BExpPtr a, b;

  static BExpPtr compare(CmpOp op, ExpPtr l, ExpPtr r) {
    auto e = std::make_shared<BExp>();
    e->kind = Kind::Cmp;
    e->cmp = op;
    e->l = std::move(l);
    e->r = std::move(r);
    return e;
  }
  static BExpPtr conj(BExpPtr x, BExpPtr y) {
    auto e = std::make_shared<BExp>();
    e->kind = Kind::And;
    e->a = std::move(x);
    e->b = std::move(y);
    return e;
  }
  static BExpPtr disj(BExpPtr x, BExpPtr y) {
    auto e = std::make_shared<BExp>();
    e->kind = Kind::Or;
    e->a = std::move(x);
    e->b = std::move(y);
    return e;
  }
  static BExpPtr negate(BExpPtr x) {
    auto e = std::make_shared<BExp>();
    e->kind = Kind::Not;
    e->a = std::move(x);
    return e;
  }
};

// ---------------------------------------------------------------------------
// Flow graphs
// ---------------------------------------------------------------------------

struct Assign {
  VarId var;
  ExpPtr rhs;
};
struct Assume {
  Guard guard;
};
struct Havoc {
  VarId var;
};
struct Call {
  ProcId callee;
};

using Action = std::variant<Assign, Assume, Havoc, Call>;

inline bool is_call(const Action& a) { return std::holds_alternative<Call>(a); }

struct Edge {
  EdgeId id = 0;
  VertexId src = 0;
  VertexId tgt = 0;
  Action action;
};

struct FlowGraph {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;  // ids into Program::edges
  VertexId entry = 0;
  VertexId exit = 0;
};

struct Procedure {
  std::string name;
  FlowGraph graph;
  std::vector<VarId> locals;
};

struct Assertion {
  ProcId proc = 0;
  VertexId vertex = 0;
  BExpPtr cond;
  std::string text;
};

/// Vertex and edge ids are dense and program-wide. Procedure 0 is main.
struct Program {
  std::vector<std::string> var_names;
  std::vector<VarId> globals;
  std::vector<Procedure> procedures;
  std::vector<Edge> edges;
  std::size_t num_vertices = 0;
  std::vector<Assertion> assertions;

  std::size_t num_vars() const { return var_names.size(); }
  const Edge& edge(EdgeId e) const { return edges.at(e); }

  std::optional<VarId> find_var(const std::string& name) const {
    for (VarId i = 0; i < var_names.size(); ++i)
      if (var_names[i] == name) return i;
    return std::nullopt;
  }
  std::optional<ProcId> find_proc(const std::string& name) const {
    for (ProcId i = 0; i < procedures.size(); ++i)
      if (procedures[i].name == name) return i;
    return std::nullopt;
  }

  ProcId proc_of_vertex(VertexId v) const {
    for (ProcId i = 0; i < procedures.size(); ++i)
      for (VertexId w : procedures[i].graph.vertices)
        if (w == v) return i;
    throw Error("vertex " + std::to_string(v) + " belongs to no procedure");
  }

  std::vector<EdgeId> out_edges(VertexId v) const {
    std::vector<EdgeId> out;
    for (const Edge& e : edges)
      if (e.src == v) out.push_back(e.id);
    return out;
  }

  bool is_local_of(ProcId p, VarId x) const {
    for (VarId y : procedures[p].locals)
      if (y == x) return true;
    return false;
  }
};

}  // namespace pka
