#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pka/lang/print.hpp"
#include "pka/lang/program.hpp"

namespace pka {

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : Error("line " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line(line), col(col) {}
  int line;
  int col;
};

namespace parse_detail {

struct Token {
  enum class T { Ident, Int, Sym, End } t;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
};

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      tok.t = Token::T::Ident;
      tok.text = src.substr(i, j - i);
      adv(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      tok.t = Token::T::Int;
      tok.text = src.substr(i, j - i);
      try {
        tok.value = std::stoll(tok.text);
      } catch (const std::exception&) {
        throw ParseError("integer literal out of range", line, col);
      }
      adv(j - i);
    } else {
      static const char* two[] = {":=", "<=", ">=", "==", "!=", "&&", "||"};
      tok.t = Token::T::Sym;
      bool matched = false;
      for (const char* s : two) {
        if (src.compare(i, 2, s) == 0) {
          tok.text = s;
          adv(2);
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string("(){};,+-*/<>!").find(c) == std::string::npos)
          throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        tok.text = std::string(1, c);
        adv(1);
      }
    }
    out.push_back(tok);
  }
  Token end;
  end.t = Token::T::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// Surface syntax, with variables still named.
struct SExp {
  enum class K { Int, Var, Bin, Neg } k;
  std::int64_t value = 0;
  std::string name;
  BinOp op = BinOp::Add;
  std::shared_ptr<SExp> l, r;
  int line = 0, col = 0;
};
using SExpP = std::shared_ptr<SExp>;

struct SBExp {
  enum class K { Cmp, And, Or, Not } k;
  CmpOp cmp = CmpOp::Eq;
  SExpP l, r;
  std::shared_ptr<SBExp> a, b;
};
using SBExpP = std::shared_ptr<SBExp>;

struct SStmt;
using SBlock = std::vector<std::shared_ptr<SStmt>>;

struct SStmt {
  enum class K { Assign, Havoc, Assume, Assert, Call, If, While } k;
  std::string name;  // assigned variable or callee
  SExpP rhs;
  SBExpP cond;
  SBlock then_block, else_block;
  std::string text;  // source text of an assertion condition
  int line = 0, col = 0;
};

struct SProc {
  std::string name;
  std::vector<std::string> locals;
  SBlock body;
  int line = 0, col = 0;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src), toks_(lex(src)) {}

  std::vector<SProc> program() {
    std::vector<SProc> procs;
    while (peek().t != Token::T::End) procs.push_back(proc());
    return procs;
  }

 private:
  const std::string& src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }
  bool is_sym(const std::string& s, std::size_t k = 0) const {
    return peek(k).t == Token::T::Sym && peek(k).text == s;
  }
  bool is_kw(const std::string& s) const { return peek().t == Token::T::Ident && peek().text == s; }
  void expect_sym(const std::string& s) {
    if (!is_sym(s)) fail("expected '" + s + "'");
    ++pos_;
  }
  void expect_kw(const std::string& s) {
    if (!is_kw(s)) fail("expected '" + s + "'");
    ++pos_;
  }
  std::string ident() {
    if (peek().t != Token::T::Ident) fail("expected identifier");
    static const std::set<std::string> reserved = {"proc", "local", "if", "else", "while", "call", "havoc", "assume", "assert"};
    if (reserved.count(peek().text)) fail("unexpected keyword '" + peek().text + "'");
    return toks_[pos_++].text;
  }

  SProc proc() {
    SProc p;
    p.line = peek().line;
    p.col = peek().col;
    expect_kw("proc");
    p.name = ident();
    expect_sym("(");
    expect_sym(")");
    if (is_kw("local")) {
      ++pos_;
      p.locals.push_back(ident());
      while (is_sym(",")) {
        ++pos_;
        p.locals.push_back(ident());
      }
    }
    p.body = block();
    return p;
  }

  SBlock block() {
    expect_sym("{");
    SBlock b;
    while (!is_sym("}")) {
      if (peek().t == Token::T::End) fail("unexpected end of input");
      b.push_back(stmt());
    }
    ++pos_;
    return b;
  }

  std::shared_ptr<SStmt> stmt() {
    auto s = std::make_shared<SStmt>();
    s->line = peek().line;
    s->col = peek().col;
    if (is_kw("if")) {
      ++pos_;
      s->k = SStmt::K::If;
      expect_sym("(");
      s->cond = bexp();
      expect_sym(")");
      s->then_block = block();
      if (is_kw("else")) {
        ++pos_;
        s->else_block = block();
      }
      return s;
    }
    if (is_kw("while")) {
      ++pos_;
      s->k = SStmt::K::While;
      expect_sym("(");
      s->cond = bexp();
      expect_sym(")");
      s->then_block = block();
      return s;
    }
    if (is_kw("call")) {
      ++pos_;
      s->k = SStmt::K::Call;
      s->name = ident();
    } else if (is_kw("havoc")) {
      ++pos_;
      s->k = SStmt::K::Havoc;
      s->name = ident();
    } else if (is_kw("assume") || is_kw("assert")) {
      s->k = is_kw("assume") ? SStmt::K::Assume : SStmt::K::Assert;
      ++pos_;
      expect_sym("(");
      std::size_t begin = offset_of(peek());
      s->cond = bexp();
      std::size_t end = offset_of(peek());
      s->text = trim(src_.substr(begin, end - begin));
      expect_sym(")");
    } else {
      s->k = SStmt::K::Assign;
      s->name = ident();
      expect_sym(":=");
      s->rhs = exp();
    }
    expect_sym(";");
    return s;
  }

  std::size_t offset_of(const Token& t) const {
    std::size_t off = 0;
    int line = 1;
    while (line < t.line && off < src_.size()) {
      if (src_[off] == '\n') ++line;
      ++off;
    }
    return std::min(off + static_cast<std::size_t>(t.col - 1), src_.size());
  }
  static std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  }

  SBExpP bexp() {
    SBExpP l = bconj();
    while (is_sym("||")) {
      ++pos_;
      auto n = std::make_shared<SBExp>();
      n->k = SBExp::K::Or;
      n->a = l;
      n->b = bconj();
      l = n;
    }
    return l;
  }
  SBExpP bconj() {
    SBExpP l = bunary();
    while (is_sym("&&")) {
      ++pos_;
      auto n = std::make_shared<SBExp>();
      n->k = SBExp::K::And;
      n->a = l;
      n->b = bunary();
      l = n;
    }
    return l;
  }
  SBExpP bunary() {
    if (is_sym("!")) {
      ++pos_;
      auto n = std::make_shared<SBExp>();
      n->k = SBExp::K::Not;
      n->a = bunary();
      return n;
    }
    if (is_sym("(")) {
      // Either a parenthesised boolean or the start of an arithmetic operand.
      std::size_t save = pos_;
      try {
        ++pos_;
        SBExpP inner = bexp();
        expect_sym(")");
        static const std::set<std::string> arith = {"+", "-", "*", "/", "<", "<=", ">", ">=", "==", "!="};
        if (peek().t == Token::T::Sym && arith.count(peek().text)) throw ParseError("", 0, 0);
        return inner;
      } catch (const ParseError&) {
        pos_ = save;
      }
    }
    return comparison();
  }
  SBExpP comparison() {
    auto n = std::make_shared<SBExp>();
    n->k = SBExp::K::Cmp;
    n->l = exp();
    static const std::map<std::string, CmpOp> ops = {{"<", CmpOp::Lt},  {"<=", CmpOp::Le}, {">", CmpOp::Gt},
                                                     {">=", CmpOp::Ge}, {"==", CmpOp::Eq}, {"!=", CmpOp::Ne}};
    if (peek().t != Token::T::Sym || !ops.count(peek().text)) fail("expected comparison operator");
    n->cmp = ops.at(toks_[pos_++].text);
    n->r = exp();
    return n;
  }

  SExpP exp() {
    SExpP l = term();
    while (is_sym("+") || is_sym("-")) {
      auto n = std::make_shared<SExp>();
      n->k = SExp::K::Bin;
      n->op = is_sym("+") ? BinOp::Add : BinOp::Sub;
      ++pos_;
      n->l = l;
      n->r = term();
      l = n;
    }
    return l;
  }
  SExpP term() {
    SExpP l = factor();
    while (is_sym("*") || is_sym("/")) {
      auto n = std::make_shared<SExp>();
      n->k = SExp::K::Bin;
      n->op = is_sym("*") ? BinOp::Mul : BinOp::Div;
      ++pos_;
      n->l = l;
      n->r = factor();
      l = n;
    }
    return l;
  }
  SExpP factor() {
    auto n = std::make_shared<SExp>();
    n->line = peek().line;
    n->col = peek().col;
    if (is_sym("(")) {
      ++pos_;
      SExpP inner = exp();
      expect_sym(")");
      return inner;
    }
    if (is_sym("-")) {
      ++pos_;
      n->k = SExp::K::Neg;
      n->l = factor();
      return n;
    }
    if (peek().t == Token::T::Int) {
      n->k = SExp::K::Int;
      n->value = toks_[pos_++].value;
      return n;
    }
    n->k = SExp::K::Var;
    n->name = ident();
    return n;
  }
};

/// Builds flow graphs from the surface syntax.
class Compiler {
 public:
  Compiler(Program& prog, const std::map<std::string, VarId>& vars, const std::map<std::string, ProcId>& procs)
      : prog_(prog), vars_(vars), procs_(procs) {}

  void compile_proc(ProcId pid, const SProc& sp) {
    pid_ = pid;
    Procedure& p = prog_.procedures[pid];
    for (const auto& l : sp.locals) p.locals.push_back(vars_.at(l));
    own_.clear();
    for (const auto& l : sp.locals) own_.insert(l);
    p.graph.entry = fresh();
    VertexId end = compile_block(sp.body, p.graph.entry, std::nullopt);
    p.graph.exit = end;
  }

  // Names declared local somewhere; used to reject cross-procedure local references.
  std::set<std::string> all_locals;

 private:
  Program& prog_;
  const std::map<std::string, VarId>& vars_;
  const std::map<std::string, ProcId>& procs_;
  ProcId pid_ = 0;
  std::set<std::string> own_;

  VertexId fresh() {
    VertexId v = prog_.num_vertices++;
    prog_.procedures[pid_].graph.vertices.push_back(v);
    return v;
  }
  void emit(VertexId s, VertexId t, Action a) {
    Edge e;
    e.id = prog_.edges.size();
    e.src = s;
    e.tgt = t;
    e.action = std::move(a);
    prog_.edges.push_back(e);
    prog_.procedures[pid_].graph.edges.push_back(e.id);
  }
  VertexId target(std::optional<VertexId> to) { return to ? *to : fresh(); }

  VarId var(const std::string& name, int line, int col) {
    if (all_locals.count(name) && !own_.count(name))
      throw ParseError("undeclared variable '" + name + "' (local to another procedure)", line, col);
    return vars_.at(name);
  }

  ExpPtr lower(const SExpP& e) {
    switch (e->k) {
      case SExp::K::Int:
        return Exp::integer(e->value);
      case SExp::K::Var:
        return Exp::variable(var(e->name, e->line, e->col));
      case SExp::K::Neg:
        return Exp::binary(BinOp::Sub, Exp::integer(0), lower(e->l));
      case SExp::K::Bin:
        return Exp::binary(e->op, lower(e->l), lower(e->r));
    }
    return nullptr;
  }

  BExpPtr lower(const SBExpP& b) {
    switch (b->k) {
      case SBExp::K::Cmp:
        return BExp::compare(b->cmp, lower(b->l), lower(b->r));
      case SBExp::K::And:
        return BExp::conj(lower(b->a), lower(b->b));
      case SBExp::K::Or:
        return BExp::disj(lower(b->a), lower(b->b));
      case SBExp::K::Not:
        return BExp::negate(lower(b->a));
    }
    return nullptr;
  }

  VertexId compile_block(const SBlock& b, VertexId from, std::optional<VertexId> to) {
    if (b.empty()) {
      if (to && *to != from) emit(from, *to, Assume{trivial_guard()});
      return to ? *to : from;
    }
    VertexId cur = from;
    for (std::size_t i = 0; i < b.size(); ++i)
      cur = compile_stmt(*b[i], cur, i + 1 == b.size() ? to : std::nullopt);
    return cur;
  }

  VertexId compile_stmt(const SStmt& s, VertexId from, std::optional<VertexId> to) {
    switch (s.k) {
      case SStmt::K::Assign: {
        VarId x = var(s.name, s.line, s.col);
        ExpPtr rhs = lower(s.rhs);
        VertexId t = target(to);
        emit(from, t, Assign{x, rhs});
        return t;
      }
      case SStmt::K::Havoc: {
        VarId x = var(s.name, s.line, s.col);
        VertexId t = target(to);
        emit(from, t, Havoc{x});
        return t;
      }
      case SStmt::K::Call: {
        auto it = procs_.find(s.name);
        if (it == procs_.end()) throw ParseError("call to undeclared procedure '" + s.name + "'", s.line, s.col);
        VertexId t = target(to);
        emit(from, t, Call{it->second});
        return t;
      }
      case SStmt::K::Assume: {
        BExpPtr c = lower(s.cond);
        VertexId t = target(to);
        compile_cond(c, false, from, t);
        return t;
      }
      case SStmt::K::Assert: {
        Assertion a;
        a.proc = pid_;
        a.vertex = from;
        a.cond = lower(s.cond);
        a.text = s.text;
        prog_.assertions.push_back(a);
        VertexId t = target(to);
        emit(from, t, Assume{trivial_guard()});
        return t;
      }
      case SStmt::K::If: {
        BExpPtr c = lower(s.cond);
        VertexId join = target(to);
        branch(c, false, s.then_block, from, join);
        branch(c, true, s.else_block, from, join);
        return join;
      }
      case SStmt::K::While: {
        BExpPtr c = lower(s.cond);
        VertexId head = from;
        if (head == prog_.procedures[pid_].graph.entry) {
          // the entry may not have incoming edges
          head = fresh();
          emit(from, head, Assume{trivial_guard()});
        }
        if (s.then_block.empty()) {
          compile_cond(c, false, head, head);
        } else {
          VertexId body = fresh();
          compile_cond(c, false, head, body);
          compile_block(s.then_block, body, head);
        }
        VertexId out = target(to);
        compile_cond(c, true, head, out);
        return out;
      }
    }
    return from;
  }

  void branch(const BExpPtr& c, bool negated, const SBlock& body, VertexId from, VertexId join) {
    if (body.empty()) {
      compile_cond(c, negated, from, join);
      return;
    }
    VertexId start = fresh();
    compile_cond(c, negated, from, start);
    compile_block(body, start, join);
  }

  // Emits edges from `from` to `to` that are traversable exactly when `c` (or its negation) holds.
  void compile_cond(const BExpPtr& c, bool neg, VertexId from, VertexId to) {
    switch (c->kind) {
      case BExp::Kind::Not:
        compile_cond(c->a, !neg, from, to);
        return;
      case BExp::Kind::And:
      case BExp::Kind::Or: {
        bool conj = (c->kind == BExp::Kind::And) != neg;
        if (conj) {
          VertexId mid = fresh();
          compile_cond(c->a, neg, from, mid);
          compile_cond(c->b, neg, mid, to);
        } else {
          compile_cond(c->a, neg, from, to);
          compile_cond(c->b, neg, from, to);
        }
        return;
      }
      case BExp::Kind::Cmp:
        break;
    }
    CmpOp op = c->cmp;
    if (neg) {
      switch (op) {
        case CmpOp::Lt: op = CmpOp::Ge; break;
        case CmpOp::Le: op = CmpOp::Gt; break;
        case CmpOp::Gt: op = CmpOp::Le; break;
        case CmpOp::Ge: op = CmpOp::Lt; break;
        case CmpOp::Eq: op = CmpOp::Ne; break;
        case CmpOp::Ne: op = CmpOp::Eq; break;
      }
    }
    const ExpPtr& l = c->l;
    const ExpPtr& r = c->r;
    auto plus1 = [](const ExpPtr& e) { return Exp::binary(BinOp::Add, e, Exp::integer(1)); };
    switch (op) {
      case CmpOp::Lt: emit(from, to, Assume{{r, plus1(l)}}); break;
      case CmpOp::Le: emit(from, to, Assume{{r, l}}); break;
      case CmpOp::Gt: emit(from, to, Assume{{l, plus1(r)}}); break;
      case CmpOp::Ge: emit(from, to, Assume{{l, r}}); break;
      case CmpOp::Eq: {
        VertexId mid = fresh();
        emit(from, mid, Assume{{l, r}});
        emit(mid, to, Assume{{r, l}});
        break;
      }
      case CmpOp::Ne:
        emit(from, to, Assume{{l, plus1(r)}});
        emit(from, to, Assume{{r, plus1(l)}});
        break;
    }
  }
};

inline void collect_names(const SExpP& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->k == SExp::K::Var) out.push_back(e->name);
  collect_names(e->l, out);
  collect_names(e->r, out);
}
inline void collect_names(const SBExpP& b, std::vector<std::string>& out) {
  if (!b) return;
  collect_names(b->l, out);
  collect_names(b->r, out);
  collect_names(b->a, out);
  collect_names(b->b, out);
}
inline void collect_names(const SBlock& blk, std::vector<std::string>& out) {
  for (const auto& s : blk) {
    if (s->k == SStmt::K::Assign || s->k == SStmt::K::Havoc) out.push_back(s->name);
    collect_names(s->rhs, out);
    collect_names(s->cond, out);
    collect_names(s->then_block, out);
    collect_names(s->else_block, out);
  }
}

}  // namespace parse_detail

/// Parses program text into flow graphs. `main` becomes procedure 0.
/// Globals are all identifiers not declared local; they are numbered first.
inline Program parse_program(const std::string& text) {
  using namespace parse_detail;
  Parser parser(text);
  std::vector<SProc> procs = parser.program();

  std::map<std::string, ProcId> proc_ids;
  std::vector<const SProc*> order;
  for (const auto& p : procs) {
    if (proc_ids.count(p.name)) throw ParseError("duplicate procedure '" + p.name + "'", p.line, p.col);
    proc_ids[p.name] = 0;
  }
  if (!proc_ids.count("main")) throw ParseError("missing procedure 'main'", 1, 1);
  for (const auto& p : procs)
    if (p.name == "main") order.push_back(&p);
  for (const auto& p : procs)
    if (p.name != "main") order.push_back(&p);
  for (ProcId i = 0; i < order.size(); ++i) proc_ids[order[i]->name] = i;

  std::set<std::string> locals;
  std::vector<std::string> local_order;
  for (const SProc* p : order) {
    for (const auto& l : p->locals) {
      if (locals.count(l)) throw ParseError("local '" + l + "' declared twice", p->line, p->col);
      locals.insert(l);
      local_order.push_back(l);
    }
  }
  std::vector<std::string> global_order;
  std::set<std::string> seen;
  for (const SProc* p : order) {
    std::vector<std::string> names;
    collect_names(p->body, names);
    for (const auto& n : names)
      if (!locals.count(n) && !seen.count(n)) {
        seen.insert(n);
        global_order.push_back(n);
      }
  }

  Program prog;
  std::map<std::string, VarId> var_ids;
  for (const auto& g : global_order) {
    var_ids[g] = prog.var_names.size();
    prog.globals.push_back(prog.var_names.size());
    prog.var_names.push_back(g);
  }
  for (const auto& l : local_order) {
    var_ids[l] = prog.var_names.size();
    prog.var_names.push_back(l);
  }
  prog.procedures.resize(order.size());
  for (ProcId i = 0; i < order.size(); ++i) prog.procedures[i].name = order[i]->name;

  Compiler c(prog, var_ids, proc_ids);
  c.all_locals = locals;
  for (ProcId i = 0; i < order.size(); ++i) c.compile_proc(i, *order[i]);
  return prog;
}

}  // namespace pka
