#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pka/lang/program.hpp"

namespace pka {

struct PathExpr;
using PathPtr = std::shared_ptr<const PathExpr>;

/// Regular expressions over edge ids. Nodes are immutable and may be shared.
struct PathExpr {
  enum class Kind { Empty, Eps, Edge, Plus, Times, Star } kind;
  EdgeId edge = 0;
  PathPtr l, r;
  std::size_t size = 1;
};

namespace regex {

inline PathPtr make(PathExpr::Kind k, PathPtr l = nullptr, PathPtr r = nullptr, EdgeId e = 0) {
  auto n = std::make_shared<PathExpr>();
  n->kind = k;
  n->edge = e;
  n->size = 1 + (l ? l->size : 0) + (r ? r->size : 0);
  n->l = std::move(l);
  n->r = std::move(r);
  return n;
}

inline PathPtr empty() {
  static const PathPtr z = make(PathExpr::Kind::Empty);
  return z;
}
inline PathPtr eps() {
  static const PathPtr e = make(PathExpr::Kind::Eps);
  return e;
}
inline PathPtr edge(EdgeId id) { return make(PathExpr::Kind::Edge, nullptr, nullptr, id); }

inline bool structurally_equal(const PathPtr& a, const PathPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->size != b->size) return false;
  switch (a->kind) {
    case PathExpr::Kind::Empty:
    case PathExpr::Kind::Eps:
      return true;
    case PathExpr::Kind::Edge:
      return a->edge == b->edge;
    case PathExpr::Kind::Star:
      return structurally_equal(a->l, b->l);
    default:
      return structurally_equal(a->l, b->l) && structurally_equal(a->r, b->r);
  }
}

// Smart constructors apply the simplification rules locally.
inline PathPtr plus(PathPtr a, PathPtr b) {
  if (a->kind == PathExpr::Kind::Empty) return b;
  if (b->kind == PathExpr::Kind::Empty) return a;
  if (structurally_equal(a, b)) return a;
  return make(PathExpr::Kind::Plus, std::move(a), std::move(b));
}
inline PathPtr times(PathPtr a, PathPtr b) {
  if (a->kind == PathExpr::Kind::Empty || b->kind == PathExpr::Kind::Empty) return empty();
  if (a->kind == PathExpr::Kind::Eps) return b;
  if (b->kind == PathExpr::Kind::Eps) return a;
  return make(PathExpr::Kind::Times, std::move(a), std::move(b));
}
inline PathPtr star(PathPtr a) {
  if (a->kind == PathExpr::Kind::Empty || a->kind == PathExpr::Kind::Eps) return eps();
  if (a->kind == PathExpr::Kind::Star) return a;
  return make(PathExpr::Kind::Star, std::move(a));
}

/// Bottom-up rebuild through the smart constructors.
inline PathPtr simplify(const PathPtr& p) {
  switch (p->kind) {
    case PathExpr::Kind::Plus:
      return plus(simplify(p->l), simplify(p->r));
    case PathExpr::Kind::Times:
      return times(simplify(p->l), simplify(p->r));
    case PathExpr::Kind::Star:
      return star(simplify(p->l));
    default:
      return p;
  }
}

inline std::string render(const PathPtr& p) {
  switch (p->kind) {
    case PathExpr::Kind::Empty: return "0";
    case PathExpr::Kind::Eps: return "e";
    case PathExpr::Kind::Edge: return "<" + std::to_string(p->edge) + ">";
    case PathExpr::Kind::Plus: return "(" + render(p->l) + "+" + render(p->r) + ")";
    case PathExpr::Kind::Times: return "(" + render(p->l) + "." + render(p->r) + ")";
    case PathExpr::Kind::Star: return render(p->l) + "*";
  }
  return "?";
}

using Word = std::vector<EdgeId>;

/// All words of the language with length at most `max_len`.
inline std::set<Word> enumerate_words(const PathPtr& p, std::size_t max_len) {
  std::set<Word> out;
  switch (p->kind) {
    case PathExpr::Kind::Empty:
      break;
    case PathExpr::Kind::Eps:
      out.insert(Word{});
      break;
    case PathExpr::Kind::Edge:
      if (max_len >= 1) out.insert({p->edge});
      break;
    case PathExpr::Kind::Plus: {
      out = enumerate_words(p->l, max_len);
      auto r = enumerate_words(p->r, max_len);
      out.insert(r.begin(), r.end());
      break;
    }
    case PathExpr::Kind::Times: {
      auto l = enumerate_words(p->l, max_len);
      if (l.empty()) break;
      auto r = enumerate_words(p->r, max_len);
      for (const auto& a : l)
        for (const auto& b : r)
          if (a.size() + b.size() <= max_len) {
            Word w = a;
            w.insert(w.end(), b.begin(), b.end());
            out.insert(std::move(w));
          }
      break;
    }
    case PathExpr::Kind::Star: {
      auto base = enumerate_words(p->l, max_len);
      base.erase(Word{});
      out.insert(Word{});
      std::set<Word> frontier{Word{}};
      while (!frontier.empty()) {
        std::set<Word> next;
        for (const auto& a : frontier)
          for (const auto& b : base)
            if (a.size() + b.size() <= max_len) {
              Word w = a;
              w.insert(w.end(), b.begin(), b.end());
              if (out.insert(w).second) next.insert(std::move(w));
            }
        frontier = std::move(next);
      }
      break;
    }
  }
  return out;
}

namespace detail {
inline std::set<std::size_t> ends(const PathPtr& p, const Word& w, std::size_t i) {
  switch (p->kind) {
    case PathExpr::Kind::Empty:
      return {};
    case PathExpr::Kind::Eps:
      return {i};
    case PathExpr::Kind::Edge:
      if (i < w.size() && w[i] == p->edge) return {i + 1};
      return {};
    case PathExpr::Kind::Plus: {
      auto a = ends(p->l, w, i);
      auto b = ends(p->r, w, i);
      a.insert(b.begin(), b.end());
      return a;
    }
    case PathExpr::Kind::Times: {
      std::set<std::size_t> out;
      for (std::size_t j : ends(p->l, w, i)) {
        auto b = ends(p->r, w, j);
        out.insert(b.begin(), b.end());
      }
      return out;
    }
    case PathExpr::Kind::Star: {
      std::set<std::size_t> out{i};
      std::vector<std::size_t> work{i};
      while (!work.empty()) {
        std::size_t j = work.back();
        work.pop_back();
        for (std::size_t k : ends(p->l, w, j))
          if (out.insert(k).second) work.push_back(k);
      }
      return out;
    }
  }
  return {};
}
}  // namespace detail

inline bool recognizes(const PathPtr& p, const Word& w) { return detail::ends(p, w, 0).count(w.size()) > 0; }

}  // namespace regex
}  // namespace pka
