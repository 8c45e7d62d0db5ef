#pragma once

#include <set>
#include <vector>

#include "pka/lra/cube.hpp"
#include "pka/lra/formula.hpp"

namespace pka::lra {

inline Cube identity_cube(std::size_t nvars) {
  Cube c;
  for (VarId x = 0; x < nvars; ++x) c.eqs.push_back(Poly::symbol(post(x)) - Poly::symbol(pre(x)));
  canonicalize(c, LraOptions{});
  return c;
}

inline std::set<Sym> all_of_role(std::size_t nvars, Role r) {
  std::set<Sym> out;
  for (VarId x = 0; x < nvars; ++x) out.insert(static_cast<Sym>(x * 4 + static_cast<Sym>(r)));
  return out;
}

/// Does some cube of `f` entail the cube `c`'s negation-free requirement, i.e. c |= f?
inline bool cube_entails_formula(const Cube& c, const TransFormula& f, const LraOptions& opts) {
  if (c.bottom) return true;
  for (const Cube& d : f.cubes)
    if (entails_cube(c, d, opts)) return true;
  return false;
}

inline bool entails(const TransFormula& a, const TransFormula& b, const LraOptions& opts) {
  for (const Cube& c : a.cubes)
    if (!cube_entails_formula(c, b, opts)) return false;
  return true;
}

inline bool equivalent(const TransFormula& a, const TransFormula& b, const LraOptions& opts) {
  return entails(a, b, opts) && entails(b, a, opts);
}

namespace detail {
inline std::size_t shared_constraints(const Cube& a, const Cube& b) {
  std::size_t n = 0;
  for (const Poly& p : a.eqs)
    for (const Poly& q : b.eqs)
      if (p == q) ++n;
  for (const Poly& p : a.ges)
    for (const Poly& q : b.ges)
      if (p == q) ++n;
  return n;
}
}  // namespace detail

/// Drops false and subsumed cubes, then merges cubes pairwise by hull while
/// there are more than `max_cubes`.
inline TransFormula normalize(std::vector<Cube> cubes, const LraOptions& opts) {
  std::vector<Cube> kept;
  for (Cube& c : cubes) {
    if (c.bottom) continue;
    bool subsumed = false;
    for (const Cube& k : kept)
      if (entails_cube(c, k, opts)) {
        subsumed = true;
        break;
      }
    if (subsumed) continue;
    std::vector<Cube> next;
    for (Cube& k : kept)
      if (!entails_cube(k, c, opts)) next.push_back(std::move(k));
    next.push_back(std::move(c));
    kept = std::move(next);
  }
  while (kept.size() > std::max<std::size_t>(1, opts.max_cubes)) {
    std::size_t bi = 0, bj = 1, best = 0;
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = i + 1; j < kept.size(); ++j) {
        std::size_t s = detail::shared_constraints(kept[i], kept[j]);
        if (s > best) {
          best = s;
          bi = i;
          bj = j;
        }
      }
    Cube h = hull(kept[bi], kept[bj], opts);
    kept.erase(kept.begin() + static_cast<long>(bj));
    kept[bi] = std::move(h);
  }
  return TransFormula{std::move(kept)};
}

inline TransFormula disjoin(const TransFormula& a, const TransFormula& b, const LraOptions& opts) {
  std::vector<Cube> all = a.cubes;
  all.insert(all.end(), b.cubes.begin(), b.cubes.end());
  return normalize(std::move(all), opts);
}

/// Relational composition of two cubes through intermediate symbols x''.
inline Cube compose_cubes(const Cube& a, const Cube& b, std::size_t nvars, const LraOptions& opts) {
  if (a.bottom || b.bottom) return Cube::falsum();
  auto first = [](Sym s) { return role(s) == Role::Post ? mid(var_of(s)) : s; };
  auto second = [](Sym s) { return role(s) == Role::Pre ? mid(var_of(s)) : s; };
  Cube c;
  for (const Poly& p : a.eqs) c.eqs.push_back(p.rename(first));
  for (const Poly& p : a.ges) c.ges.push_back(p.rename(first));
  for (const Poly& p : b.eqs) c.eqs.push_back(p.rename(second));
  for (const Poly& p : b.ges) c.ges.push_back(p.rename(second));
  return eliminate(std::move(c), all_of_role(nvars, Role::Mid), opts);
}

inline TransFormula compose(const TransFormula& a, const TransFormula& b, std::size_t nvars, const LraOptions& opts) {
  std::vector<Cube> out;
  for (const Cube& c : a.cubes)
    for (const Cube& d : b.cubes) out.push_back(compose_cubes(c, d, nvars, opts));
  return normalize(std::move(out), opts);
}

/// (exists x, x'. f) /\ x' = x
inline TransFormula exists_var(VarId x, const TransFormula& f, const LraOptions& opts) {
  std::vector<Cube> out;
  for (const Cube& c : f.cubes) {
    Cube d = eliminate(c, {pre(x), post(x)}, opts);
    d.eqs.push_back(Poly::symbol(post(x)) - Poly::symbol(pre(x)));
    canonicalize(d, opts);
    out.push_back(std::move(d));
  }
  return normalize(std::move(out), opts);
}

}  // namespace pka::lra
