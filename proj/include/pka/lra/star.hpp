#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "pka/lra/ops.hpp"

namespace pka::lra {

/// Iteration counter used while building closed forms.
inline Sym counter_sym() { return aux(0); }

struct Recurrence {
  int stratum = 0;
  Poly increment;  // x' - x, over pre symbols of lower strata
  Poly closed;     // value after k iterations, over pre symbols and the counter
};

using Recurrences = std::map<VarId, Recurrence>;

namespace detail {

/// Sum over i = 0..k-1 of a polynomial in i; nothing if the result would exceed degree two.
inline std::optional<Poly> sum_below_counter(const Poly& p) {
  const Sym k = counter_sym();
  Poly out;
  for (const auto& [m, c] : p.terms()) {
    if (m.degree() == 0) {
      out.add_term(Monomial::of(k), c);
    } else if (m.degree() == 1 && m.a == k) {
      out.add_term(Monomial::of(k, k), c / 2);
      out.add_term(Monomial::of(k), -c / 2);
    } else if (m.degree() == 1) {
      out.add_term(Monomial::of(m.a, k), c);
    } else {
      return std::nullopt;
    }
  }
  return out;
}

}  // namespace detail

/// Variables whose update x' = x + f(lower strata) holds in every cube, read
/// from the affine hull of the cubes.
inline Recurrences detect_recurrences(const std::vector<Cube>& cubes, std::size_t nvars, const LraOptions& opts) {
  using namespace detail;
  (void)opts;
  Recurrences rec;
  if (cubes.empty()) return rec;
  std::vector<Poly> hullq = cubes[0].eqs;
  for (std::size_t i = 1; i < cubes.size(); ++i) hullq = affine_join(hullq, cubes[i].eqs);

  for (bool progress = true; progress;) {
    progress = false;
    SymOrder ord{[&rec](Sym s) -> std::uint64_t {
      std::uint64_t v = var_of(s);
      switch (role(s)) {
        case Role::Pre: {
          auto it = rec.find(var_of(s));
          if (it != rec.end()) return (static_cast<std::uint64_t>(it->second.stratum) << 20) | v;
          return (std::uint64_t{1} << 40) | v;
        }
        case Role::Post: return (std::uint64_t{2} << 40) | v;
        default: return (std::uint64_t{3} << 40) | v;
      }
    }};
    auto rows = gauss(hullq, ord);
    if (!rows) return {};
    for (VarId x = 0; x < nvars; ++x) {
      if (rec.count(x)) continue;
      Poly r = normal_form(Poly::symbol(post(x)) - Poly::symbol(pre(x)), *rows);
      if (r.degree() > 1) continue;
      bool ok = true;
      int stratum = 0;
      for (Sym s : r.symbols()) {
        auto it = role(s) == Role::Pre ? rec.find(var_of(s)) : rec.end();
        if (it == rec.end()) {
          ok = false;
          break;
        }
        stratum = std::max(stratum, it->second.stratum + 1);
      }
      if (!ok) continue;
      // r evaluated at iteration i: substitute the closed forms of lower strata
      Poly at_i = r.rename([](Sym s) { return mid(var_of(s)); });
      bool fits = true;
      for (Sym s : at_i.symbols()) {
        auto sub = at_i.substitute(s, rec.at(var_of(s)).closed);
        if (!sub) {
          fits = false;
          break;
        }
        at_i = *sub;
      }
      if (!fits) continue;
      auto summed = sum_below_counter(at_i);
      if (!summed) continue;
      Recurrence rc;
      rc.stratum = stratum;
      rc.increment = r;
      rc.closed = Poly::symbol(pre(x)) + *summed;
      rec.emplace(x, std::move(rc));
      progress = true;
    }
  }
  return rec;
}

inline Cube closed_form_cube(const Recurrences& rec, long min_iterations) {
  Cube c;
  for (const auto& [x, r] : rec) c.eqs.push_back(Poly::symbol(post(x)) - r.closed);
  c.ges.push_back(Poly::symbol(counter_sym()) - Poly::constant(min_iterations));
  return c;
}

/// Constraints over pre-state (or post-state) symbols entailed by every cube.
inline Cube projected_guard(const std::vector<Cube>& cubes, std::size_t nvars, Role keep, const LraOptions& opts) {
  Role drop = keep == Role::Pre ? Role::Post : Role::Pre;
  std::vector<Cube> proj;
  for (const Cube& c : cubes) proj.push_back(eliminate(c, all_of_role(nvars, drop), opts));
  return hull_all(proj, opts);
}

/// The pre-state guard evaluated at the start of the final iteration, for
/// constraints over inductive variables only.
inline std::vector<Poly> last_iteration_guard(const Cube& pre_guard, const Recurrences& rec) {
  const Sym k = counter_sym();
  Poly k_minus_1 = Poly::symbol(k) - Poly::constant(1);
  std::vector<Poly> out;
  auto shift = [&](const Poly& p, bool& ok) {
    Poly q = p.rename([](Sym s) { return role(s) == Role::Pre ? mid(var_of(s)) : s; });
    for (Sym s : q.symbols()) {
      if (role(s) != Role::Mid) continue;
      auto it = rec.find(var_of(s));
      if (it == rec.end()) {
        ok = false;
        return q;
      }
      auto at = it->second.closed.substitute(k, k_minus_1);
      if (!at) {
        ok = false;
        return q;
      }
      auto sub = q.substitute(s, *at);
      if (!sub) {
        ok = false;
        return q;
      }
      q = *sub;
    }
    return q;
  };
  for (const Poly& g : inequality_view(pre_guard)) {
    bool ok = true;
    Poly shifted = shift(g, ok);
    if (ok) out.push_back(std::move(shifted));
  }
  return out;
}

enum class StarMode { Guarded, Closed };

/// At least one iteration: closed forms with the counter >= 1, the loop guard
/// at the first and last iteration, and the post-state constraints.
inline Cube guarded_iteration(const std::vector<Cube>& cubes, std::size_t nvars, const LraOptions& opts) {
  Recurrences rec = detect_recurrences(cubes, nvars, opts);
  Cube c = closed_form_cube(rec, 1);
  Cube pre_guard = projected_guard(cubes, nvars, Role::Pre, opts);
  Cube post_guard = projected_guard(cubes, nvars, Role::Post, opts);
  if (pre_guard.bottom || post_guard.bottom) return Cube::falsum();
  for (const Poly& p : pre_guard.eqs) c.eqs.push_back(p);
  for (const Poly& p : pre_guard.ges) c.ges.push_back(p);
  for (const Poly& p : post_guard.eqs) c.eqs.push_back(p);
  for (const Poly& p : post_guard.ges) c.ges.push_back(p);
  for (Poly& p : last_iteration_guard(pre_guard, rec)) c.ges.push_back(std::move(p));
  return eliminate(std::move(c), {counter_sym()}, opts);
}

/// exists k >= 0. x' = closed form of x after k iterations.
inline Cube closed_iteration(const std::vector<Cube>& cubes, std::size_t nvars, const LraOptions& opts) {
  Recurrences rec = detect_recurrences(cubes, nvars, opts);
  return eliminate(closed_form_cube(rec, 0), {counter_sym()}, opts);
}

inline TransFormula lra_star(const TransFormula& f, std::size_t nvars, StarMode mode, const LraOptions& opts) {
  Cube one = identity_cube(nvars);
  if (f.is_false()) return TransFormula::of(one);
  if (mode == StarMode::Closed) return normalize({closed_iteration(f.cubes, nvars, opts)}, opts);

  if (f.cubes.size() >= 2) {
    // Split on variables the loop never changes when the cubes partition them.
    std::set<Sym> hide = all_of_role(nvars, Role::Post);
    bool any_invariant = false;
    for (VarId x = 0; x < nvars; ++x) {
      Poly same = Poly::symbol(post(x)) - Poly::symbol(pre(x));
      bool inv = true;
      for (const Cube& c : f.cubes)
        if (!entails_eq(c, same, opts)) inv = false;
      if (inv) any_invariant = true;
      else hide.insert(pre(x));
    }
    if (any_invariant) {
      std::vector<Cube> cls;
      for (const Cube& c : f.cubes) cls.push_back(eliminate(c, hide, opts));
      bool disjoint = true;
      for (std::size_t i = 0; i < cls.size() && disjoint; ++i)
        for (std::size_t j = i + 1; j < cls.size() && disjoint; ++j)
          if (!conjoin(cls[i], cls[j], opts).bottom) disjoint = false;
      if (disjoint) {
        std::vector<Cube> out{one};
        for (std::size_t i = 0; i < f.cubes.size(); ++i)
          out.push_back(conjoin(cls[i], guarded_iteration({f.cubes[i]}, nvars, opts), opts));
        return normalize(std::move(out), opts);
      }
    }
  }
  return normalize({one, guarded_iteration(f.cubes, nvars, opts)}, opts);
}

}  // namespace pka::lra
