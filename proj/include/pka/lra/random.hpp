#pragma once

#include <random>

#include "pka/lra/ops.hpp"

namespace pka::lra {

/// Small random transition formulas: one or two cubes of a few constraints
/// with coefficients in -1..1 and constants in -2..2, each variable either
/// framed, incremented, reset or left free.
inline TransFormula random_formula(std::mt19937_64& rng, std::size_t nvars, const LraOptions& opts = {}) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto var = [&] { return static_cast<VarId>(pick(0, static_cast<int>(nvars) - 1)); };
  if (pick(0, 11) == 0) return TransFormula::falsum();
  std::vector<Cube> cubes;
  int n = pick(1, 2);
  for (int i = 0; i < n; ++i) {
    Cube c;
    for (VarId x = 0; x < nvars; ++x) {
      Poly px = Poly::symbol(pre(x)), qx = Poly::symbol(post(x));
      switch (pick(0, 5)) {
        case 0:
        case 1: c.eqs.push_back(qx - px); break;
        case 2: c.eqs.push_back(qx - px - Poly::constant(pick(-1, 2))); break;
        case 3: c.eqs.push_back(qx - Poly::constant(pick(-2, 2))); break;
        case 4: c.ges.push_back(qx - px); break;
        default: break;
      }
    }
    int guards = pick(0, 2);
    for (int g = 0; g < guards; ++g) {
      Poly p = Poly::symbol(pre(var())).scaled(pick(-1, 1)) + Poly::constant(pick(-2, 2));
      if (pick(0, 2) == 0) p += Poly::symbol(pre(var())).scaled(pick(-1, 1));
      c.ges.push_back(std::move(p));
    }
    canonicalize(c, opts);
    cubes.push_back(std::move(c));
  }
  return normalize(std::move(cubes), opts);
}

}  // namespace pka::lra
