#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pka/lang/interp.hpp"
#include "pka/lang/program.hpp"

namespace pka {

/// Environments over `num_vars` variables taking values in Z_m, numbered in
/// mixed radix with variable 0 as the least significant digit.
struct RelSpace {
  std::size_t modulus = 5;
  std::vector<std::string> var_names;
  std::size_t num_states = 1;
  std::size_t words = 1;

  RelSpace(std::size_t m, std::vector<std::string> names) : modulus(m), var_names(std::move(names)) {
    if (m < 2) throw Error("modulus must be at least 2");
    num_states = 1;
    for (std::size_t i = 0; i < var_names.size(); ++i) {
      num_states *= m;
      if (num_states > (1u << 14)) throw Error("relational state space too large");
    }
    words = (num_states + 63) / 64;
  }

  std::size_t num_vars() const { return var_names.size(); }

  std::size_t get(std::size_t state, VarId x) const {
    for (VarId i = 0; i < x; ++i) state /= modulus;
    return state % modulus;
  }
  std::size_t set(std::size_t state, VarId x, std::size_t value) const {
    std::size_t scale = 1;
    for (VarId i = 0; i < x; ++i) scale *= modulus;
    return state - get(state, x) * scale + value * scale;
  }
  Env decode(std::size_t state) const {
    Env env(num_vars());
    for (std::size_t i = 0; i < num_vars(); ++i) {
      env[i] = static_cast<std::int64_t>(state % modulus);
      state /= modulus;
    }
    return env;
  }
  std::size_t encode(const Env& env) const {
    std::size_t s = 0, scale = 1;
    for (std::size_t i = 0; i < num_vars(); ++i) {
      s += reduce(env[i]) * scale;
      scale *= modulus;
    }
    return s;
  }
  std::size_t reduce(std::int64_t v) const {
    std::int64_t m = static_cast<std::int64_t>(modulus);
    return static_cast<std::size_t>(((v % m) + m) % m);
  }
  std::string render_state(std::size_t state) const {
    std::string s = "(";
    for (std::size_t i = 0; i < num_vars(); ++i) {
      if (i) s += ",";
      s += var_names[i] + "=" + std::to_string(get(state, i));
    }
    return s + ")";
  }
};

/// A relation on environments, stored as a dense bit matrix.
struct RelValue {
  std::shared_ptr<const RelSpace> space;
  std::vector<std::uint64_t> bits;  // row-major, `words` per row

  bool test(std::size_t i, std::size_t j) const { return (bits[i * space->words + j / 64] >> (j % 64)) & 1u; }
  void set(std::size_t i, std::size_t j) { bits[i * space->words + j / 64] |= std::uint64_t{1} << (j % 64); }
  const std::uint64_t* row(std::size_t i) const { return bits.data() + i * space->words; }
  std::uint64_t* row(std::size_t i) { return bits.data() + i * space->words; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : bits) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < space->num_states; ++i)
      for (std::size_t j = 0; j < space->num_states; ++j)
        if (test(i, j)) out.push_back({i, j});
    return out;
  }
};

/// The relational quantale over environments modulo m.
class RelDomain {
 public:
  using value_type = RelValue;

  explicit RelDomain(std::shared_ptr<const RelSpace> space) : space_(std::move(space)) {}
  RelDomain(std::size_t modulus, std::vector<std::string> names)
      : space_(std::make_shared<const RelSpace>(modulus, std::move(names))) {}

  const RelSpace& space() const { return *space_; }
  std::shared_ptr<const RelSpace> space_ptr() const { return space_; }

  RelValue zero() const { return RelValue{space_, std::vector<std::uint64_t>(space_->num_states * space_->words, 0)}; }
  RelValue one() const {
    RelValue r = zero();
    for (std::size_t i = 0; i < space_->num_states; ++i) r.set(i, i);
    return r;
  }
  RelValue full() const {
    RelValue r = zero();
    for (std::size_t i = 0; i < space_->num_states; ++i)
      for (std::size_t j = 0; j < space_->num_states; ++j) r.set(i, j);
    return r;
  }

  RelValue plus(const RelValue& a, const RelValue& b) const {
    check(a, b);
    RelValue r = a;
    for (std::size_t i = 0; i < r.bits.size(); ++i) r.bits[i] |= b.bits[i];
    return r;
  }

  RelValue times(const RelValue& a, const RelValue& b) const {
    check(a, b);
    RelValue r = zero();
    const std::size_t n = space_->num_states, w = space_->words;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t* out = r.row(i);
      const std::uint64_t* in = a.row(i);
      for (std::size_t k = 0; k < w; ++k) {
        std::uint64_t word = in[k];
        while (word) {
          std::size_t j = k * 64 + static_cast<std::size_t>(__builtin_ctzll(word));
          word &= word - 1;
          const std::uint64_t* src = b.row(j);
          for (std::size_t t = 0; t < w; ++t) out[t] |= src[t];
        }
      }
    }
    return r;
  }

  /// Reflexive-transitive closure by Warshall's algorithm.
  RelValue star(const RelValue& a) const {
    check(a, a);
    RelValue r = plus(a, one());
    const std::size_t n = space_->num_states, w = space_->words;
    for (std::size_t k = 0; k < n; ++k) {
      const std::vector<std::uint64_t> krow(r.row(k), r.row(k) + w);
      for (std::size_t i = 0; i < n; ++i) {
        if (!r.test(i, k)) continue;
        std::uint64_t* out = r.row(i);
        for (std::size_t t = 0; t < w; ++t) out[t] |= krow[t];
      }
    }
    return r;
  }

  /// Pairs (rho[x<-n], rho'[x<-n]) for every pair in `a` and every n.
  RelValue exists(VarId x, const RelValue& a) const {
    check(a, a);
    if (x >= space_->num_vars()) throw Error("exists: variable out of range");
    RelValue r = zero();
    const std::size_t n = space_->num_states;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (a.test(i, j))
          for (std::size_t v = 0; v < space_->modulus; ++v) r.set(space_->set(i, x, v), space_->set(j, x, v));
    return r;
  }

  /// The lattice is finite, so join is a widening.
  RelValue widen(const RelValue& a, const RelValue& b) const { return plus(a, b); }

  bool equal(const RelValue& a, const RelValue& b) const {
    check(a, b);
    return a.bits == b.bits;
  }

  std::size_t hash(const RelValue& a) const {
    std::size_t h = 1469598103934665603ull;
    for (auto w : a.bits) h = (h ^ std::hash<std::uint64_t>{}(w)) * 1099511628211ull;
    return h;
  }

  std::string render(const RelValue& a) const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (auto [i, j] : a.pairs()) {
      if (!first) os << ", ";
      first = false;
      os << space_->render_state(i) << "->" << space_->render_state(j);
    }
    os << "}";
    return os.str();
  }

  // -------------------------------------------------------------------------
  // Semantics of actions
  // -------------------------------------------------------------------------

  /// Guards compare the integer values of the representatives 0..m-1.
  RelValue assume(const Guard& g) const {
    RelValue r = zero();
    for (std::size_t i = 0; i < space_->num_states; ++i) {
      auto ok = eval_guard(g, space_->decode(i));
      if (ok && *ok) r.set(i, i);
    }
    return r;
  }
  RelValue assign(VarId x, const ExpPtr& rhs) const {
    RelValue r = zero();
    for (std::size_t i = 0; i < space_->num_states; ++i) {
      auto v = eval_exp(rhs, space_->decode(i));
      if (v) r.set(i, space_->set(i, x, space_->reduce(*v)));
    }
    return r;
  }
  RelValue havoc(VarId x) const {
    RelValue r = zero();
    for (std::size_t i = 0; i < space_->num_states; ++i)
      for (std::size_t v = 0; v < space_->modulus; ++v) r.set(i, space_->set(i, x, v));
    return r;
  }
  RelValue action(const Action& a) const {
    if (auto* x = std::get_if<Assign>(&a)) return assign(x->var, x->rhs);
    if (auto* g = std::get_if<Assume>(&a)) return assume(g->guard);
    if (auto* h = std::get_if<Havoc>(&a)) return havoc(h->var);
    throw Error("call edges have no intraprocedural semantics");
  }

  RelValue random(std::mt19937_64& rng, double density = 0.05) const {
    RelValue r = zero();
    std::bernoulli_distribution coin(density);
    for (std::size_t i = 0; i < space_->num_states; ++i)
      for (std::size_t j = 0; j < space_->num_states; ++j)
        if (coin(rng)) r.set(i, j);
    return r;
  }

 private:
  std::shared_ptr<const RelSpace> space_;

  void check(const RelValue& a, const RelValue& b) const {
    auto same = [&](const RelValue& v) {
      return v.space == space_ ||
             (v.space && v.space->modulus == space_->modulus && v.space->var_names == space_->var_names);
    };
    if (!same(a) || !same(b)) throw Error("relation over a different modulus or variable list");
  }
};

}  // namespace pka
