#pragma once

#include <concepts>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pka/lang/program.hpp"

namespace pka {

/// Operations every analysis domain provides. Values are plain objects; the
/// domain object carries configuration such as the variable universe.
template <class D>
concept PkaDomain = requires(const D& d, const typename D::value_type& a) {
  { d.zero() } -> std::convertible_to<typename D::value_type>;
  { d.one() } -> std::convertible_to<typename D::value_type>;
  { d.plus(a, a) } -> std::convertible_to<typename D::value_type>;
  { d.times(a, a) } -> std::convertible_to<typename D::value_type>;
  { d.star(a) } -> std::convertible_to<typename D::value_type>;
  { d.equal(a, a) } -> std::convertible_to<bool>;
  { d.render(a) } -> std::convertible_to<std::string>;
};

template <class D>
concept QuantifiedDomain = PkaDomain<D> && requires(const D& d, const typename D::value_type& a, VarId x) {
  { d.exists(x, a) } -> std::convertible_to<typename D::value_type>;
  { d.widen(a, a) } -> std::convertible_to<typename D::value_type>;
};

template <PkaDomain D>
bool leq(const D& d, const typename D::value_type& a, const typename D::value_type& b) {
  return d.equal(d.plus(a, b), b);
}

template <QuantifiedDomain D>
typename D::value_type exists_all(const D& d, const std::vector<VarId>& xs, typename D::value_type a) {
  for (VarId x : xs) a = d.exists(x, a);
  return a;
}

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* verdict_name(Verdict v) {
  return v == Verdict::Pass ? "pass" : v == Verdict::Fail ? "fail" : "inconclusive";
}

struct AxiomResult {
  std::string name;
  Verdict verdict = Verdict::Pass;
  std::size_t trials = 0;
  std::string counterexample;
};

struct AxiomReport {
  std::vector<AxiomResult> results;

  AxiomResult& get(const std::string& name) {
    for (auto& r : results)
      if (r.name == name) return r;
    results.push_back({name, Verdict::Pass, 0, {}});
    return results.back();
  }
  const AxiomResult* find(const std::string& name) const {
    for (const auto& r : results)
      if (r.name == name) return &r;
    return nullptr;
  }
  Verdict verdict(const std::string& name) const {
    const AxiomResult* r = find(name);
    return r ? r->verdict : Verdict::Inconclusive;
  }
  bool all_pass() const {
    for (const auto& r : results)
      if (r.verdict != Verdict::Pass) return false;
    return true;
  }
  void merge(const AxiomReport& other) {
    for (const auto& r : other.results) results.push_back(r);
  }
};

namespace detail {

template <class D>
void record(const D& d, AxiomReport& rep, const std::string& name, bool ok,
            std::initializer_list<const typename D::value_type*> operands) {
  AxiomResult& r = rep.get(name);
  ++r.trials;
  if (ok || r.verdict == Verdict::Fail) return;
  r.verdict = Verdict::Fail;
  std::string s;
  char label = 'a';
  for (const auto* op : operands) {
    if (!s.empty()) s += "; ";
    s += std::string(1, label++) + " = " + d.render(*op);
  }
  r.counterexample = s;
}

}  // namespace detail

/// Samples the axioms of a pre-Kleene algebra on values drawn from `gen`.
template <PkaDomain D, class Gen>
AxiomReport check_pka(const D& d, Gen&& gen, std::size_t samples, std::uint64_t seed) {
  using V = typename D::value_type;
  std::mt19937_64 rng(seed);
  AxiomReport rep;
  for (const char* n : {"assoc_plus", "comm_plus", "idem_plus", "unit0", "assoc_times", "unit1", "left_predist",
                        "right_predist", "I1", "I2"})
    rep.get(n);
  for (std::size_t i = 0; i < samples; ++i) {
    V a = gen(rng), b = gen(rng), c = gen(rng);
    detail::record(d, rep, "assoc_plus", d.equal(d.plus(a, d.plus(b, c)), d.plus(d.plus(a, b), c)), {&a, &b, &c});
    detail::record(d, rep, "comm_plus", d.equal(d.plus(a, b), d.plus(b, a)), {&a, &b});
    detail::record(d, rep, "idem_plus", d.equal(d.plus(a, a), a), {&a});
    detail::record(d, rep, "unit0", d.equal(d.plus(a, d.zero()), a), {&a});
    detail::record(d, rep, "assoc_times", d.equal(d.times(a, d.times(b, c)), d.times(d.times(a, b), c)),
                   {&a, &b, &c});
    detail::record(d, rep, "unit1", d.equal(d.times(d.one(), a), a) && d.equal(d.times(a, d.one()), a), {&a});
    detail::record(d, rep, "left_predist", leq(d, d.plus(d.times(a, b), d.times(a, c)), d.times(a, d.plus(b, c))),
                   {&a, &b, &c});
    detail::record(d, rep, "right_predist", leq(d, d.plus(d.times(a, c), d.times(b, c)), d.times(d.plus(a, b), c)),
                   {&a, &b, &c});
    V s = d.star(a);
    detail::record(d, rep, "I1", leq(d, d.plus(d.one(), d.times(a, s)), s), {&a});
    detail::record(d, rep, "I2", leq(d, d.plus(d.one(), d.times(s, a)), s), {&a});
  }
  return rep;
}

/// Distributivity over finite sums and star as the sum of powers. The power
/// sum is iterated up to `star_terms`; if it has not stabilised the check is
/// inconclusive for that sample.
template <PkaDomain D, class Gen>
AxiomReport check_quantale(const D& d, Gen&& gen, std::size_t samples, std::uint64_t seed, std::size_t star_terms = 64) {
  using V = typename D::value_type;
  std::mt19937_64 rng(seed);
  AxiomReport rep;
  for (const char* n : {"distL", "distR", "starSum"}) rep.get(n);
  bool star_decided = false;
  for (std::size_t i = 0; i < samples; ++i) {
    V a = gen(rng);
    std::size_t k = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
    std::vector<V> bs;
    for (std::size_t j = 0; j < k; ++j) bs.push_back(gen(rng));
    V sum = d.zero(), left = d.zero(), right = d.zero();
    for (const V& b : bs) {
      sum = d.plus(sum, b);
      left = d.plus(left, d.times(a, b));
      right = d.plus(right, d.times(b, a));
    }
    detail::record(d, rep, "distL", d.equal(d.times(a, sum), left), {&a, &sum});
    detail::record(d, rep, "distR", d.equal(d.times(sum, a), right), {&a, &sum});

    V acc = d.one(), power = d.one();
    bool stable = false;
    for (std::size_t t = 0; t < star_terms; ++t) {
      power = d.times(power, a);
      V next = d.plus(acc, power);
      if (d.equal(next, acc)) {
        stable = true;
        break;
      }
      acc = next;
    }
    if (stable) {
      star_decided = true;
      V s = d.star(a);
      detail::record(d, rep, "starSum", d.equal(s, acc), {&a});
    }
  }
  if (!star_decided && rep.get("starSum").verdict == Verdict::Pass) rep.get("starSum").verdict = Verdict::Inconclusive;
  return rep;
}

struct QpkaOptions {
  bool exact_sums = false;  // check Q1 as an equality
  std::size_t widen_budget = 400;
};

/// Existential and widening axioms over the variables `vars`.
template <QuantifiedDomain D, class Gen>
AxiomReport check_qpka(const D& d, Gen&& gen, const std::vector<VarId>& vars, std::size_t samples, std::uint64_t seed,
                       QpkaOptions opts = {}) {
  using V = typename D::value_type;
  std::mt19937_64 rng(seed);
  AxiomReport rep;
  for (const char* n : {"Q1", "Q2", "Q3", "Q4", "W1", "stabilization"}) rep.get(n);
  if (vars.empty()) return rep;
  std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    V a = gen(rng), b = gen(rng);
    VarId x = vars[pick(rng)], y = vars[pick(rng)];
    V ea = d.exists(x, a), eb = d.exists(x, b);
    V lhs1 = d.plus(ea, eb), rhs1 = d.exists(x, d.plus(a, b));
    bool q1 = opts.exact_sums ? d.equal(lhs1, rhs1) : leq(d, lhs1, rhs1);
    detail::record(d, rep, "Q1", q1, {&a, &b});
    V both = d.times(ea, eb);
    detail::record(d, rep, "Q2", d.equal(d.exists(x, d.times(ea, b)), both), {&a, &b});
    detail::record(d, rep, "Q3", d.equal(d.exists(x, d.times(a, eb)), both), {&a, &b});
    detail::record(d, rep, "Q4", d.equal(d.exists(x, d.exists(y, a)), d.exists(y, d.exists(x, a))), {&a});
    detail::record(d, rep, "W1", leq(d, d.plus(a, b), d.widen(a, b)), {&a, &b});
  }
  // Widen along a random ascending chain and look for a fixed tail covering
  // the second half of the budget. A finite run cannot refute eventual
  // stabilisation, so a sequence still moving is inconclusive.
  std::size_t chains = std::max<std::size_t>(1, samples / 10);
  for (std::size_t c = 0; c < chains; ++c) {
    V seq = gen(rng);
    V w = seq;
    std::size_t last_change = 0;
    for (std::size_t step = 1; step <= opts.widen_budget; ++step) {
      seq = d.plus(seq, gen(rng));
      V nw = d.widen(w, seq);
      if (!d.equal(nw, w)) last_change = step;
      w = nw;
    }
    AxiomResult& r = rep.get("stabilization");
    ++r.trials;
    if (last_change > opts.widen_budget / 2 && r.verdict == Verdict::Pass) {
      r.verdict = Verdict::Inconclusive;
      r.counterexample = "widening sequence still changing at step " + std::to_string(last_change);
    }
  }
  return rep;
}

}  // namespace pka
