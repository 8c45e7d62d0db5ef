// pka-cli: front end for the path-expression analyses.
//
// Exit codes: 0 success / every assertion SAFE, 1 some UNKNOWN verdict or
// oracle mismatch, 2 usage, parse or validation errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "pka/algebra.hpp"
#include "pka/analysis.hpp"
#include "pka/interproc.hpp"
#include "pka/lang/parser.hpp"
#include "pka/lang/print.hpp"
#include "pka/lang/validate.hpp"
#include "pka/lra/random.hpp"
#include "pka/lradom.hpp"
#include "pka/pathexpr.hpp"
#include "pka/reldom.hpp"

namespace {

using namespace pka;
using Json = nlohmann::ordered_json;

struct Options {
  std::string file;
  std::string domain = "lra";
  std::size_t modulus = 4;
  std::string widening = "trivial";
  std::string star = "guarded";
  std::size_t cap = 16;
  std::size_t fm_budget = 512;
  std::uint64_t seed = 1;
  std::size_t samples = 100;
  std::size_t budget = 200;
  bool json = false;
  std::string emit_smt2;
  std::string proc;
  std::optional<VertexId> vertex;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Program load(const Options& o) {
  std::ifstream in(o.file);
  if (!in) throw UsageError("cannot read " + o.file);
  std::stringstream ss;
  ss << in.rdbuf();
  Program prog = parse_program(ss.str());
  auto diags = validate_program(prog);
  if (!diags.empty()) {
    std::string msg = "invalid program:";
    for (const auto& d : diags) msg += "\n  " + d.message;
    throw UsageError(msg);
  }
  return prog;
}

LraDomain make_lra(const Program& prog, const Options& o, std::size_t* query_counter) {
  LraDomain::Config cfg;
  cfg.opts.max_cubes = o.cap;
  cfg.opts.fm_budget = o.fm_budget;
  cfg.widening = o.widening == "drop" ? Widening::Drop : Widening::Trivial;
  cfg.star = o.star == "closed" ? lra::StarMode::Closed : lra::StarMode::Guarded;
  if (!o.emit_smt2.empty()) {
    std::filesystem::create_directories(o.emit_smt2);
    auto names = prog.var_names;
    std::string dir = o.emit_smt2;
    cfg.observer = [names, dir, query_counter](const lra::TransFormula& a, const lra::TransFormula& b, bool v) {
      std::ostringstream path;
      path << dir << "/query_" << std::setw(5) << std::setfill('0') << (*query_counter)++ << ".smt2";
      std::ofstream(path.str()) << lra::smt2_entailment(a, b, v, names);
    };
  }
  return LraDomain(prog.var_names, cfg);
}

RelDomain make_rel(const Program& prog, const Options& o) {
  return RelDomain(std::make_shared<RelSpace>(o.modulus, prog.var_names));
}

bool selected(const Program& prog, const Options& o, ProcId p, VertexId v) {
  if (!o.proc.empty() && prog.procedures[p].name != o.proc) return false;
  return !o.vertex || *o.vertex == v;
}

void emit_rows(const Options& o, const Json& rows) {
  if (o.json) {
    std::cout << rows.dump(2) << "\n";
    return;
  }
  for (const auto& r : rows) {
    std::cout << r["procedure"].get<std::string>();
    if (!r["vertex"].is_null()) std::cout << " v" << r["vertex"].get<VertexId>();
    if (!r["verdict"].is_null()) std::cout << " [" << r["verdict"].get<std::string>() << "]";
    std::cout << ": " << r["value"].get<std::string>() << "\n";
  }
}

Json row(const std::string& proc, std::optional<VertexId> v, const std::string& value,
         std::optional<std::string> verdict) {
  Json r;
  r["procedure"] = proc;
  r["vertex"] = v ? Json(*v) : Json(nullptr);
  r["value"] = value;
  r["verdict"] = verdict ? Json(*verdict) : Json(nullptr);
  return r;
}

/// analyze and check share this; `only_asserts` restricts rows to assertion vertices.
template <class D>
int run_analysis(const Program& prog, const D& dom, const Options& o, bool only_asserts) {
  SummaryMode mode = std::is_same_v<D, RelDomain> ? SummaryMode::Lfp : SummaryMode::Widening;
  auto res = analyze_program(prog, dom, mode, std::is_same_v<D, RelDomain> ? 10000 : o.budget);
  std::map<VertexId, std::vector<const AssertionVerdict*>> at;
  for (const auto& v : res.verdicts) at[v.assertion->vertex].push_back(&v);
  Json rows = Json::array();
  bool all_safe = true;
  for (ProcId p = 0; p < prog.procedures.size(); ++p)
    for (VertexId v : prog.procedures[p].graph.vertices) {
      if (!selected(prog, o, p, v)) continue;
      auto it = at.find(v);
      if (it == at.end()) {
        if (!only_asserts) rows.push_back(row(prog.procedures[p].name, v, dom.render(res.values.at(v)), std::nullopt));
        continue;
      }
      for (const AssertionVerdict* a : it->second) {
        all_safe = all_safe && a->safe;
        std::string value = only_asserts ? a->assertion->text : dom.render(res.values.at(v));
        rows.push_back(row(prog.procedures[p].name, v, value, a->safe ? "SAFE" : "UNKNOWN"));
      }
    }
  emit_rows(o, rows);
  return all_safe ? 0 : 1;
}

template <class D>
int run_summaries(const Program& prog, const D& dom, const Options& o) {
  Interproc<D> ip(prog, dom);
  auto run = std::is_same_v<D, RelDomain> ? ip.fixpoint_lfp() : ip.fixpoint_widening(o.budget);
  if (!run.converged) {
    std::string names;
    for (ProcId p : run.unstable) names += (names.empty() ? "" : ", ") + prog.procedures[p].name;
    throw Error("summary iteration budget exhausted; still changing: " + names);
  }
  Json rows = Json::array();
  for (ProcId p = 0; p < prog.procedures.size(); ++p)
    if (o.proc.empty() || prog.procedures[p].name == o.proc)
      rows.push_back(row(prog.procedures[p].name, std::nullopt, dom.render(run.summaries()[p]), std::nullopt));
  if (!o.json) std::cout << "rounds: " << run.rounds.size() << "\n";
  emit_rows(o, rows);
  return 0;
}

int run_paths(const Program& prog, const Options& o) {
  Json rows = Json::array();
  for (ProcId p = 0; p < prog.procedures.size(); ++p)
    for (const auto& [v, e] : procedure_paths(prog, p))
      if (selected(prog, o, p, v)) rows.push_back(row(prog.procedures[p].name, v, regex::render(e), std::nullopt));
  emit_rows(o, rows);
  return 0;
}

int run_oracle_compare(const Program& prog, const Options& o) {
  RelDomain dom = make_rel(prog, o);
  auto res = analyze_program(prog, dom, SummaryMode::Lfp, 10000);
  auto oracle = coincidence_oracle(prog, dom);
  if (!oracle) throw Error("coincidence oracle exceeded its budget");
  Json rows = Json::array();
  bool all_equal = true;
  for (ProcId p = 0; p < prog.procedures.size(); ++p)
    for (VertexId v : prog.procedures[p].graph.vertices) {
      if (!selected(prog, o, p, v)) continue;
      bool eq = dom.equal(res.values.at(v), oracle->at(v));
      all_equal = all_equal && eq;
      rows.push_back(row(prog.procedures[p].name, v, dom.render(res.values.at(v)), eq ? "equal" : "diff"));
    }
  emit_rows(o, rows);
  return all_equal ? 0 : 1;
}

int run_axioms(const Options& o) {
  AxiomReport rep;
  std::vector<std::string> names{"x", "y"};
  if (o.domain == "rel") {
    RelDomain d(std::make_shared<RelSpace>(o.modulus, names));
    auto gen = [&d](std::mt19937_64& rng) { return d.random(rng, 0.1); };
    rep.merge(check_pka(d, gen, o.samples, o.seed));
    rep.merge(check_quantale(d, gen, o.samples, o.seed));
    rep.merge(check_qpka(d, gen, {0, 1}, o.samples, o.seed, QpkaOptions{true, 400}));
  } else {
    LraDomain::Config cfg;
    cfg.opts.max_cubes = o.cap;
    cfg.opts.fm_budget = o.fm_budget;
    cfg.widening = o.widening == "drop" ? Widening::Drop : Widening::Trivial;
    cfg.star = o.star == "closed" ? lra::StarMode::Closed : lra::StarMode::Guarded;
    LraDomain d(names, cfg);
    auto gen = [&cfg](std::mt19937_64& rng) { return lra::random_formula(rng, 2, cfg.opts); };
    rep.merge(check_pka(d, gen, o.samples, o.seed));
    rep.merge(check_quantale(d, gen, std::max<std::size_t>(1, o.samples / 5), o.seed, 8));
    rep.merge(check_qpka(d, gen, {0, 1}, o.samples, o.seed));
  }
  if (o.json) {
    Json out = Json::array();
    for (const auto& r : rep.results)
      out.push_back({{"axiom", r.name},
                     {"verdict", verdict_name(r.verdict)},
                     {"trials", r.trials},
                     {"counterexample", r.counterexample}});
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << std::left << std::setw(16) << "axiom" << std::setw(14) << "verdict" << "trials\n";
    for (const auto& r : rep.results) {
      std::cout << std::setw(16) << r.name << std::setw(14) << verdict_name(r.verdict) << r.trials << "\n";
      if (!r.counterexample.empty()) std::cout << "    " << r.counterexample << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algebraic program analysis over path expressions"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub, bool with_file) {
    if (with_file) sub->add_option("file", o.file, "Program source")->required();
    sub->add_option("--domain", o.domain, "Abstract domain")->check(CLI::IsMember({"lra", "rel"}));
    sub->add_option("--modulus", o.modulus, "Modulus of the relational domain")->check(CLI::Range(2, 64));
    sub->add_option("--widening", o.widening, "Widening for recursive summaries")
        ->check(CLI::IsMember({"trivial", "drop"}));
    sub->add_option("--star", o.star, "Loop iteration operator")->check(CLI::IsMember({"guarded", "closed"}));
    sub->add_option("--cap", o.cap, "Maximum cubes per formula")->check(CLI::PositiveNumber);
    sub->add_option("--fm-budget", o.fm_budget, "Fourier-Motzkin combination budget");
    sub->add_option("--budget", o.budget, "Summary iteration budget (widening)");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_flag("--json", o.json, "Machine-readable output");
    sub->add_option("--emit-smt2", o.emit_smt2, "Write every entailment query as SMT-LIB2 into DIR");
    sub->add_option("--proc", o.proc, "Restrict output to one procedure");
    sub->add_option("--vertex", o.vertex, "Restrict output to one vertex");
  };
  auto* analyze = app.add_subcommand("analyze", "Value of every vertex");
  auto* paths = app.add_subcommand("paths", "Path expressions from each procedure entry");
  auto* summaries = app.add_subcommand("summaries", "Procedure summaries");
  auto* check = app.add_subcommand("check", "Verdict for every assertion");
  auto* oracle = app.add_subcommand("oracle-compare", "Compare relational values with the coincidence oracle");
  auto* axioms = app.add_subcommand("axioms", "Sample the algebraic laws of a domain");
  for (auto* s : {analyze, paths, summaries, check, oracle}) add_common(s, true);
  add_common(axioms, false);
  axioms->add_option("--samples", o.samples, "Samples per law");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::size_t queries = 0;
  try {
    if (axioms->parsed()) return run_axioms(o);
    Program prog = load(o);
    if (paths->parsed()) return run_paths(prog, o);
    if (oracle->parsed()) return run_oracle_compare(prog, o);
    bool asserts = check->parsed();
    if (summaries->parsed()) {
      if (o.domain == "rel") return run_summaries(prog, make_rel(prog, o), o);
      return run_summaries(prog, make_lra(prog, o, &queries), o);
    }
    if (o.domain == "rel") return run_analysis(prog, make_rel(prog, o), o, asserts);
    return run_analysis(prog, make_lra(prog, o, &queries), o, asserts);
  } catch (const ParseError& e) {
    std::cerr << o.file << ": " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
