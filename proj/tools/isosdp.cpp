// Command-line front end for the isosdp library.
//
//   isosdp check G1 G2            decide isomorphism, exit 0/2/3 (1 on error)
//   isosdp compat G1 G2           print the compatibility graph
//   isosdp theta G [G2]           theta of G, or the prefilter on compat(G, G2)
//   isosdp solve-sdp FILE         solve a JSON problem description
//   isosdp oracle ACTION G1 G2    max-clique | enumerate | build-solution
//   isosdp experiment             generate a corpus and run the batch
//
// A graph argument is a file path (graph6 or edge list), "-" for stdin, or
// "g6:STRING" for an inline graph6 string.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "isosdp/isosdp.hpp"

namespace {

using namespace isosdp;

struct Globals {
  std::optional<double> tol;
  std::optional<double> tau;
  bool no_prefilter = false;
  bool no_extraction = false;
  std::uint64_t seed = 1;
  bool json_out = false;
  std::string out_dir;
};

std::string read_all(std::istream& in) { return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}; }

std::string read_source(const std::string& arg) {
  if (arg == "-") return read_all(std::cin);
  std::ifstream f(arg, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + arg + "'");
  return read_all(f);
}

Graph load_graph(const std::string& arg) {
  if (arg.rfind("g6:", 0) == 0) return parse_graph6(std::string_view(arg).substr(3));
  return parse_graph_text(read_source(arg));
}

SolverConfig solver_config(const Globals& g) {
  SolverConfig c;
  if (g.tol) c.gap_tol = c.feas_tol = *g.tol;
  c.validate();
  return c;
}

DeciderConfig decider_config(const Globals& g) {
  DeciderConfig c;
  c.solver = solver_config(g);
  c.tau = g.tau;
  c.prefilter = !g.no_prefilter;
  c.extraction = !g.no_extraction;
  return c;
}

void write_output(const Globals& g, const std::string& name, const std::string& text) {
  if (g.out_dir.empty()) return;
  std::filesystem::create_directories(g.out_dir);
  std::ofstream f(std::filesystem::path(g.out_dir) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + name);
  f << text;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

int run_check(const Globals& g, const std::string& a, const std::string& b) {
  const auto rep = decide(load_graph(a), load_graph(b), decider_config(g));
  const auto j = decision_report_to_json(rep);
  write_output(g, "report.json", j.dump(2) + "\n");
  if (g.json_out) {
    print_json(j);
  } else {
    std::cout << "verdict: " << to_string(rep.verdict) << " (" << rep.reason << ")\n";
    if (rep.value) std::printf("value:   %.10g  (tau %.6g, margin %+.6g)\n", *rep.value, rep.tau, *rep.margin);
    if (rep.theta) std::printf("theta:   %.10g\n", *rep.theta);
    if (rep.mapping) {
      std::cout << "mapping:";
      for (auto v : rep.mapping->mapping()) std::cout << ' ' << v;
      std::cout << (rep.verified ? "  (verified)\n" : "  (not verified)\n");
    }
    if (rep.oracle_isomorphic) std::cout << "oracle:  " << (*rep.oracle_isomorphic ? "isomorphic" : "non-isomorphic") << "\n";
    if (rep.gap_bound_exceeded) std::cout << "note:    value exceeds n(n-1) on a non-isomorphic pair\n";
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
    std::printf("time:    %.3f s\n", rep.times.total);
  }
  switch (rep.verdict) {
    case Verdict::NonIsomorphicCertified:
    case Verdict::IsomorphicCertified: return 0;
    case Verdict::IsomorphicClaimed: return 2;
    case Verdict::Inconclusive: return 3;
  }
  return 1;
}

int run_compat(const Globals& g, const std::string& a, const std::string& b, const std::string& format) {
  const auto gc = build_compatibility(load_graph(a), load_graph(b));
  std::string text;
  if (format == "g6") {
    text = emit_graph6(gc.graph()) + "\n";
  } else {
    text = emit_edge_list(gc.graph());
  }
  write_output(g, format == "g6" ? "compat.g6" : "compat.txt", text);
  std::cout << text;
  return 0;
}

int run_theta(const Globals& g, const std::string& a, const std::string& b) {
  const auto cfg = solver_config(g);
  json j;
  j["schema"] = kSchema;
  if (b.empty()) {
    const auto t = lovasz_theta(load_graph(a), cfg);
    j["theta"] = t.value;
    j["solver"] = solver_diagnostics_to_json(SolverDiagnostics::from(t.solution));
  } else {
    const auto gc = build_compatibility(load_graph(a), load_graph(b));
    const auto pf = theta_prefilter(gc, cfg);
    j["theta"] = pf.theta;
    j["n"] = gc.n();
    j["verdict"] = std::string(to_string(pf.verdict));
    j["solver"] = solver_diagnostics_to_json(SolverDiagnostics::from(pf.solution));
  }
  write_output(g, "theta.json", j.dump(2) + "\n");
  print_json(j);
  return 0;
}

int run_solve(const Globals& g, const std::string& file, bool with_x) {
  const auto problem = sdp_problem_from_json(json::parse(read_source(file)));
  const auto sol = solve(problem, solver_config(g));
  const auto j = sdp_solution_to_json(sol, with_x);
  write_output(g, "solution.json", j.dump(2) + "\n");
  print_json(j);
  return sol.status == SolveStatus::Optimal ? 0 : 3;
}

json clique_json(const CompatibilityGraph& gc, const std::vector<std::size_t>& c) {
  json pairs = json::array();
  for (auto v : c) pairs.push_back({gc.partition_of(v), gc.image_of(v)});
  return {{"vertices", c}, {"pairs", std::move(pairs)}};
}

json matrix_json(const SymMatrix& x) {
  json rows = json::array();
  for (std::size_t i = 0; i < x.dim(); ++i) {
    json r = json::array();
    for (std::size_t k = 0; k < x.dim(); ++k) r.push_back(x(i, k));
    rows.push_back(std::move(r));
  }
  return rows;
}

int run_oracle(const Globals& g, const std::string& action, const std::string& a, const std::string& b,
               std::size_t cap, bool multi) {
  const Graph g1 = load_graph(a), g2 = load_graph(b);
  const auto gc = build_compatibility(g1, g2);
  json j;
  j["schema"] = kSchema;
  j["action"] = action;
  j["n"] = gc.n();
  if (action == "max-clique") {
    const auto r = max_clique(gc);
    j["clique_number"] = r.size;
    j["witness"] = clique_json(gc, r.witness);
    j["isomorphic"] = r.size == gc.n();
  } else if (action == "enumerate") {
    const auto cs = enumerate_n_cliques(gc, cap);
    json list = json::array();
    for (const auto& c : cs.cliques) list.push_back(clique_json(gc, c));
    j["count"] = cs.count();
    j["truncated"] = cs.truncated;
    j["cliques"] = std::move(list);
  } else {
    const auto cs = enumerate_n_cliques(gc, multi ? cap : 1);
    if (cs.count() == 0) throw std::runtime_error("no order-n clique: the graphs are not isomorphic");
    SymMatrix x = multi ? build_multiclique_solution(gc, cs).x : build_rank1_solution(gc, cs.cliques.front());
    const double t = static_cast<double>(gc.n());
    const auto fr = check_feasibility(x, gc, t, 1e-10);
    j["cliques_used"] = multi ? cs.count() : 1;
    j["objective"] = sum_of_entries(x);
    j["feasible"] = fr.pass;
    j["min_eigenvalue"] = fr.min_eigenvalue;
    j["X"] = matrix_json(x);
  }
  write_output(g, "oracle.json", j.dump(2) + "\n");
  print_json(j);
  return 0;
}

int run_experiment_cmd(const Globals& g, ExperimentSpec spec, const std::vector<std::string>& families) {
  spec.seed = g.seed;
  spec.decider = decider_config(g);
  if (!families.empty()) {
    spec.families.clear();
    for (const auto& f : families) spec.families.push_back(family_from_string(f));
  }
  if (!g.out_dir.empty()) spec.output_dir = g.out_dir;
  const auto corpus = generate_corpus(spec);
  if (!g.json_out) std::cerr << "running " << corpus.size() << " pairs (seed " << spec.seed << ")\n";
  const auto res = run_experiment(spec, corpus);
  const auto& s = res.summary;
  if (g.json_out) {
    auto j = summary_to_json(s);
    j["ledger"] = ledger_to_json(res.ledger, spec.seed)["records"];
    print_json(j);
  } else {
    std::cout << emit_summary_csv(s);
    std::printf("# labelled %zu, correct %zu, inconclusive %zu, accuracy %.4f, ledger records %zu\n", s.labelled,
                s.correct, s.inconclusive, s.accuracy, res.ledger.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph isomorphism via the compatibility-graph clique relaxation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "Solver gap and feasibility tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tau", g.tau, "Decision threshold (default n^2 - n/2)");
  app.add_flag("--no-prefilter", g.no_prefilter, "Skip the theta prefilter");
  app.add_flag("--no-extraction", g.no_extraction, "Skip mapping extraction");
  app.add_option("--seed", g.seed, "Random seed for experiments");
  app.add_flag("--json", g.json_out, "Print JSON instead of text");
  app.add_option("--out", g.out_dir, "Directory for output files");

  std::string a, b, file, format = "g6", action;
  bool with_x = false, multi = false;
  std::size_t cap = 10000;
  ExperimentSpec spec;
  std::vector<std::string> families;

  auto* check = app.add_subcommand("check", "Decide whether two graphs are isomorphic");
  check->add_option("g1", a, "First graph")->required();
  check->add_option("g2", b, "Second graph")->required();

  auto* compat = app.add_subcommand("compat", "Emit the compatibility graph");
  compat->add_option("g1", a, "First graph")->required();
  compat->add_option("g2", b, "Second graph")->required();
  compat->add_option("--format", format, "g6 or edges")->check(CLI::IsMember({"g6", "edges"}));

  auto* theta = app.add_subcommand("theta", "Lovasz theta of a graph, or the prefilter on a pair");
  theta->add_option("g1", a, "Graph")->required();
  theta->add_option("g2", b, "Second graph: run the prefilter on compat(g1, g2)");

  auto* solve_cmd = app.add_subcommand("solve-sdp", "Solve a JSON SDP problem description");
  solve_cmd->add_option("file", file, "Problem file, or - for stdin")->required();
  solve_cmd->add_flag("--with-x", with_x, "Include X and y in the output");

  auto* oracle = app.add_subcommand("oracle", "Exact clique oracles on the compatibility graph");
  oracle->add_option("action", action, "max-clique, enumerate or build-solution")
      ->required()
      ->check(CLI::IsMember({"max-clique", "enumerate", "build-solution"}));
  oracle->add_option("g1", a, "First graph")->required();
  oracle->add_option("g2", b, "Second graph")->required();
  oracle->add_option("--cap", cap, "Maximum number of cliques to enumerate");
  oracle->add_flag("--multi", multi, "build-solution: use every clique (1/sqrt(d) construction)");

  auto* exp = app.add_subcommand("experiment", "Generate a corpus and run the batch evaluation");
  exp->add_option("--n-min", spec.n_min, "Smallest order");
  exp->add_option("--n-max", spec.n_max, "Largest order");
  exp->add_option("--pairs", spec.pairs_per_n, "Pairs per order and family");
  exp->add_option("--p", spec.edge_probabilities, "Edge probabilities");
  exp->add_option("--family", families, "random-iso, random-noniso, regular-pairs, named");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*check) return run_check(g, a, b);
    if (*compat) return run_compat(g, a, b, format);
    if (*theta) return run_theta(g, a, b);
    if (*solve_cmd) return run_solve(g, file, with_x);
    if (*oracle) return run_oracle(g, action, a, b, cap, multi);
    if (*exp) return run_experiment_cmd(g, spec, families);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
