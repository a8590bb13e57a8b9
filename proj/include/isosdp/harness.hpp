#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "isosdp/decider.hpp"
#include "isosdp/graph.hpp"
#include "isosdp/graph_io.hpp"
#include "isosdp/json_io.hpp"
#include "isosdp/oracle.hpp"

namespace isosdp {

enum class Family { RandomIso, RandomNonIso, RegularPairs, Named };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::RandomIso: return "random-iso";
    case Family::RandomNonIso: return "random-noniso";
    case Family::RegularPairs: return "regular-pairs";
    case Family::Named: return "named";
  }
  return "unknown";
}

inline Family family_from_string(std::string_view s) {
  for (auto f : {Family::RandomIso, Family::RandomNonIso, Family::RegularPairs, Family::Named})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown family '" + std::string(s) + "'");
}

enum class Label { Iso, NonIso, Unknown };

inline std::string_view to_string(Label l) {
  switch (l) {
    case Label::Iso: return "ISO";
    case Label::NonIso: return "NONISO";
    case Label::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

inline Label label_from_string(std::string_view s) {
  for (auto l : {Label::Iso, Label::NonIso, Label::Unknown})
    if (to_string(l) == s) return l;
  throw std::invalid_argument("unknown label '" + std::string(s) + "'");
}

struct ExperimentSpec {
  std::size_t n_min = 3;
  std::size_t n_max = 6;
  std::size_t pairs_per_n = 5;
  std::vector<double> edge_probabilities{0.5};
  std::uint64_t seed = 1;
  std::vector<Family> families{Family::RandomIso, Family::RandomNonIso};
  std::optional<std::filesystem::path> output_dir;
  DeciderConfig decider;

  void validate() const {
    if (n_min == 0 || n_min > n_max) throw std::invalid_argument("need 1 <= n_min <= n_max");
    if (n_max > max_supported_order())
      throw std::invalid_argument("n_max exceeds the supported maximum " + std::to_string(max_supported_order()));
    if (edge_probabilities.empty()) throw std::invalid_argument("edge probability list is empty");
    for (double p : edge_probabilities)
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probabilities must lie in [0, 1]");
  }
};

struct CorpusPair {
  Graph g1;
  Graph g2;
  Label label = Label::Unknown;
  Family family = Family::Named;
  std::string name;
};

/// Degree-preserving rewiring by double-edge swaps: (a,b),(c,d) -> (a,d),(c,b)
/// whenever the new edges are absent and the four endpoints are distinct.
inline Graph degree_preserving_rewire(const Graph& g, std::size_t swaps, std::mt19937_64& rng) {
  const std::size_t n = g.order();
  auto edges = g.edges();
  if (edges.size() < 2) return g;
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (auto [u, v] : edges) adj[u][v] = adj[v][u] = true;
  const std::size_t attempts = 20 * swaps + 20;
  std::size_t done = 0;
  for (std::size_t t = 0; t < attempts && done < swaps; ++t) {
    const std::size_t i = detail::index_draw(rng, edges.size());
    const std::size_t j = detail::index_draw(rng, edges.size());
    if (i == j) continue;
    auto [a, b] = edges[i];
    auto [c, d] = edges[j];
    if (detail::index_draw(rng, 2) == 1) std::swap(c, d);
    if (a == c || a == d || b == c || b == d || adj[a][d] || adj[c][b]) continue;
    adj[a][b] = adj[b][a] = adj[c][d] = adj[d][c] = false;
    adj[a][d] = adj[d][a] = adj[c][b] = adj[b][c] = true;
    edges[i] = {std::min(a, d), std::max(a, d)};
    edges[j] = {std::min(c, b), std::max(c, b)};
    ++done;
  }
  return Graph(n, edges, g.label());
}

/// The fixed named pairs, independent of the n range.
inline std::vector<CorpusPair> named_pairs() {
  std::vector<CorpusPair> out;
  out.push_back({path_graph(3), path_graph(3), Label::Iso, Family::Named, "P3/P3"});
  out.push_back({complete_graph(3), complete_graph(3), Label::Iso, Family::Named, "K3/K3"});
  out.push_back({cycle_graph(6), disjoint_union(cycle_graph(3), cycle_graph(3)), Label::NonIso, Family::Named,
                 "C6/C3+C3"});
  out.push_back({cycle_graph(5), path_graph(5), Label::NonIso, Family::Named, "C5/P5"});
  out.push_back({complete_graph(4), remove_edge(complete_graph(4), 0, 1), Label::NonIso, Family::Named, "K4/K4-e"});
  return out;
}

/// Deterministic corpus: one mt19937_64 stream seeded from spec.seed, walked in
/// (n, family, pair) order. Non-isomorphic candidates are rejected by the
/// oracle when n <= 8; above that they are labelled UNKNOWN.
inline std::vector<CorpusPair> generate_corpus(const ExperimentSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::vector<CorpusPair> out;
  constexpr std::size_t kMaxRetries = 200;

  auto noniso_label = [](std::size_t n) { return n <= kDeskScaleOrder ? Label::NonIso : Label::Unknown; };
  for (std::size_t n = spec.n_min; n <= spec.n_max; ++n) {
    for (Family f : spec.families) {
      if (f == Family::Named) continue;
      for (std::size_t i = 0; i < spec.pairs_per_n; ++i) {
        const double p = spec.edge_probabilities[i % spec.edge_probabilities.size()];
        const std::string name = std::string(to_string(f)) + "/n" + std::to_string(n) + "/" + std::to_string(i);
        if (f == Family::RandomIso) {
          Graph g = random_graph(n, p, rng);
          Graph h = apply_permutation(g, random_permutation(n, rng));
          out.push_back({std::move(g), std::move(h), Label::Iso, f, name});
          continue;
        }
        for (std::size_t attempt = 0; attempt < kMaxRetries; ++attempt) {
          Graph g = random_graph(n, p, rng);
          Graph h = f == Family::RandomNonIso ? random_graph(n, p, rng)
                                              : apply_permutation(degree_preserving_rewire(g, 2 * n, rng),
                                                                  random_permutation(n, rng));
          if (n <= kDeskScaleOrder && are_isomorphic(g, h)) continue;
          out.push_back({std::move(g), std::move(h), noniso_label(n), f, name});
          break;
        }
      }
    }
  }
  for (Family f : spec.families)
    if (f == Family::Named)
      for (auto& pr : named_pairs()) out.push_back(std::move(pr));
  return out;
}

struct CounterexampleRecord {
  std::string g6_1;
  std::string g6_2;
  std::size_t n = 0;
  double value = 0.0;
  std::optional<std::size_t> oracle_clique_number;
  bool oracle_isomorphic = false;
  std::optional<SolverDiagnostics> solver;
  std::uint64_t seed = 0;
  std::string pair;
};

/// A record exists only for an oracle-non-isomorphic pair whose relaxation
/// value exceeds n(n-1) + kGapBoundMargin.
inline std::optional<CounterexampleRecord> maybe_record(const Graph& g1, const Graph& g2, double value,
                                                        bool oracle_isomorphic,
                                                        std::optional<SolverDiagnostics> solver,
                                                        std::uint64_t seed, std::string pair = {}) {
  const double n = static_cast<double>(g1.order());
  if (oracle_isomorphic || !(value > n * (n - 1.0) + kGapBoundMargin)) return std::nullopt;
  CounterexampleRecord r;
  r.g6_1 = emit_graph6(g1);
  r.g6_2 = emit_graph6(g2);
  r.n = g1.order();
  r.value = value;
  if (g1.order() == g2.order() && g1.order() <= kOracleMaxOrder)
    r.oracle_clique_number = max_clique(build_compatibility(g1, g2)).size;
  r.oracle_isomorphic = oracle_isomorphic;
  r.solver = std::move(solver);
  r.seed = seed;
  r.pair = std::move(pair);
  return r;
}

struct SummaryRow {
  std::size_t index = 0;
  std::string name;
  std::string family;
  std::size_t n = 0;
  std::string label;
  std::string g6_1;
  std::string g6_2;
  std::optional<double> value;
  std::string verdict;
  std::optional<double> theta;
  bool extracted = false;
  bool verified = false;
  std::string solver_status;
  std::size_t iterations = 0;
  double time_sdp = 0.0;
  double time_total = 0.0;
  bool correct = false;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct Summary {
  std::uint64_t seed = 0;
  std::vector<SummaryRow> rows;
  std::size_t labelled = 0;
  std::size_t correct = 0;
  std::size_t inconclusive = 0;
  double accuracy = 0.0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

struct ExperimentResult {
  Summary summary;
  std::vector<CounterexampleRecord> ledger;
};

inline bool verdict_matches(Label label, std::string_view verdict) {
  if (label == Label::Iso) return verdict == "IsomorphicCertified" || verdict == "IsomorphicClaimed";
  if (label == Label::NonIso) return verdict == "NonIsomorphicCertified";
  return false;
}

inline void aggregate(Summary& s) {
  s.labelled = s.correct = s.inconclusive = 0;
  for (auto& r : s.rows) {
    if (r.verdict == "Inconclusive") ++s.inconclusive;
    if (r.label == "UNKNOWN") continue;
    ++s.labelled;
    if (r.correct) ++s.correct;
  }
  s.accuracy = s.labelled == 0 ? 0.0 : static_cast<double>(s.correct) / static_cast<double>(s.labelled);
}

// ---------------------------------------------------------------- CSV / JSON

inline constexpr std::string_view kSummaryCsvHeader =
    "index,name,family,n,label,g6_1,g6_2,value,verdict,theta,extracted,verified,solver_status,iterations,time_sdp,"
    "time_total,correct";

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); }

inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

inline std::size_t parse_size(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return static_cast<std::size_t>(v);
}

inline bool parse_bool(const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw std::invalid_argument("bad flag '" + s + "'");
}

}  // namespace detail

/// Seed goes in a leading comment line so the CSV stays rectangular.
inline std::string emit_summary_csv(const Summary& s) {
  std::ostringstream os;
  os << "# schema=" << kSchema << " seed=" << s.seed << "\n" << kSummaryCsvHeader << "\n";
  for (const auto& r : s.rows) {
    os << r.index << ',' << r.name << ',' << r.family << ',' << r.n << ',' << r.label << ',' << r.g6_1 << ','
       << r.g6_2 << ',' << detail::fmt_opt(r.value) << ',' << r.verdict << ',' << detail::fmt_opt(r.theta) << ','
       << r.extracted << ',' << r.verified << ',' << r.solver_status << ',' << r.iterations << ','
       << detail::fmt17(r.time_sdp) << ',' << detail::fmt17(r.time_total) << ',' << r.correct << "\n";
  }
  return os.str();
}

inline Summary parse_summary_csv(std::string_view text) {
  Summary s;
  std::istringstream is{std::string(text)};
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("seed=");
      if (pos != std::string::npos) s.seed = std::stoull(line.substr(pos + 5));
      continue;
    }
    if (!header) {
      if (line != kSummaryCsvHeader) throw std::invalid_argument("unexpected CSV header");
      header = true;
      continue;
    }
    const auto f = detail::split_csv(line);
    if (f.size() != 17)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 17 fields, got " +
                                  std::to_string(f.size()));
    SummaryRow r;
    r.index = detail::parse_size(f[0]);
    r.name = f[1];
    r.family = f[2];
    r.n = detail::parse_size(f[3]);
    r.label = f[4];
    r.g6_1 = f[5];
    r.g6_2 = f[6];
    if (!f[7].empty()) r.value = detail::parse_double(f[7]);
    r.verdict = f[8];
    if (!f[9].empty()) r.theta = detail::parse_double(f[9]);
    r.extracted = detail::parse_bool(f[10]);
    r.verified = detail::parse_bool(f[11]);
    r.solver_status = f[12];
    r.iterations = detail::parse_size(f[13]);
    r.time_sdp = detail::parse_double(f[14]);
    r.time_total = detail::parse_double(f[15]);
    r.correct = detail::parse_bool(f[16]);
    s.rows.push_back(std::move(r));
  }
  if (!header) throw std::invalid_argument("missing CSV header");
  aggregate(s);
  return s;
}

inline json summary_to_json(const Summary& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"index", r.index},
                    {"name", r.name},
                    {"family", r.family},
                    {"n", r.n},
                    {"label", r.label},
                    {"g6_1", r.g6_1},
                    {"g6_2", r.g6_2},
                    {"value", detail::optional_number(r.value)},
                    {"verdict", r.verdict},
                    {"theta", detail::optional_number(r.theta)},
                    {"extracted", r.extracted},
                    {"verified", r.verified},
                    {"solver_status", r.solver_status},
                    {"iterations", r.iterations},
                    {"time_sdp", r.time_sdp},
                    {"time_total", r.time_total},
                    {"correct", r.correct}});
  }
  return {{"schema", kSchema},       {"seed", s.seed},
          {"labelled", s.labelled},  {"correct", s.correct},
          {"inconclusive", s.inconclusive}, {"accuracy", s.accuracy},
          {"rows", std::move(rows)}};
}

inline Summary summary_from_json(const json& j) {
  detail::require_schema(j);
  Summary s;
  s.seed = j.at("seed").get<std::uint64_t>();
  auto opt = [](const json& v) -> std::optional<double> {
    return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  };
  for (const auto& e : j.at("rows")) {
    SummaryRow r;
    r.index = e.at("index").get<std::size_t>();
    r.name = e.at("name").get<std::string>();
    r.family = e.at("family").get<std::string>();
    r.n = e.at("n").get<std::size_t>();
    r.label = e.at("label").get<std::string>();
    r.g6_1 = e.at("g6_1").get<std::string>();
    r.g6_2 = e.at("g6_2").get<std::string>();
    r.value = opt(e.at("value"));
    r.verdict = e.at("verdict").get<std::string>();
    r.theta = opt(e.at("theta"));
    r.extracted = e.at("extracted").get<bool>();
    r.verified = e.at("verified").get<bool>();
    r.solver_status = e.at("solver_status").get<std::string>();
    r.iterations = e.at("iterations").get<std::size_t>();
    r.time_sdp = e.at("time_sdp").get<double>();
    r.time_total = e.at("time_total").get<double>();
    r.correct = e.at("correct").get<bool>();
    s.rows.push_back(std::move(r));
  }
  aggregate(s);
  return s;
}

inline json ledger_to_json(const std::vector<CounterexampleRecord>& ledger, std::uint64_t seed) {
  json records = json::array();
  for (const auto& r : ledger) {
    records.push_back({{"g6_1", r.g6_1},
                       {"g6_2", r.g6_2},
                       {"n", r.n},
                       {"value", r.value},
                       {"bound", static_cast<double>(r.n) * (static_cast<double>(r.n) - 1.0)},
                       {"oracle_clique_number", r.oracle_clique_number ? json(*r.oracle_clique_number) : json(nullptr)},
                       {"oracle_isomorphic", r.oracle_isomorphic},
                       {"solver", r.solver ? solver_diagnostics_to_json(*r.solver) : json(nullptr)},
                       {"seed", r.seed},
                       {"pair", r.pair}});
  }
  return {{"schema", kSchema}, {"seed", seed}, {"margin", kGapBoundMargin}, {"records", std::move(records)}};
}

// ---------------------------------------------------------------- running

/// Decides every pair in index order. A pair that throws becomes an
/// Inconclusive row; the batch never aborts. Outputs go to spec.output_dir
/// when set.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const std::vector<CorpusPair>& corpus) {
  ExperimentResult res;
  res.summary.seed = spec.seed;
  DeciderConfig cfg = spec.decider;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& pr = corpus[i];
    SummaryRow row;
    row.index = i;
    row.name = pr.name;
    row.family = std::string(to_string(pr.family));
    row.n = pr.g1.order();
    row.label = std::string(to_string(pr.label));
    row.g6_1 = emit_graph6(pr.g1);
    row.g6_2 = emit_graph6(pr.g2);
    try {
      const auto rep = decide(pr.g1, pr.g2, cfg);
      row.value = rep.value;
      row.verdict = std::string(to_string(rep.verdict));
      row.theta = rep.theta;
      row.extracted = rep.mapping.has_value();
      row.verified = rep.verified;
      row.solver_status = rep.solver ? std::string(to_string(rep.solver->status)) : std::string("none");
      row.iterations = rep.solver ? rep.solver->iterations : 0;
      row.time_sdp = rep.times.sdp;
      row.time_total = rep.times.total;
      std::optional<bool> iso = rep.oracle_isomorphic;
      if (!iso && pr.label != Label::Unknown) iso = pr.label == Label::Iso;
      if (rep.value && iso) {
        if (auto rec = maybe_record(pr.g1, pr.g2, *rep.value, *iso, rep.solver, spec.seed, pr.name))
          res.ledger.push_back(std::move(*rec));
      }
    } catch (const std::exception& e) {
      row.verdict = std::string(to_string(Verdict::Inconclusive));
      row.solver_status = std::string("error: ") + e.what();
      for (auto& ch : row.solver_status)
        if (ch == ',' || ch == '\n') ch = ';';
    }
    row.correct = verdict_matches(pr.label, row.verdict);
    res.summary.rows.push_back(std::move(row));
  }
  aggregate(res.summary);

  if (spec.output_dir) {
    std::filesystem::create_directories(*spec.output_dir);
    auto write = [&](const char* name, const std::string& text) {
      std::ofstream f(*spec.output_dir / name, std::ios::binary);
      if (!f) throw std::runtime_error(std::string("cannot write ") + name);
      f << text;
    };
    write("summary.csv", emit_summary_csv(res.summary));
    write("summary.json", summary_to_json(res.summary).dump(2) + "\n");
    write("ledger.json", ledger_to_json(res.ledger, spec.seed).dump(2) + "\n");
  }
  return res;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec) { return run_experiment(spec, generate_corpus(spec)); }

}  // namespace isosdp
