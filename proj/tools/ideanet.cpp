// ideanet: creative-ideation metrics, network simulation and analysis CLI.
//
// Exit codes: 0 success, 1 usage, 2 parse error, 3 domain/config error.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ideanet/csv.hpp"
#include "ideanet/errors.hpp"
#include "ideanet/metrics.hpp"
#include "ideanet/semantics.hpp"
#include "ideanet/simnet.hpp"
#include "ideanet/stats.hpp"
#include "ideanet/svg.hpp"
#include "ideanet/taxonomy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ideanet;

namespace {

constexpr const char* kVersion = "0.1.0";

bool g_quiet = false;

void warn(const std::string& msg) {
  if (!g_quiet) std::cerr << "warning: " << msg << "\n";
}

std::string iso_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct Manifest {
  std::string command;
  json inputs = json::object();
  json overrides = json::object();
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string started = iso_now();

  void write(const fs::path& dir) const {
    json m;
    m["command"] = command;
    m["inputs"] = inputs;
    m["overrides"] = overrides;
    m["output_dir"] = out_dir;
    m["seed"] = seed;
    m["tool_version"] = kVersion;
    m["started"] = started;
    m["finished"] = iso_now();
    write_text_atomic(dir / (command + "_manifest.json"), m.dump(2) + "\n");
  }
};

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

std::set<std::string> resolve_stopwords(const std::string& flag_path) {
  if (!flag_path.empty()) return load_stopwords(flag_path);
  if (const char* env = std::getenv("IDEANET_STOPWORDS"); env && *env)
    return load_stopwords(env);
  return builtin_stopwords();
}

// Pool selector "trial=K,round=P,condition=X"; empty keeps everything.
std::vector<IdeaRecord> apply_selector(const std::vector<IdeaRecord>& records,
                                       const std::string& selector) {
  if (selector.empty()) return records;
  std::map<std::string, std::string> filters;
  for (const auto& clause : split(selector, ',')) {
    auto eq = clause.find('=');
    if (eq == std::string::npos)
      throw DomainError("bad pool selector clause: " + clause);
    filters[clause.substr(0, eq)] = clause.substr(eq + 1);
  }
  std::vector<IdeaRecord> out;
  for (const auto& r : records) {
    bool keep = true;
    for (const auto& [key, value] : filters) {
      if (key == "trial")
        keep = keep && r.trial == value;
      else if (key == "round")
        keep = keep && std::to_string(r.round) == value;
      else if (key == "condition")
        keep = keep && r.condition == value;
      else if (key == "participant")
        keep = keep && r.participant == value;
      else if (key == "turn")
        keep = keep && std::to_string(r.turn) == value;
      else
        throw DomainError("unknown pool selector key: " + key);
    }
    if (keep) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------- quotient

int cmd_quotient(const std::string& ideas_path, const std::string& taxonomy_path,
                 const std::string& out, bool dedup_group_concepts) {
  auto records = load_ideas_csv(ideas_path);
  auto taxonomy = Taxonomy::load(taxonomy_path);
  if (records.empty()) warn("no idea records; emitting empty report");
  auto q = accumulate_q(records, taxonomy, !dedup_group_concepts);
  for (const auto& idea : q.skipped)
    warn("idea " + idea + " has no concepts; excluded from Q");

  std::ostringstream csv;
  csv << "kind,subject,round,q\n";
  for (const auto& [key, value] : q.per_round)
    csv << "round," << csv_escape(key.first) << "," << key.second << ","
        << format_real(value) << "\n";
  for (const auto& [participant, value] : q.totals)
    csv << "total," << csv_escape(participant) << ",," << format_real(value) << "\n";
  for (const auto& [key, value] : q.group_per_round)
    csv << "group_round," << csv_escape(key.first) << "," << key.second << ","
        << format_real(value) << "\n";
  for (const auto& [group, value] : q.group_totals)
    csv << "group_total," << csv_escape(group) << ",," << format_real(value) << "\n";

  auto dir = ensure_out_dir(out);
  write_text_atomic(dir / "quotient.csv", csv.str());
  Manifest manifest{"quotient"};
  manifest.inputs["ideas"] = ideas_path;
  manifest.inputs["taxonomy"] = taxonomy_path;
  manifest.out_dir = dir.string();
  manifest.write(dir);
  return 0;
}

// ------------------------------------------------------------ nonredundant

int cmd_nonredundant(const std::string& ideas_path, int threshold,
                     const std::string& selector, bool group_only,
                     const std::string& out) {
  auto records = apply_selector(load_ideas_csv(ideas_path), selector);
  auto counts = nonredundant_counts(records, threshold);

  std::ostringstream csv;
  csv << "scope,participant,count\n";
  if (!group_only)
    for (const auto& [participant, count] : counts.per_participant)
      csv << "participant," << csv_escape(participant) << "," << count << "\n";
  csv << "group,," << counts.group_count << "\n";

  auto dir = ensure_out_dir(out);
  write_text_atomic(dir / "nonredundant.csv", csv.str());
  Manifest manifest{"nonredundant"};
  manifest.inputs["ideas"] = ideas_path;
  manifest.overrides["threshold"] = threshold;
  manifest.overrides["pool"] = selector;
  manifest.out_dir = dir.string();
  manifest.write(dir);
  return 0;
}

// ----------------------------------------------------------------- jaccard

std::set<std::string> load_id_set(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open id set file: " + path.string());
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) ids.insert(line);
  }
  return ids;
}

int cmd_jaccard(const std::string& a_path, const std::string& b_path) {
  double j = jaccard(load_id_set(a_path), load_id_set(b_path));
  std::cout << format_real(j) << "\n";
  return 0;
}

// --------------------------------------------------------------------- wmd

int cmd_wmd(const std::string& docs_path, const std::string& pairs_path,
            const std::string& embeddings_path, const std::string& stopwords_path,
            const std::string& out) {
  auto stopwords = resolve_stopwords(stopwords_path);
  auto table = EmbeddingTable::load(embeddings_path);

  auto doc_rows = read_csv(docs_path);
  if (doc_rows.empty() || doc_rows[0] != std::vector<std::string>{"node", "text"})
    throw ParseError(docs_path + ": expected header node,text");
  std::map<std::string, std::vector<std::string>> docs;
  for (std::size_t i = 1; i < doc_rows.size(); ++i) {
    if (doc_rows[i].size() != 2)
      throw ParseError(docs_path + ": row " + std::to_string(i + 1) +
                       ": wrong field count");
    docs[doc_rows[i][0]] = preprocess(doc_rows[i][1], stopwords);
  }

  auto pair_rows = read_csv(pairs_path);
  if (pair_rows.empty() ||
      pair_rows[0] != std::vector<std::string>{"node_a", "node_b"})
    throw ParseError(pairs_path + ": expected header node_a,node_b");
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 1; i < pair_rows.size(); ++i)
    pairs.emplace_back(pair_rows[i][0], pair_rows[i][1]);

  auto results = pairwise_dissimilarity(docs, pairs, table);
  std::ostringstream csv;
  csv << "node_a,node_b,wmd\n";
  for (const auto& r : results) {
    csv << csv_escape(r.a) << "," << csv_escape(r.b) << ",";
    if (r.ok)
      csv << format_real(r.value);
    else
      warn("pair (" + r.a + "," + r.b + ") " + r.note);
    csv << "\n";
  }

  auto dir = ensure_out_dir(out);
  write_text_atomic(dir / "wmd.csv", csv.str());
  Manifest manifest{"wmd"};
  manifest.inputs["docs"] = docs_path;
  manifest.inputs["pairs"] = pairs_path;
  manifest.inputs["embeddings"] = embeddings_path;
  manifest.out_dir = dir.string();
  manifest.write(dir);
  return 0;
}

// ----------------------------------------------------------------- project

int cmd_project(const std::string& networks_path, const std::string& out) {
  auto rows = read_csv(networks_path);
  const std::vector<std::string> expect = {"trial", "round", "ego", "alter"};
  if (rows.empty() || rows[0] != expect)
    throw ParseError(networks_path + ": expected header trial,round,ego,alter");
  // (trial, round) -> ego -> alters
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, std::set<std::string>>>
      nets;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 4)
      throw ParseError(networks_path + ": row " + std::to_string(i + 1) +
                       ": wrong field count");
    nets[{rows[i][0], rows[i][1]}][rows[i][2]].insert(rows[i][3]);
  }

  std::ostringstream csv;
  csv << "trial,round,ego_a,ego_b,weight\n";
  for (const auto& [key, egos] : nets) {
    for (auto ia = egos.begin(); ia != egos.end(); ++ia)
      for (auto ib = std::next(ia); ib != egos.end(); ++ib) {
        int weight = 0;
        for (const auto& alter : ia->second) weight += int(ib->second.count(alter));
        csv << csv_escape(key.first) << "," << key.second << ","
            << csv_escape(ia->first) << "," << csv_escape(ib->first) << ","
            << weight << "\n";
      }
  }

  auto dir = ensure_out_dir(out);
  write_text_atomic(dir / "projection.csv", csv.str());
  Manifest manifest{"project"};
  manifest.inputs["networks"] = networks_path;
  manifest.out_dir = dir.string();
  manifest.write(dir);
  return 0;
}

// ---------------------------------------------------------------- simulate

sim::SimConfig parse_sim_config(const std::string& config_path,
                                const std::vector<std::string>& overrides,
                                std::vector<sim::StimFn>& fns,
                                std::vector<sim::Redundancy>& regimes) {
  sim::SimConfig cfg;
  fns = {cfg.stim_fn};
  regimes = {cfg.redundancy};

  auto apply = [&](const std::string& key, const std::string& value) {
    auto as_int = [&] {
      try {
        return std::stoi(value);
      } catch (const std::exception&) {
        throw ParseError("config key " + key + ": not an integer: " + value);
      }
    };
    auto as_real = [&] {
      try {
        return std::stod(value);
      } catch (const std::exception&) {
        throw ParseError("config key " + key + ": not a number: " + value);
      }
    };
    if (key == "m") cfg.m = as_int();
    else if (key == "n") cfg.n = as_int();
    else if (key == "ideas_per_alter") cfg.ideas_per_alter = as_int();
    else if (key == "pool1_size") cfg.pool1_size = as_int();
    else if (key == "pool2_size") cfg.pool2_size = as_int();
    else if (key == "slope_k") cfg.slope_k = as_real();
    else if (key == "instances") cfg.instances = as_int();
    else if (key == "runs_per_instance") cfg.runs_per_instance = as_int();
    else if (key == "threshold") cfg.threshold = as_int();
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "p1") cfg.p1 = as_real();
    else if (key == "p2") cfg.p2 = as_real();
    else if (key == "p3") cfg.p3 = as_real();
    else if (key == "stim_fn") {
      if (value == "all")
        fns = {sim::StimFn::sublinear, sim::StimFn::linear, sim::StimFn::superlinear};
      else
        fns = {sim::stim_fn_from_string(value)};
    } else if (key == "redundancy") {
      if (value == "all")
        regimes = {sim::Redundancy::none, sim::Redundancy::full};
      else
        regimes = {sim::redundancy_from_string(value)};
    } else if (key == "p_r_grid") {
      cfg.p_r_grid.clear();
      for (const auto& tok : split(value, ','))
        if (!tok.empty()) cfg.p_r_grid.push_back(std::stod(tok));
    } else {
      throw ParseError("unknown config key: " + key);
    }
  };

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ParseError("cannot open config file: " + config_path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        auto last = s.find_last_not_of(" \t");
        s.erase(last == std::string::npos ? 0 : last + 1);
        return s;
      };
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError(config_path + ":" + std::to_string(lineno) +
                         ": expected key = value");
      apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  // CLI --set pairs override the config file.
  for (const auto& kv : overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw DomainError("--set expects key=value: " + kv);
    apply(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int cmd_simulate(const std::string& config_path,
                 const std::vector<std::string>& overrides, const std::string& out,
                 bool emit_svg, int threads, std::optional<std::uint64_t> seed) {
  std::vector<sim::StimFn> fns;
  std::vector<sim::Redundancy> regimes;
  sim::SimConfig base = parse_sim_config(config_path, overrides, fns, regimes);
  if (seed) base.seed = *seed;

  std::ostringstream records_csv, aggregate_csv;
  records_csv << "stim_fn,redundancy,p_r,instance,run,count\n";
  aggregate_csv << "stim_fn,redundancy,p_r,mean,std,ci_lo,ci_hi\n";

  std::map<std::pair<sim::Redundancy, sim::StimFn>, sim::SimResult> results;
  for (sim::StimFn fn : fns)
    for (sim::Redundancy regime : regimes) {
      sim::SimConfig cfg = base;
      cfg.stim_fn = fn;
      cfg.redundancy = regime;
      auto result = sim::run_sweep(cfg, threads);
      for (const auto& rec : result.records)
        records_csv << to_string(fn) << "," << to_string(regime) << ","
                    << format_real(rec.p_r) << "," << rec.instance << ","
                    << rec.run << "," << rec.count << "\n";
      for (const auto& agg : result.aggregates)
        aggregate_csv << to_string(fn) << "," << to_string(regime) << ","
                      << format_real(agg.p_r) << "," << format_real(agg.mean)
                      << "," << format_real(agg.stddev) << ","
                      << format_real(agg.ci_lo) << "," << format_real(agg.ci_hi)
                      << "\n";
      results[{regime, fn}] = std::move(result);
    }

  auto dir = ensure_out_dir(out);
  write_text_atomic(dir / "records.csv", records_csv.str());
  write_text_atomic(dir / "aggregate.csv", aggregate_csv.str());

  if (emit_svg) {
    // One panel per (stim_fn row, redundancy column).
    std::vector<svg::Panel> panels;
    for (sim::StimFn fn : fns)
      for (sim::Redundancy regime : regimes) {
        const auto& result = results.at({regime, fn});
        svg::Panel panel;
        panel.title = std::string(to_string(fn)) + ", " + to_string(regime) +
                      " redundancy";
        panel.x_label = "rewiring probability";
        panel.y_label = "collective non-redundant count";
        svg::Series series;
        series.label = "mean";
        series.color = regime == sim::Redundancy::none ? "steelblue" : "firebrick";
        for (const auto& agg : result.aggregates) {
          series.x.push_back(agg.p_r);
          series.y.push_back(agg.mean);
          series.ci_lo.push_back(agg.ci_lo);
          series.ci_hi.push_back(agg.ci_hi);
        }
        panel.series.push_back(std::move(series));
        panels.push_back(std::move(panel));
      }
    write_text_atomic(dir / "sweep.svg",
                      svg::render_panels(panels, int(regimes.size())));
  }

  Manifest manifest{"simulate"};
  manifest.inputs["config"] = config_path;
  manifest.overrides["set"] = overrides;
  manifest.seed = base.seed;
  manifest.out_dir = dir.string();
  manifest.write(dir);
  return 0;
}

// ----------------------------------------------------------------- regress

void append_regression_csv(std::ostringstream& csv,
                           const stats::RegressionResult& fit) {
  csv << "term,beta,se,t,p\n";
  for (const auto& term : fit.terms)
    csv << csv_escape(term.name) << "," << format_real(term.beta) << ","
        << format_real(term.se) << "," << format_real(term.t) << ","
        << format_real(term.p) << "\n";
  csv << "R2," << format_real(fit.r2) << ",,,\n";
  csv << "adj_R2," << format_real(fit.adj_r2) << ",,,\n";
}

int cmd_regress(const std::string& input_path, const std::string& out) {
  auto rows = read_csv(input_path);
  const std::vector<std::string> expect = {"trial",          "alter", "followers_frac",
                                           "u_rel",          "r_rel", "q_rel"};
  if (rows.empty() || rows[0] != expect)
    throw ParseError(input_path +
                     ": expected header trial,alter,followers_frac,u_rel,r_rel,q_rel");
  std::vector<double> y, u, r, q;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != expect.size())
      throw ParseError(input_path + ": row " + std::to_string(i + 1) +
                       ": wrong field count");
    try {
      y.push_back(std::stod(rows[i][2]));
      u.push_back(std::stod(rows[i][3]));
      r.push_back(std::stod(rows[i][4]));
      q.push_back(std::stod(rows[i][5]));
    } catch (const std::exception&) {
      throw ParseError(input_path + ": row " + std::to_string(i + 1) +
                       ": non-numeric value");
    }
  }
  auto fit = stats::ols_standardized(y, {{"u_rel", u}, {"r_rel", r}, {"q_rel", q}});
  std::ostringstream csv;
  append_regression_csv(csv, fit);
  auto dir = ensure_out_dir(out);
  write_text_atomic(dir / "regression.csv", csv.str());
  Manifest manifest{"regress"};
  manifest.inputs["input"] = input_path;
  manifest.out_dir = dir.string();
  manifest.write(dir);
  return 0;
}

// ------------------------------------------------------------------- ttest

int cmd_ttest(const std::string& input_path, bool welch, int comparisons,
              const std::string& out) {
  auto rows = read_csv(input_path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"group", "value"})
    throw ParseError(input_path + ": expected header group,value");
  std::map<std::string, std::vector<double>> groups;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2)
      throw ParseError(input_path + ": row " + std::to_string(i + 1) +
                       ": wrong field count");
    try {
      groups[rows[i][0]].push_back(std::stod(rows[i][1]));
    } catch (const std::exception&) {
      throw ParseError(input_path + ": row " + std::to_string(i + 1) +
                       ": non-numeric value");
    }
  }
  if (groups.size() < 2) throw DomainError("t-test needs at least 2 groups");

  std::ostringstream csv;
  csv << "name,statistic,df,p,p_bonferroni,ci_lo,ci_hi\n";
  int pairs = 0;
  for (auto ia = groups.begin(); ia != groups.end(); ++ia)
    for (auto ib = std::next(ia); ib != groups.end(); ++ib) ++pairs;
  int k = comparisons > 0 ? comparisons : pairs;
  for (auto ia = groups.begin(); ia != groups.end(); ++ia)
    for (auto ib = std::next(ia); ib != groups.end(); ++ib) {
      auto result = stats::pooled_ttest(ia->second, ib->second, welch);
      csv << csv_escape(ia->first + "_vs_" + ib->first) << ","
          << format_real(result.statistic) << "," << format_real(result.df)
          << "," << format_real(result.p_two_tailed) << ","
          << format_real(stats::bonferroni(result.p_two_tailed, k)) << ","
          << format_real(result.ci_lo) << "," << format_real(result.ci_hi)
          << "\n";
    }
  auto dir = ensure_out_dir(out);
  write_text_atomic(dir / "ttest.csv", csv.str());
  Manifest manifest{"ttest"};
  manifest.inputs["input"] = input_path;
  manifest.overrides["welch"] = welch;
  manifest.overrides["comparisons"] = k;
  manifest.out_dir = dir.string();
  manifest.write(dir);
  return 0;
}

// --------------------------------------------------------------- agreement

int cmd_agreement(const std::string& input_path, const std::string& out) {
  // Matrix CSV: first column = target/unit id, remaining columns = raters.
  // Empty cells mark missing ratings (Krippendorff handles them; ICC needs
  // a complete matrix).
  auto rows = read_csv(input_path);
  if (rows.size() < 2 || rows[0].size() < 3)
    throw ParseError(input_path + ": expected id column plus >= 2 rater columns");
  std::vector<std::vector<std::optional<double>>> units;
  bool complete = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw ParseError(input_path + ": row " + std::to_string(i + 1) +
                       ": wrong field count");
    std::vector<std::optional<double>> unit;
    for (std::size_t j = 1; j < rows[i].size(); ++j) {
      if (rows[i][j].empty()) {
        unit.push_back(std::nullopt);
        complete = false;
      } else {
        try {
          unit.push_back(std::stod(rows[i][j]));
        } catch (const std::exception&) {
          throw ParseError(input_path + ": row " + std::to_string(i + 1) +
                           ": non-numeric rating");
        }
      }
    }
    units.push_back(std::move(unit));
  }

  std::ostringstream csv;
  csv << "metric,value\n";
  if (complete) {
    std::vector<std::vector<double>> matrix;
    for (const auto& unit : units) {
      std::vector<double> row;
      for (const auto& v : unit) row.push_back(*v);
      matrix.push_back(std::move(row));
    }
    auto icc = stats::icc_3k(matrix);
    csv << "icc_3k," << (icc ? format_real(*icc) : "undefined") << "\n";
  } else {
    warn("incomplete matrix; ICC(3,k) skipped");
  }
  auto alpha = stats::krippendorff_alpha_interval(units);
  csv << "krippendorff_alpha," << (alpha ? format_real(*alpha) : "undefined")
      << "\n";

  auto dir = ensure_out_dir(out);
  write_text_atomic(dir / "agreement.csv", csv.str());
  Manifest manifest{"agreement"};
  manifest.inputs["input"] = input_path;
  manifest.out_dir = dir.string();
  manifest.write(dir);
  return 0;
}

// ----------------------------------------------------------------- analyze

int cmd_analyze(const std::string& ideas_path, const std::string& ratings_path,
                const std::string& networks_path, const std::string& embeddings_path,
                const std::string& taxonomy_path, const std::string& stopwords_path,
                const std::string& out) {
  auto dir = ensure_out_dir(out);
  auto records = load_ideas_csv(ideas_path);
  auto stopwords = resolve_stopwords(stopwords_path);
  auto table = EmbeddingTable::load(embeddings_path);

  // Network snapshots: (trial, round) -> ego -> alters.
  auto net_rows = read_csv(networks_path);
  const std::vector<std::string> net_expect = {"trial", "round", "ego", "alter"};
  if (net_rows.empty() || net_rows[0] != net_expect)
    throw ParseError(networks_path + ": expected header trial,round,ego,alter");
  std::map<std::pair<std::string, int>, std::map<std::string, std::set<std::string>>>
      nets;
  for (std::size_t i = 1; i < net_rows.size(); ++i) {
    if (net_rows[i].size() != 4)
      throw ParseError(networks_path + ": row " + std::to_string(i + 1) +
                       ": wrong field count");
    int round;
    try {
      round = std::stoi(net_rows[i][1]);
    } catch (const std::exception&) {
      throw ParseError(networks_path + ": row " + std::to_string(i + 1) +
                       ": non-integer round");
    }
    nets[{net_rows[i][0], round}][net_rows[i][2]].insert(net_rows[i][3]);
  }

  // Documents: concatenated turn-2 texts per (trial, round, ego).
  std::map<std::tuple<std::string, int, std::string>, std::string> doc_text;
  for (const auto& r : records)
    if (r.turn == 2) {
      auto& text = doc_text[{r.trial, r.round, r.participant}];
      if (!text.empty()) text += " ";
      text += r.text;
    }

  // Pair rows: projection weight + WMD per ego pair per snapshot.
  std::ostringstream pairs_csv;
  pairs_csv << "trial,round,ego_a,ego_b,common_alters,wmd\n";
  std::map<int, std::vector<double>> wmd_by_common;
  for (const auto& [key, egos] : nets) {
    const auto& [trial, round] = key;
    for (auto ia = egos.begin(); ia != egos.end(); ++ia)
      for (auto ib = std::next(ia); ib != egos.end(); ++ib) {
        int common = 0;
        for (const auto& alter : ia->second) common += int(ib->second.count(alter));
        pairs_csv << csv_escape(trial) << "," << round << ","
                  << csv_escape(ia->first) << "," << csv_escape(ib->first) << ","
                  << common << ",";
        auto da = doc_text.find({trial, round, ia->first});
        auto db = doc_text.find({trial, round, ib->first});
        if (da == doc_text.end() || db == doc_text.end()) {
          warn("no turn-2 text for pair (" + ia->first + "," + ib->first +
               ") in trial " + trial + " round " + std::to_string(round));
        } else {
          try {
            double d = wmd(preprocess(da->second, stopwords),
                           preprocess(db->second, stopwords), table);
            pairs_csv << format_real(d);
            wmd_by_common[common].push_back(d);
          } catch (const UndefinedDistance&) {
            warn("undefined WMD for pair (" + ia->first + "," + ib->first + ")");
          }
        }
        pairs_csv << "\n";
      }
  }
  write_text_atomic(dir / "analyze_pairs.csv", pairs_csv.str());

  // Common-alter group comparisons with Bonferroni over the 3 pairings.
  std::ostringstream tests_csv;
  tests_csv << "name,statistic,df,p,p_bonferroni,ci_lo,ci_hi\n";
  const std::vector<std::pair<int, int>> comparisons = {{2, 0}, {2, 1}, {1, 0}};
  for (const auto& [ca, cb] : comparisons) {
    auto ia = wmd_by_common.find(ca);
    auto ib = wmd_by_common.find(cb);
    if (ia == wmd_by_common.end() || ib == wmd_by_common.end() ||
        ia->second.size() < 2 || ib->second.size() < 2) {
      warn("not enough WMD values to compare " + std::to_string(ca) + " vs " +
           std::to_string(cb) + " common alters");
      continue;
    }
    auto result = stats::pooled_ttest(ia->second, ib->second);
    tests_csv << "wmd_common" << ca << "_vs_common" << cb << ","
              << format_real(result.statistic) << "," << format_real(result.df)
              << "," << format_real(result.p_two_tailed) << ","
              << format_real(stats::bonferroni(result.p_two_tailed, 3)) << ","
              << format_real(result.ci_lo) << "," << format_real(result.ci_hi)
              << "\n";
  }
  write_text_atomic(dir / "analyze_tests.csv", tests_csv.str());

  // Regression: alter popularity vs relative performance markers.
  bool regression_done = false;
  if (ratings_path.empty()) {
    warn("no ratings file; regression skipped");
  } else if (taxonomy_path.empty()) {
    warn("no taxonomy file; regression skipped");
  } else {
    auto ratings = load_ratings_csv(ratings_path);
    auto taxonomy = Taxonomy::load(taxonomy_path);

    // y_i: follower fraction at the final snapshot round per trial.
    std::map<std::string, int> last_round;
    for (const auto& [key, egos] : nets)
      last_round[key.first] = std::max(last_round[key.first], key.second);
    // trial -> alter -> followers
    std::map<std::string, std::map<std::string, int>> followers;
    std::map<std::string, int> trial_egos;
    for (const auto& [key, egos] : nets) {
      if (key.second != last_round[key.first]) continue;
      trial_egos[key.first] = int(egos.size());
      for (const auto& [ego, alters] : egos)
        for (const auto& alter : alters) ++followers[key.first][alter];
    }

    // Alter performance from their idea records.
    std::vector<IdeaRecord> alter_records;
    for (const auto& r : records)
      if (r.condition == "alter") alter_records.push_back(r);

    // u_i: non-redundant counts, threshold 1, round-wise pools, summed.
    std::map<std::pair<std::string, std::string>, double> u_total;  // (trial, alter)
    {
      std::map<std::pair<std::string, int>, std::vector<IdeaRecord>> pools;
      for (const auto& r : alter_records) pools[{r.trial, r.round}].push_back(r);
      for (const auto& [key, pool] : pools) {
        auto counts = nonredundant_counts(pool, 1);
        for (const auto& [alter, count] : counts.per_participant)
          u_total[{key.first, alter}] += count;
      }
    }

    auto q = accumulate_q(alter_records, taxonomy);
    std::map<std::string, std::vector<std::string>> ideas_by_alter;
    std::map<std::string, std::string> trial_of_alter;
    for (const auto& r : alter_records) {
      ideas_by_alter[r.participant].push_back(r.idea_id);
      trial_of_alter[r.participant] = r.trial;
    }
    auto novelty = average_novelty(ratings, ideas_by_alter);
    for (const auto& idea : novelty.unrated) warn("unrated idea: " + idea);

    // Assemble per-trial vectors, normalize within trial, then pool.
    std::map<std::string, std::vector<std::string>> alters_by_trial;
    for (const auto& [alter, trial] : trial_of_alter)
      alters_by_trial[trial].push_back(alter);

    std::vector<double> y, u_rel, r_rel, q_rel;
    std::ostringstream input_csv;
    input_csv << "trial,alter,followers_frac,u_rel,r_rel,q_rel\n";
    for (auto& [trial, alters] : alters_by_trial) {
      std::sort(alters.begin(), alters.end());
      std::vector<double> u_raw, r_raw, q_raw, y_raw;
      bool ok = true;
      for (const auto& alter : alters) {
        u_raw.push_back(u_total.count({trial, alter}) ? u_total[{trial, alter}] : 0.0);
        auto rit = novelty.per_participant.find(alter);
        auto qit = q.totals.find(alter);
        if (rit == novelty.per_participant.end() || qit == q.totals.end()) {
          warn("missing ratings or Q for alter " + alter + "; trial " + trial +
               " excluded from regression");
          ok = false;
          break;
        }
        r_raw.push_back(rit->second);
        q_raw.push_back(qit->second);
        int egos = trial_egos.count(trial) ? trial_egos[trial] : 0;
        int follow = followers.count(trial) ? followers[trial][alter] : 0;
        y_raw.push_back(egos > 0 ? double(follow) / egos : 0.0);
      }
      if (!ok) continue;
      try {
        auto us = stats::relative_shares(u_raw);
        auto rs = stats::relative_shares(r_raw);
        auto qs = stats::relative_shares(q_raw);
        for (std::size_t i = 0; i < alters.size(); ++i) {
          y.push_back(y_raw[i]);
          u_rel.push_back(us[i]);
          r_rel.push_back(rs[i]);
          q_rel.push_back(qs[i]);
          input_csv << csv_escape(trial) << "," << csv_escape(alters[i]) << ","
                    << format_real(y_raw[i]) << "," << format_real(us[i]) << ","
                    << format_real(rs[i]) << "," << format_real(qs[i]) << "\n";
        }
      } catch (const DomainError& e) {
        warn(std::string("trial ") + trial + " excluded from regression: " + e.what());
      }
    }

    if (y.size() >= 5) {
      try {
        auto fit = stats::ols_standardized(
            y, {{"u_rel", u_rel}, {"r_rel", r_rel}, {"q_rel", q_rel}});
        std::ostringstream csv;
        append_regression_csv(csv, fit);
        write_text_atomic(dir / "analyze_regression.csv", csv.str());
        write_text_atomic(dir / "analyze_regression_input.csv", input_csv.str());
        regression_done = true;
      } catch (const DomainError& e) {
        warn(std::string("regression failed: ") + e.what());
      }
    } else {
      warn("too few alters for regression");
    }
  }

  Manifest manifest{"analyze"};
  manifest.inputs["ideas"] = ideas_path;
  manifest.inputs["ratings"] = ratings_path;
  manifest.inputs["networks"] = networks_path;
  manifest.inputs["embeddings"] = embeddings_path;
  manifest.inputs["taxonomy"] = taxonomy_path;
  manifest.overrides["regression_done"] = regression_done;
  manifest.out_dir = dir.string();
  manifest.write(dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ideanet: idea-diffusion simulation and creativity metrics"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string out = ".";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::uint64_t seed_value = 0;
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--config", config, "Config file (simulate)");
  auto* seed_opt = app.add_option("--seed", seed_value, "Random seed");
  app.add_flag("--quiet", g_quiet, "Suppress warnings");

  // quotient
  std::string ideas_path, taxonomy_path;
  bool dedup_group = false;
  auto* quotient = app.add_subcommand("quotient", "Creativity quotient report");
  quotient->add_option("ideas", ideas_path, "Ideas CSV")->required();
  quotient->add_option("taxonomy", taxonomy_path, "Taxonomy TSV")->required();
  quotient->add_flag("--dedup-group-concepts", dedup_group,
                     "Deduplicate pooled group concepts before Q");

  // nonredundant
  std::string nr_ideas, nr_pool;
  int nr_threshold = 1;
  bool nr_group = false;
  auto* nonred = app.add_subcommand("nonredundant", "Non-redundant idea counts");
  nonred->add_option("ideas", nr_ideas, "Ideas CSV")->required();
  nonred->add_option("--threshold", nr_threshold, "Redundancy threshold")
      ->check(CLI::PositiveNumber);
  nonred->add_option("--pool", nr_pool, "Pool selector, e.g. trial=1,round=2");
  nonred->add_flag("--group", nr_group, "Emit only the group-level count");

  // jaccard
  std::string jac_a, jac_b;
  auto* jac = app.add_subcommand("jaccard", "Jaccard overlap of two id sets");
  jac->add_option("set_a", jac_a, "File with one id per line")->required();
  jac->add_option("set_b", jac_b, "File with one id per line")->required();

  // wmd
  std::string wmd_docs, wmd_pairs, wmd_emb, wmd_stop;
  auto* wmdcmd = app.add_subcommand("wmd", "Word Mover's Distance per node pair");
  wmdcmd->add_option("docs", wmd_docs, "Docs CSV (node,text)")->required();
  wmdcmd->add_option("pairs", wmd_pairs, "Pairs CSV (node_a,node_b)")->required();
  wmdcmd->add_option("embeddings", wmd_emb, "Embedding text file")->required();
  wmdcmd->add_option("--stopwords", wmd_stop, "Stopword file");

  // project
  std::string proj_networks;
  auto* proj = app.add_subcommand("project", "One-mode projection onto egos");
  proj->add_option("networks", proj_networks, "Network CSV (trial,round,ego,alter)")
      ->required();

  // simulate
  std::vector<std::string> sim_sets;
  bool sim_svg = false;
  int sim_threads = 1;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rewiring sweep");
  simulate->add_option("--set", sim_sets, "Config override key=value");
  simulate->add_flag("--svg", sim_svg, "Emit SVG sweep plot");
  simulate->add_option("--threads", sim_threads, "Worker threads");

  // regress
  std::string reg_input;
  auto* regress = app.add_subcommand("regress", "Standardized OLS regression");
  regress->add_option("input", reg_input,
                      "CSV trial,alter,followers_frac,u_rel,r_rel,q_rel")
      ->required();

  // ttest
  std::string tt_input;
  bool tt_welch = false;
  int tt_comparisons = 0;
  auto* ttest = app.add_subcommand("ttest", "Two-sample t-tests per group pair");
  ttest->add_option("input", tt_input, "CSV group,value")->required();
  ttest->add_flag("--welch", tt_welch, "Welch instead of pooled variance");
  ttest->add_option("--comparisons", tt_comparisons,
                    "Bonferroni comparison count (default: number of pairs)");

  // agreement
  std::string ag_input;
  auto* agreement = app.add_subcommand("agreement", "ICC(3,k) and Krippendorff alpha");
  agreement->add_option("input", ag_input, "Matrix CSV: id column + rater columns")
      ->required();

  // analyze
  std::string an_ideas, an_ratings, an_networks, an_emb, an_tax, an_stop;
  auto* analyze = app.add_subcommand(
      "analyze", "Projection, WMD grouping, t-tests and regression pipeline");
  analyze->add_option("--ideas", an_ideas, "Ideas CSV")->required();
  analyze->add_option("--ratings", an_ratings, "Ratings CSV");
  analyze->add_option("--networks", an_networks, "Network CSV")->required();
  analyze->add_option("--embeddings", an_emb, "Embedding text file")->required();
  analyze->add_option("--taxonomy", an_tax, "Taxonomy TSV");
  analyze->add_option("--stopwords", an_stop, "Stopword file");

  // Let global flags (--out, --seed, ...) appear after the subcommand name.
  for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help/--version exit 0; everything else is a usage error.
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) seed = seed_value;

  try {
    if (*quotient) return cmd_quotient(ideas_path, taxonomy_path, out, dedup_group);
    if (*nonred) return cmd_nonredundant(nr_ideas, nr_threshold, nr_pool, nr_group, out);
    if (*jac) return cmd_jaccard(jac_a, jac_b);
    if (*wmdcmd) return cmd_wmd(wmd_docs, wmd_pairs, wmd_emb, wmd_stop, out);
    if (*proj) return cmd_project(proj_networks, out);
    if (*simulate)
      return cmd_simulate(config, sim_sets, out, sim_svg, sim_threads, seed);
    if (*regress) return cmd_regress(reg_input, out);
    if (*ttest) return cmd_ttest(tt_input, tt_welch, tt_comparisons, out);
    if (*agreement) return cmd_agreement(ag_input, out);
    if (*analyze)
      return cmd_analyze(an_ideas, an_ratings, an_networks, an_emb, an_tax,
                         an_stop, out);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
