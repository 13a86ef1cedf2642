#include "ideanet/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>
#include <unordered_map>

#include "ideanet/errors.hpp"
#include "ideanet/stats.hpp"

namespace ideanet::sim {

namespace {

double uniform01(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

// Unbiased-enough for simulation purposes; chosen over std::shuffle /
// std::uniform_int_distribution because their streams differ across
// standard libraries and the determinism contract is byte-level.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  return rng() % bound;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  std::uint64_t x = splitmix64(seed);
  x = splitmix64(x ^ a);
  x = splitmix64(x ^ b);
  x = splitmix64(x ^ c);
  return x;
}

const char* to_string(StimFn f) {
  switch (f) {
    case StimFn::linear: return "linear";
    case StimFn::sublinear: return "sublinear";
    case StimFn::superlinear: return "superlinear";
  }
  return "?";
}

const char* to_string(Redundancy r) {
  return r == Redundancy::none ? "none" : "full";
}

StimFn stim_fn_from_string(const std::string& s) {
  if (s == "linear") return StimFn::linear;
  if (s == "sublinear") return StimFn::sublinear;
  if (s == "superlinear") return StimFn::superlinear;
  throw DomainError("unknown stimulation function: " + s);
}

Redundancy redundancy_from_string(const std::string& s) {
  if (s == "none") return Redundancy::none;
  if (s == "full") return Redundancy::full;
  throw DomainError("unknown redundancy regime: " + s);
}

BipartiteNet init_network(int m, int n) {
  if (m < 2) throw DomainError("need at least 2 alters to assign follow pairs");
  if (n < 1) throw DomainError("need at least 1 ego");
  BipartiteNet net;
  net.alter_count = m;
  net.follows.reserve(n);
  for (int j = 0; j < n; ++j) net.follows.emplace_back(j % m, (j + 1) % m);
  return net;
}

void SimConfig::validate() const {
  if (m < 2) throw DomainError("config: m must be >= 2");
  if (m % 3 != 0) throw DomainError("config: m must be divisible by 3 (high-performer third)");
  if (n < 1) throw DomainError("config: n must be >= 1");
  if (ideas_per_alter < 1) throw DomainError("config: ideas_per_alter must be >= 1");
  if (pool1_size < 1 || pool2_size < 1) throw DomainError("config: pool sizes must be >= 1");
  if (pool1_size >= pool2_size)
    throw DomainError("config: pool1_size must be smaller than pool2_size");
  if (threshold < m || threshold >= n)
    throw DomainError("config: threshold must satisfy m <= threshold < n");
  if (instances < 1 || runs_per_instance < 1)
    throw DomainError("config: instances and runs_per_instance must be >= 1");
  if (p_r_grid.empty()) throw DomainError("config: empty p_r grid");
  for (double p : p_r_grid)
    if (p < 0.0 || p > 1.0) throw DomainError("config: p_r values must lie in [0,1]");
  if (std::fabs(p1 + p2 + p3 - 1.0) > 1e-9)
    throw DomainError("config: p1+p2+p3 must equal 1");
  if (slope_k < 0.0) throw DomainError("config: slope_k must be non-negative");
}

std::vector<AlterIdeaSet> gen_alter_sets(const SimConfig& cfg, std::mt19937_64& rng) {
  std::vector<int> order(cfg.m);
  for (int i = 0; i < cfg.m; ++i) order[i] = i;
  for (int i = cfg.m - 1; i > 0; --i)
    std::swap(order[i], order[uniform_below(rng, i + 1)]);
  std::vector<char> high(cfg.m, 0);
  for (int i = 0; i < cfg.m / 3; ++i) high[order[i]] = 1;

  std::vector<AlterIdeaSet> sets(cfg.m);
  for (int i = 0; i < cfg.m; ++i) {
    auto& s = sets[i];
    s.alter = i;
    // High performers draw mostly from the rare pool (low alpha).
    s.alpha = high[i] ? 0.5 * uniform01(rng) : 1.0 - 0.5 * uniform01(rng);
    s.ideas.reserve(cfg.ideas_per_alter);
    for (int k = 0; k < cfg.ideas_per_alter; ++k) {
      if (uniform01(rng) < s.alpha)
        s.ideas.push_back(IdeaSymbol(uniform_below(rng, cfg.pool1_size)));
      else
        s.ideas.push_back(
            IdeaSymbol(cfg.pool1_size + uniform_below(rng, cfg.pool2_size)));
    }
  }
  return sets;
}

std::vector<IdeaSymbol> exposure_set(const BipartiteNet& net,
                                     const std::vector<AlterIdeaSet>& sets,
                                     int ego) {
  if (ego < 0 || ego >= net.ego_count()) throw DomainError("ego id out of range");
  const auto [a, b] = net.follows[ego];
  std::vector<IdeaSymbol> out = sets[a].ideas;
  out.insert(out.end(), sets[b].ideas.begin(), sets[b].ideas.end());
  return out;
}

BipartiteNet rewire(const BipartiteNet& initial, double p_r,
                    std::pair<int, int> top2, std::mt19937_64& rng) {
  if (p_r < 0.0 || p_r > 1.0) throw DomainError("p_r must lie in [0,1]");
  if (top2.first == top2.second) throw DomainError("top-2 alters must be distinct");
  BipartiteNet net = initial;
  for (auto& follow : net.follows)
    if (uniform01(rng) < p_r) follow = top2;
  return net;
}

std::pair<int, int> top_performers(const std::vector<AlterIdeaSet>& sets) {
  if (sets.size() < 2) throw DomainError("need at least 2 alters");
  std::unordered_map<IdeaSymbol, std::set<int>> owners;
  for (const auto& s : sets)
    for (IdeaSymbol e : s.ideas) owners[e].insert(s.alter);
  std::vector<int> counts(sets.size(), 0);
  for (const auto& [sym, who] : owners)
    if (who.size() == 1) ++counts[*who.begin()];
  // Highest count first, lowest id on ties.
  std::vector<int> ids(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) ids[i] = int(i);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return a < b;
  });
  return {ids[0], ids[1]};
}

double rarity(IdeaSymbol e, const std::vector<AlterIdeaSet>& sets) {
  long occurrences = 0, total = 0;
  for (const auto& s : sets) {
    total += long(s.ideas.size());
    occurrences += std::count(s.ideas.begin(), s.ideas.end(), e);
  }
  if (occurrences == 0)
    throw DomainError("rarity of a symbol absent from the alter pools");
  return 1.0 - double(occurrences) / double(total);
}

int stimulated_count(double rarity_value, StimFn fn, double k) {
  double f = 0.0;
  switch (fn) {
    case StimFn::linear: f = k * rarity_value; break;
    case StimFn::sublinear: f = k * std::sqrt(rarity_value); break;
    case StimFn::superlinear: f = k * rarity_value * rarity_value; break;
  }
  return int(std::floor(f + 0.5));  // ties up
}

std::vector<StimSymbol> stimulate(const std::vector<IdeaSymbol>& exposure,
                                  const std::vector<AlterIdeaSet>& sets,
                                  const SimConfig& cfg, int ego) {
  if (cfg.p2 != 0.0 || cfg.p3 != 0.0)
    throw DomainError("unsupported configuration: p2 and p3 must be 0");
  std::vector<IdeaSymbol> distinct = exposure;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<StimSymbol> out;
  const int origin = cfg.redundancy == Redundancy::none ? ego : -1;
  for (IdeaSymbol e : distinct) {
    int n_e = stimulated_count(rarity(e, sets), cfg.stim_fn, cfg.slope_k);
    for (int idx = 0; idx < n_e; ++idx) out.emplace_back(origin, e, idx);
  }
  return out;
}

int collective_nonredundant(const std::vector<std::vector<StimSymbol>>& per_ego,
                            int threshold) {
  if (threshold < 1) throw DomainError("threshold must be >= 1");
  std::map<StimSymbol, std::set<int>> producers;
  for (std::size_t ego = 0; ego < per_ego.size(); ++ego)
    for (const auto& sym : per_ego[ego]) producers[sym].insert(int(ego));
  int count = 0;
  for (const auto& [sym, who] : producers)
    if (int(who.size()) <= threshold) ++count;
  return count;
}

namespace {

// Per-instance precomputation shared by all runs of that instance.
struct Instance {
  std::vector<std::vector<IdeaSymbol>> distinct_per_alter;
  std::unordered_map<IdeaSymbol, int> stim_counts;  // n_e per symbol
  std::pair<int, int> top2;
};

Instance prepare_instance(const SimConfig& cfg,
                          const std::vector<AlterIdeaSet>& sets) {
  Instance inst;
  inst.top2 = top_performers(sets);
  std::unordered_map<IdeaSymbol, int> occurrences;
  long total = 0;
  for (const auto& s : sets) {
    total += long(s.ideas.size());
    auto d = s.ideas;
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    inst.distinct_per_alter.push_back(std::move(d));
    for (IdeaSymbol e : s.ideas) ++occurrences[e];
  }
  for (const auto& [e, occ] : occurrences) {
    double r = 1.0 - double(occ) / double(total);
    inst.stim_counts[e] = stimulated_count(r, cfg.stim_fn, cfg.slope_k);
  }
  return inst;
}

// Count for one rewired network without materializing stimulated multisets:
// a stimulated symbol (e, idx) under full redundancy is produced by every
// ego exposed to e, and under no redundancy every symbol has one producer.
int run_count(const SimConfig& cfg, const BipartiteNet& net, const Instance& inst) {
  std::unordered_map<IdeaSymbol, int> exposed_egos;
  std::vector<IdeaSymbol> merged;
  for (const auto& [a, b] : net.follows) {
    merged.clear();
    std::set_union(inst.distinct_per_alter[a].begin(),
                   inst.distinct_per_alter[a].end(),
                   inst.distinct_per_alter[b].begin(),
                   inst.distinct_per_alter[b].end(), std::back_inserter(merged));
    for (IdeaSymbol e : merged) ++exposed_egos[e];
  }
  long count = 0;
  if (cfg.redundancy == Redundancy::none) {
    for (const auto& [e, egos] : exposed_egos)
      count += long(egos) * inst.stim_counts.at(e);
  } else {
    for (const auto& [e, egos] : exposed_egos)
      if (egos <= cfg.threshold) count += inst.stim_counts.at(e);
  }
  return int(count);
}

}  // namespace

SimResult run_sweep(const SimConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.p2 != 0.0 || cfg.p3 != 0.0)
    throw DomainError("unsupported configuration: p2 and p3 must be 0");
  if (threads < 1) threads = 1;

  const int gridn = int(cfg.p_r_grid.size());
  const BipartiteNet initial = init_network(cfg.m, cfg.n);

  SimResult result;
  result.stim_fn = cfg.stim_fn;
  result.redundancy = cfg.redundancy;
  result.records.resize(std::size_t(gridn) * cfg.instances * cfg.runs_per_instance);

  auto worker = [&](int first_instance, int step) {
    for (int i = first_instance; i < cfg.instances; i += step) {
      std::mt19937_64 gen_rng(mix_seed(cfg.seed, 0x67656eULL, std::uint64_t(i), 0));
      const auto sets = gen_alter_sets(cfg, gen_rng);
      const Instance inst = prepare_instance(cfg, sets);
      for (int r = 0; r < cfg.runs_per_instance; ++r) {
        for (int g = 0; g < gridn; ++g) {
          std::mt19937_64 rng(mix_seed(cfg.seed, std::uint64_t(i),
                                       std::uint64_t(r), std::uint64_t(g)));
          BipartiteNet net = rewire(initial, cfg.p_r_grid[g], inst.top2, rng);
          int count = run_count(cfg, net, inst);
          auto& rec =
              result.records[(std::size_t(g) * cfg.instances + i) *
                                 cfg.runs_per_instance +
                             r];
          rec = {cfg.p_r_grid[g], i, r, count};
        }
      }
    }
  };

  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
    for (auto& th : pool) th.join();
  }

  const int per_point = cfg.instances * cfg.runs_per_instance;
  for (int g = 0; g < gridn; ++g) {
    double sum = 0.0;
    for (int k = 0; k < per_point; ++k)
      sum += result.records[std::size_t(g) * per_point + k].count;
    double mean = sum / per_point;
    double ss = 0.0;
    for (int k = 0; k < per_point; ++k) {
      double d = result.records[std::size_t(g) * per_point + k].count - mean;
      ss += d * d;
    }
    GridAggregate agg;
    agg.p_r = cfg.p_r_grid[g];
    agg.mean = mean;
    if (per_point > 1) {
      agg.stddev = std::sqrt(ss / (per_point - 1));
      double half = stats::t_quantile(0.975, per_point - 1) * agg.stddev /
                    std::sqrt(double(per_point));
      agg.ci_lo = mean - half;
      agg.ci_hi = mean + half;
    } else {
      agg.ci_lo = agg.ci_hi = mean;
    }
    result.aggregates.push_back(agg);
  }
  return result;
}

std::map<std::pair<int, int>, int> project_onto_egos(const BipartiteNet& net) {
  std::map<std::pair<int, int>, int> weights;
  const int n = net.ego_count();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto [a1, a2] = net.follows[i];
      const auto [b1, b2] = net.follows[j];
      int w = int(a1 == b1 || a1 == b2) + int(a2 == b1 || a2 == b2);
      weights[{i, j}] = w;
    }
  return weights;
}

}  // namespace ideanet::sim
