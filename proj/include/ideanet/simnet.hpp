#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ideanet::sim {

/// Index into the combined idea pool: [0, pool1) is the common pool,
/// [pool1, pool1+pool2) the rare pool.
using IdeaSymbol = std::uint32_t;

struct BipartiteNet {
  int alter_count = 0;
  std::vector<std::pair<int, int>> follows;  // ego -> two distinct alters
  int ego_count() const { return int(follows.size()); }
};

/// Ring wiring: ego j follows alters (j mod m) and ((j+1) mod m).
BipartiteNet init_network(int m, int n);

struct AlterIdeaSet {
  int alter = 0;
  double alpha = 0.0;                // probability of drawing from the common pool
  std::vector<IdeaSymbol> ideas;     // multiset, size = ideas_per_alter
};

enum class StimFn { linear, sublinear, superlinear };
enum class Redundancy { none, full };

const char* to_string(StimFn f);
const char* to_string(Redundancy r);
StimFn stim_fn_from_string(const std::string& s);
Redundancy redundancy_from_string(const std::string& s);

struct SimConfig {
  int m = 6;
  int n = 18;
  int ideas_per_alter = 15;
  int pool1_size = 10;    // |U1|, common ideas
  int pool2_size = 1000;  // |U2|, rare ideas
  double slope_k = 20.0;
  StimFn stim_fn = StimFn::linear;
  Redundancy redundancy = Redundancy::none;
  std::vector<double> p_r_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                  0.6, 0.7, 0.8, 0.9, 1.0};
  int instances = 50;
  int runs_per_instance = 200;
  int threshold = 7;
  std::uint64_t seed = 0;
  double p1 = 1.0, p2 = 0.0, p3 = 0.0;

  void validate() const;  // throws DomainError
};

/// One alpha per alter (a random third high-performing), then ideas_per_alter
/// draws with replacement, from the common pool with probability alpha.
std::vector<AlterIdeaSet> gen_alter_sets(const SimConfig& cfg, std::mt19937_64& rng);

/// Multiset union of the two followed alters' idea multisets.
std::vector<IdeaSymbol> exposure_set(const BipartiteNet& net,
                                     const std::vector<AlterIdeaSet>& sets, int ego);

/// Each ego independently switches to the top-2 pair with probability p_r.
BipartiteNet rewire(const BipartiteNet& initial, double p_r,
                    std::pair<int, int> top2, std::mt19937_64& rng);

/// The two alters with the highest non-redundant counts over the pooled
/// alter ideas at threshold 1; ties broken by lowest alter id.
std::pair<int, int> top_performers(const std::vector<AlterIdeaSet>& sets);

/// R_e = 1 - occurrences(e) / (m * ideas_per_alter).
double rarity(IdeaSymbol e, const std::vector<AlterIdeaSet>& sets);

/// round(f(R)) with ties rounded up.
int stimulated_count(double rarity_value, StimFn fn, double k);

/// Stimulated idea identity: (origin, stimulus, index). origin is the ego id
/// under no redundancy (globally fresh symbols) and -1 under full redundancy
/// (identical across egos sharing the stimulus).
using StimSymbol = std::tuple<int, IdeaSymbol, int>;

std::vector<StimSymbol> stimulate(const std::vector<IdeaSymbol>& exposure,
                                  const std::vector<AlterIdeaSet>& sets,
                                  const SimConfig& cfg, int ego);

/// Distinct stimulated symbols produced by at most `threshold` distinct egos.
int collective_nonredundant(const std::vector<std::vector<StimSymbol>>& per_ego,
                            int threshold);

struct RunRecord {
  double p_r = 0.0;
  int instance = 0;
  int run = 0;
  int count = 0;
};

struct GridAggregate {
  double p_r = 0.0;
  double mean = 0.0, stddev = 0.0, ci_lo = 0.0, ci_hi = 0.0;
};

struct SimResult {
  StimFn stim_fn;
  Redundancy redundancy;
  std::vector<RunRecord> records;       // ordered by (grid index, instance, run)
  std::vector<GridAggregate> aggregates;
};

/// Monte Carlo sweep over the rewiring grid. The stream for each
/// (instance, run, grid point) is independently seeded from cfg.seed, so
/// the result is identical regardless of thread count or execution order.
SimResult run_sweep(const SimConfig& cfg, int threads = 1);

/// One-mode projection onto egos: weight = number of common followed alters.
/// Zero-weight pairs are included.
std::map<std::pair<int, int>, int> project_onto_egos(const BipartiteNet& net);

/// Deterministic per-stream seed derivation (splitmix64 mixing).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c);

}  // namespace ideanet::sim
