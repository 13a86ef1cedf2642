#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ideanet/errors.hpp"
#include "ideanet/metrics.hpp"
#include "ideanet/taxonomy.hpp"

using namespace ideanet;

namespace {

Taxonomy random_dag(std::mt19937_64& rng, int nodes) {
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 1; i < nodes; ++i) {
    int p = int(rng() % std::uint64_t(i));
    edges.push_back({"n" + std::to_string(i), "n" + std::to_string(p)});
    if (rng() % 3 == 0 && i >= 2) {
      int q = int(rng() % std::uint64_t(i));
      if (q != p) edges.push_back({"n" + std::to_string(i), "n" + std::to_string(q)});
    }
  }
  return Taxonomy::from_edges(edges);
}

ConceptBag random_bag(std::mt19937_64& rng, const Taxonomy& t, int n) {
  ConceptBag bag;
  for (int i = 0; i < n; ++i)
    bag.concepts.push_back(t.labels()[rng() % t.labels().size()]);
  return bag;
}

// Exhaustive maximum-spanning-tree weight via Pruefer-sequence enumeration
// of all labelled trees on n vertices (n^(n-2) trees, fine for n <= 6).
double brute_force_mst(const std::vector<std::vector<double>>& w) {
  const int n = int(w.size());
  if (n <= 1) return 0.0;
  if (n == 2) return w[0][1];
  double best = -1.0;
  std::vector<int> pruefer(n - 2, 0);
  auto tree_weight = [&]() {
    std::vector<int> degree(n, 1);
    for (int v : pruefer) ++degree[v];
    std::set<int> leaves;
    for (int v = 0; v < n; ++v)
      if (degree[v] == 1) leaves.insert(v);
    double total = 0.0;
    std::vector<int> seq = pruefer;
    for (int v : seq) {
      int leaf = *leaves.begin();
      leaves.erase(leaves.begin());
      total += w[leaf][v];
      if (--degree[v] == 1) leaves.insert(v);
    }
    int a = *leaves.begin(), b = *std::next(leaves.begin());
    return total + w[a][b];
  };
  while (true) {
    best = std::max(best, tree_weight());
    int i = n - 3;
    while (i >= 0 && pruefer[i] == n - 1) pruefer[i--] = 0;
    if (i < 0) break;
    ++pruefer[i];
  }
  return best;
}

}  // namespace

TEST_CASE("multi-information matches exhaustive spanning-tree enumeration") {
  std::mt19937_64 rng(11);
  for (int fixture = 0; fixture < 500; ++fixture) {
    auto t = random_dag(rng, 4 + int(rng() % 10));
    int n = 2 + int(rng() % 5);  // N in [2, 6]
    auto bag = random_bag(rng, t, n);
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        w[i][j] = w[j][i] = t.concept_similarity(bag.concepts[i], bag.concepts[j]);
    CHECK(multi_information(bag, t) ==
          doctest::Approx(brute_force_mst(w)).epsilon(1e-9));
  }
}

TEST_CASE("Q is invariant under exact duplicates") {
  std::mt19937_64 rng(13);
  for (int fixture = 0; fixture < 200; ++fixture) {
    auto t = random_dag(rng, 4 + int(rng() % 12));
    auto bag = random_bag(rng, t, 1 + int(rng() % 8));
    double q0 = creativity_quotient(bag, t);
    ConceptBag dup = bag;
    dup.concepts.push_back(bag.concepts[rng() % bag.concepts.size()]);
    double q1 = creativity_quotient(dup, t);
    CHECK(std::abs(q1 - q0) < 1e-9);
  }
}

TEST_CASE("trivial bags") {
  auto t = Taxonomy::from_edges({{"a", "root"}, {"b", "a"}});
  CHECK(multi_information(ConceptBag{}, t) == 0.0);
  CHECK(creativity_quotient(ConceptBag{{"a"}}, t) == 1.0);
  CHECK_THROWS_AS(multi_information(ConceptBag{{"a", "mystery"}}, t), LookupError);
}

TEST_CASE("remote-branch pool scores higher Q than near-synonym pool") {
  // Two deep branches under a common root; concepts on one branch are
  // near-synonyms, concepts across branches are remote.
  std::vector<std::pair<std::string, std::string>> edges = {
      {"l1", "root"}, {"l2", "l1"}, {"l3", "l2"},
      {"r1", "root"}, {"r2", "r1"}, {"r3", "r2"}};
  for (int i = 0; i < 20; ++i)
    edges.push_back({"pad" + std::to_string(i), "root"});
  auto t = Taxonomy::from_edges(edges);
  double q_synonyms = creativity_quotient(ConceptBag{{"l1", "l2", "l3"}}, t);
  double q_remote = creativity_quotient(ConceptBag{{"l3", "r3", "pad0"}}, t);
  CHECK(q_remote > q_synonyms);
}

TEST_CASE("accumulate_q pools groups and skips empty-concept ideas") {
  auto t = Taxonomy::from_edges({{"a", "root"}, {"b", "root"}});
  std::vector<IdeaRecord> records;
  records.push_back({"1", "dynamic", 1, 1, "P1", "i1", "b1", {"a"}, ""});
  records.push_back({"1", "dynamic", 1, 1, "P2", "i2", "b2", {"b"}, ""});
  records.push_back({"1", "dynamic", 2, 1, "P1", "i3", "b3", {"a", "b"}, ""});
  records.push_back({"1", "dynamic", 2, 1, "P1", "i4", "b4", {}, ""});
  auto q = accumulate_q(records, t);
  REQUIRE(q.skipped == std::vector<std::string>{"i4"});
  CHECK(q.per_round.at({"P1", 1}) == 1.0);
  CHECK(q.per_round.at({"P1", 2}) ==
        doctest::Approx(2.0 - t.concept_similarity("a", "b")).epsilon(1e-12));
  // Totals sum the participant's per-round quotients.
  CHECK(q.totals.at("P1") ==
        doctest::Approx(q.per_round.at({"P1", 1}) + q.per_round.at({"P1", 2}))
            .epsilon(1e-12));
  // Group key is condition/trial; round 1 pools P1 and P2.
  CHECK(q.group_per_round.at({"dynamic/1", 1}) ==
        doctest::Approx(creativity_quotient(ConceptBag{{"a", "b"}}, t))
            .epsilon(1e-12));
  CHECK(q.group_totals.count("dynamic/1") == 1);
}

TEST_CASE("non-redundant counts reproduce the six-alter scenario") {
  // A1{p,q}, A2{a,b}, A3{b,c}, A4{a,c}, A5{a,b}, A6{r,s}; threshold 1.
  auto rec = [](const std::string& who, const std::string& bin) {
    IdeaRecord r;
    r.trial = "1";
    r.condition = "alter";
    r.participant = who;
    r.idea_id = who + "_" + bin;
    r.bin_id = bin;
    return r;
  };
  std::vector<IdeaRecord> pool = {
      rec("A1", "p"), rec("A1", "q"), rec("A2", "a"), rec("A2", "b"),
      rec("A3", "b"), rec("A3", "c"), rec("A4", "a"), rec("A4", "c"),
      rec("A5", "a"), rec("A5", "b"), rec("A6", "r"), rec("A6", "s")};
  auto counts = nonredundant_counts(pool, 1);
  CHECK(counts.per_participant.at("A1") == 2);
  CHECK(counts.per_participant.at("A2") == 0);
  CHECK(counts.per_participant.at("A3") == 0);
  CHECK(counts.per_participant.at("A4") == 0);
  CHECK(counts.per_participant.at("A5") == 0);
  CHECK(counts.per_participant.at("A6") == 2);
  CHECK(counts.group_count == 4);

  // Raising the threshold to 2 admits c (2 producers) but not a or b (3).
  auto relaxed = nonredundant_counts(pool, 2);
  CHECK(relaxed.per_participant.at("A3") == 1);
  CHECK(relaxed.per_participant.at("A4") == 1);
  CHECK(relaxed.group_count == 5);

  // Duplicate submissions by one participant count once.
  pool.push_back(rec("A1", "p"));
  CHECK(nonredundant_counts(pool, 1).per_participant.at("A1") == 2);
}

TEST_CASE("jaccard") {
  CHECK(jaccard({}, {}) == 1.0);
  CHECK(jaccard({"a"}, {}) == 0.0);
  CHECK(jaccard({"a", "b"}, {"b", "c"}) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(jaccard({"a", "b"}, {"a", "b"}) == 1.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    std::set<std::string> a, b;
    for (int k = 0; k < 10; ++k) {
      if (rng() % 2) a.insert(std::to_string(rng() % 8));
      if (rng() % 2) b.insert(std::to_string(rng() % 8));
    }
    double j = jaccard(a, b);
    CHECK(j == jaccard(b, a));
    CHECK(j >= 0.0);
    CHECK(j <= 1.0);
  }
}

TEST_CASE("average novelty") {
  std::vector<RatingRecord> ratings = {
      {"r1", "i1", 5}, {"r2", "i1", 3}, {"r1", "i2", 2}};
  std::map<std::string, std::vector<std::string>> by_participant = {
      {"P1", {"i1", "i2"}}, {"P2", {"i3"}}};
  auto result = average_novelty(ratings, by_participant);
  CHECK(result.per_idea.at("i1") == 4.0);
  CHECK(result.per_idea.at("i2") == 2.0);
  CHECK(result.per_participant.at("P1") == 3.0);
  CHECK(result.per_participant.count("P2") == 0);
  CHECK(result.unrated == std::vector<std::string>{"i3"});
  CHECK(result.group_mean == 3.0);

  CHECK_THROWS_AS(
      average_novelty({{"r1", "i1", 6}}, {{"P1", {"i1"}}}), DomainError);
  CHECK_THROWS_AS(
      average_novelty({{"r1", "i1", 0}}, {{"P1", {"i1"}}}), DomainError);
}

TEST_CASE("ideas CSV loader") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "ideanet_metrics_test";
  fs::create_directories(dir);
  auto path = dir / "ideas.csv";
  {
    std::ofstream out(path);
    out << "trial,condition,round,turn,participant,idea_id,bin_id,concepts,text\n";
    out << "1,dynamic,2,1,P1,i1,b1,a|b,\"hello, world\"\n";
    out << "1,solo,1,0,P2,i2,b2,,plain\n";
  }
  auto records = load_ideas_csv(path);
  REQUIRE(records.size() == 2);
  CHECK(records[0].round == 2);
  CHECK(records[0].concepts == std::vector<std::string>{"a", "b"});
  CHECK(records[0].text == "hello, world");
  CHECK(records[1].concepts.empty());

  {
    std::ofstream out(dir / "bad.csv");
    out << "trial,condition\n1,dynamic\n";
  }
  CHECK_THROWS_AS(load_ideas_csv(dir / "bad.csv"), ParseError);
  {
    std::ofstream out(dir / "badround.csv");
    out << "trial,condition,round,turn,participant,idea_id,bin_id,concepts,text\n";
    out << "1,dynamic,x,1,P1,i1,b1,a,text\n";
  }
  CHECK_THROWS_AS(load_ideas_csv(dir / "badround.csv"), ParseError);
}
