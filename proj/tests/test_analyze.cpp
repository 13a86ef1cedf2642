#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ideanet/csv.hpp"

#ifndef IDEANET_CLI
#error "IDEANET_CLI must point at the built binary"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(IDEANET_CLI) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path sandbox() {
  auto dir = fs::temp_directory_path() / "ideanet_analyze_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& dir, const char* name, const std::string& body) {
  std::ofstream out(dir / name);
  out << body;
  return dir / name;
}

// Synthetic three-trial dataset with a planted popularity effect: alters
// with more unique ideas (u) collect more followers by the final round,
// while novelty (r) and Q vary in patterns unrelated to u.
struct Dataset {
  fs::path ideas, ratings, networks, embeddings, taxonomy;
};

Dataset build(const fs::path& dir) {
  const std::vector<std::string> vocab = {"alpha", "beta",  "gamma",
                                          "delta", "omega", "sigma"};
  std::string ideas =
      "trial,condition,round,turn,participant,idea_id,bin_id,concepts,text\n";
  std::string ratings = "rater,idea_id,rating\n";
  std::string networks = "trial,round,ego,alter\n";

  for (int t = 1; t <= 3; ++t) {
    const std::string trial = std::to_string(t);
    // Alters: alter j holds j+1 unique-bin ideas (u grows with j). Even j
    // uses one repeated concept (low Q), odd j spreads across concepts.
    for (int j = 1; j <= 6; ++j) {
      const std::string alter = "T" + trial + "A" + std::to_string(j);
      for (int k = 0; k <= j; ++k) {
        const std::string id = alter + "_i" + std::to_string(k);
        const std::string bin = alter + "_b" + std::to_string(k);
        const std::string tag =
            j % 2 == 0 ? "c1" : "c" + std::to_string(1 + (k % 5));
        ideas += trial + ",alter,1,0," + alter + "," + id + "," + bin + "," +
                 tag + ",seed idea\n";
        ratings += "R1," + id + "," + std::to_string(1 + (j + k) % 5) + "\n";
        ratings += "R2," + id + "," + std::to_string(1 + (j + k + 1) % 5) + "\n";
      }
    }
    // Round 1: ring. Round 2: followers concentrate on high-u alters
    // (A5, A6 get 4 each; A4 two; A2, A3 one; A1 none).
    for (int e = 1; e <= 6; ++e) {
      const std::string ego = "T" + trial + "E" + std::to_string(e);
      auto alter = [&](int j) { return "T" + trial + "A" + std::to_string(j); };
      networks += trial + ",1," + ego + "," + alter(e) + "\n";
      networks += trial + ",1," + ego + "," + alter(e % 6 + 1) + "\n";
      static const int final_follow[6][2] = {{5, 6}, {5, 6}, {5, 6},
                                             {5, 4}, {6, 4}, {2, 3}};
      networks += trial + ",2," + ego + "," + alter(final_follow[e - 1][0]) + "\n";
      networks += trial + ",2," + ego + "," + alter(final_follow[e - 1][1]) + "\n";
    }
    // Ego turn-2 texts each round; egos 1-3 (identical follows in round 2)
    // share a text, the rest get distinct word pairs.
    for (int round = 1; round <= 2; ++round)
      for (int e = 1; e <= 6; ++e) {
        const std::string ego = "T" + trial + "E" + std::to_string(e);
        std::string text = e <= 3 ? "alpha beta"
                                  : vocab[e - 3] + " " + vocab[(e - 1) % 6];
        ideas += trial + ",dynamic," + std::to_string(round) + ",2," + ego +
                 "," + ego + "_r" + std::to_string(round) + "," + ego + "_rb" +
                 std::to_string(round) + ",c1," + text + "\n";
      }
  }

  std::string embeddings;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    embeddings += vocab[i];
    for (std::size_t d = 0; d < 3; ++d)
      embeddings += " " + std::to_string((i + 1) * (d + 1) % 7);
    embeddings += "\n";
  }
  std::string taxonomy;
  for (int c = 1; c <= 5; ++c)
    taxonomy += "c" + std::to_string(c) + "\troot\n";

  Dataset ds;
  ds.ideas = write(dir, "ideas.csv", ideas);
  ds.ratings = write(dir, "ratings.csv", ratings);
  ds.networks = write(dir, "networks.csv", networks);
  ds.embeddings = write(dir, "embeddings.txt", embeddings);
  ds.taxonomy = write(dir, "taxonomy.tsv", taxonomy);
  return ds;
}

}  // namespace

TEST_CASE("analyze pipeline on a planted-effect dataset") {
  auto dir = sandbox();
  auto ds = build(dir);
  auto out = dir / "full";

  int rc = run("analyze --ideas " + ds.ideas.string() + " --ratings " +
               ds.ratings.string() + " --networks " + ds.networks.string() +
               " --embeddings " + ds.embeddings.string() + " --taxonomy " +
               ds.taxonomy.string() + " --out " + out.string());
  REQUIRE(rc == 0);

  // 6 egos -> 15 pairs per snapshot, 3 trials x 2 rounds.
  auto pairs = ideanet::read_csv(out / "analyze_pairs.csv");
  CHECK(pairs.size() == 1 + 15u * 6u);
  CHECK(pairs[0] == std::vector<std::string>{"trial", "round", "ego_a", "ego_b",
                                             "common_alters", "wmd"});
  // Every pair row carries a computed distance.
  for (std::size_t i = 1; i < pairs.size(); ++i) CHECK(pairs[i][5] != "");

  auto tests = ideanet::read_csv(out / "analyze_tests.csv");
  REQUIRE(tests.size() >= 2);  // at least one comparison ran
  CHECK(tests[0][0] == "name");

  // Regression recovers the planted effect: u_rel dominates with beta > 0.
  auto reg = ideanet::read_csv(out / "analyze_regression.csv");
  REQUIRE(reg.size() == 6);
  REQUIRE(reg[1][0] == "u_rel");
  double beta_u = std::stod(reg[1][1]);
  double beta_r = std::stod(reg[2][1]);
  double beta_q = std::stod(reg[3][1]);
  CHECK(beta_u > 0.5);
  CHECK(std::abs(beta_u) > std::abs(beta_r));
  CHECK(std::abs(beta_u) > std::abs(beta_q));

  // Regression input has one row per alter.
  auto input = ideanet::read_csv(out / "analyze_regression_input.csv");
  CHECK(input.size() == 1 + 18u);
}

TEST_CASE("analyze without ratings yields a partial report") {
  auto dir = sandbox();
  auto ds = build(dir);
  auto out = dir / "partial";
  int rc = run("analyze --ideas " + ds.ideas.string() + " --networks " +
               ds.networks.string() + " --embeddings " + ds.embeddings.string() +
               " --taxonomy " + ds.taxonomy.string() + " --out " + out.string());
  REQUIRE(rc == 0);
  CHECK(fs::exists(out / "analyze_pairs.csv"));
  CHECK(fs::exists(out / "analyze_tests.csv"));
  CHECK_FALSE(fs::exists(out / "analyze_regression.csv"));
}

TEST_CASE("analyze minimal two-ego network yields one pair row") {
  auto dir = sandbox();
  auto ideas = write(dir, "mini_ideas.csv",
                     "trial,condition,round,turn,participant,idea_id,bin_id,"
                     "concepts,text\n"
                     "1,dynamic,1,2,E1,i1,b1,,alpha beta\n"
                     "1,dynamic,1,2,E2,i2,b2,,beta gamma\n");
  auto net = write(dir, "mini_net.csv",
                   "trial,round,ego,alter\n1,1,E1,A1\n1,1,E1,A2\n"
                   "1,1,E2,A2\n1,1,E2,A3\n");
  auto emb = write(dir, "mini_emb.txt", "alpha 1 0\nbeta 0 1\ngamma 1 1\n");
  auto out = dir / "mini";
  int rc = run("analyze --ideas " + ideas.string() + " --networks " +
               net.string() + " --embeddings " + emb.string() + " --out " +
               out.string());
  REQUIRE(rc == 0);
  auto pairs = ideanet::read_csv(out / "analyze_pairs.csv");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[1][2] == "E1");
  CHECK(pairs[1][3] == "E2");
  CHECK(pairs[1][4] == "1");
}
