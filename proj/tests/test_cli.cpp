#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "ideanet/csv.hpp"

#ifndef IDEANET_CLI
#error "IDEANET_CLI must point at the built binary"
#endif

namespace fs = std::filesystem;
using ideanet::read_text;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(IDEANET_CLI) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  int rc = pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

fs::path sandbox() {
  auto dir = fs::temp_directory_path() / "ideanet_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& dir, const char* name, const std::string& body) {
  std::ofstream out(dir / name);
  out << body;
  return dir / name;
}

const char* kIdeasHeader =
    "trial,condition,round,turn,participant,idea_id,bin_id,concepts,text\n";

}  // namespace

TEST_CASE("quotient command") {
  auto dir = sandbox();
  auto ideas = write(dir, "ideas.csv",
                     std::string(kIdeasHeader) +
                         "1,dynamic,1,1,P1,i1,b1,a|b,hello\n"
                         "1,dynamic,1,1,P2,i2,b2,b,world\n");
  auto tax = write(dir, "tax.tsv", "a\troot\nb\ta\n");
  auto out = dir / "q";

  auto r = run("quotient " + ideas.string() + " " + tax.string() + " --out " +
               out.string());
  CHECK(r.status == 0);
  auto rows = ideanet::read_csv(out / "quotient.csv");
  REQUIRE(rows.size() >= 4);
  CHECK(rows[0] == std::vector<std::string>{"kind", "subject", "round", "q"});
  CHECK(fs::exists(out / "quotient_manifest.json"));

  // Header-only input: warning, empty report, still exit 0.
  auto empty = write(dir, "empty.csv", kIdeasHeader);
  auto r2 = run("quotient " + empty.string() + " " + tax.string() + " --out " +
                (dir / "q2").string() + " --quiet");
  CHECK(r2.status == 0);
  CHECK(ideanet::read_csv(dir / "q2" / "quotient.csv").size() == 1);

  // Unknown concept -> domain error (exit 3); missing file -> parse (exit 2).
  auto bad = write(dir, "bad.csv",
                   std::string(kIdeasHeader) + "1,dynamic,1,1,P1,i1,b1,zzz,x\n");
  CHECK(run("quotient " + bad.string() + " " + tax.string() + " --out " +
            (dir / "q3").string())
            .status == 3);
  CHECK(run("quotient " + (dir / "nope.csv").string() + " " + tax.string())
            .status == 2);
}

TEST_CASE("nonredundant command reproduces the six-alter scenario") {
  auto dir = sandbox();
  std::string body = kIdeasHeader;
  auto add = [&](const char* who, const char* bin) {
    body += std::string("1,alter,1,0,") + who + "," + who + "_" + bin + "," +
            bin + ",,\n";
  };
  add("A1", "p"); add("A1", "q"); add("A2", "a"); add("A2", "b");
  add("A3", "b"); add("A3", "c"); add("A4", "a"); add("A4", "c");
  add("A5", "a"); add("A5", "b"); add("A6", "r"); add("A6", "s");
  auto ideas = write(dir, "alters.csv", body);
  auto out = dir / "nr";

  auto r = run("nonredundant " + ideas.string() + " --threshold 1 --out " +
               out.string());
  CHECK(r.status == 0);
  auto rows = ideanet::read_csv(out / "nonredundant.csv");
  REQUIRE(rows.size() == 8);  // header + 6 participants + group
  CHECK(rows[1] == std::vector<std::string>{"participant", "A1", "2"});
  CHECK(rows[6] == std::vector<std::string>{"participant", "A6", "2"});
  for (int i : {2, 3, 4, 5}) CHECK(rows[i][2] == "0");
  CHECK(rows[7] == std::vector<std::string>{"group", "", "4"});

  // --group emits the single group row.
  auto r2 = run("nonredundant " + ideas.string() + " --threshold 1 --group --out " +
                (dir / "nr2").string());
  CHECK(r2.status == 0);
  CHECK(ideanet::read_csv(dir / "nr2" / "nonredundant.csv").size() == 2);

  // threshold 0 -> usage error.
  CHECK(run("nonredundant " + ideas.string() + " --threshold 0").status == 1);

  // Pool selector filters to nothing -> zero group count.
  auto r3 = run("nonredundant " + ideas.string() +
                " --threshold 1 --pool trial=2 --group --out " +
                (dir / "nr3").string());
  CHECK(r3.status == 0);
  CHECK(ideanet::read_csv(dir / "nr3" / "nonredundant.csv")[1][2] == "0");
}

TEST_CASE("jaccard command") {
  auto dir = sandbox();
  auto a = write(dir, "a.txt", "x\ny\n");
  auto b = write(dir, "b.txt", "y\nz\n");
  auto r = run("jaccard " + a.string() + " " + b.string());
  CHECK(r.status == 0);
  CHECK(r.out.substr(0, 12) == "0.3333333333");

  auto e1 = write(dir, "e1.txt", "");
  auto e2 = write(dir, "e2.txt", "");
  CHECK(run("jaccard " + e1.string() + " " + e2.string()).out == "1\n");
}

TEST_CASE("wmd command") {
  auto dir = sandbox();
  auto docs = write(dir, "docs.csv",
                    "node,text\nn1,red apple\nn2,red apple\nn3,zzz qqq\n");
  auto pairs = write(dir, "pairs.csv", "node_a,node_b\nn1,n2\nn1,n3\n");
  auto emb = write(dir, "emb.txt", "red 1 0\napple 0 1\ngreen 1 1\n");
  auto out = dir / "wmd";

  auto r = run("wmd " + docs.string() + " " + pairs.string() + " " + emb.string() +
               " --out " + out.string() + " --quiet");
  CHECK(r.status == 0);
  auto rows = ideanet::read_csv(out / "wmd.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == std::vector<std::string>{"n1", "n2", "0"});
  CHECK(rows[2][2] == "");  // OOV-only doc flagged with an empty value
}

TEST_CASE("stopword sources: flag beats environment") {
  auto dir = sandbox();
  // "red" stopped -> both docs reduce to {apple} -> distance 0.
  auto stop = write(dir, "stop.txt", "red\n");
  auto docs = write(dir, "sdocs.csv", "node,text\nn1,red apple\nn2,apple\n");
  auto pairs = write(dir, "spairs.csv", "node_a,node_b\nn1,n2\n");
  auto emb = write(dir, "semb.txt", "red 1 0\napple 0 1\n");
  auto out = dir / "wmd_stop";
  auto r = run("wmd " + docs.string() + " " + pairs.string() + " " + emb.string() +
               " --stopwords " + stop.string() + " --out " + out.string());
  CHECK(r.status == 0);
  CHECK(ideanet::read_csv(out / "wmd.csv")[1][2] == "0");

  // Same via IDEANET_STOPWORDS.
  std::string cmd = "IDEANET_STOPWORDS=" + stop.string() + " " + IDEANET_CLI +
                    " wmd " + docs.string() + " " + pairs.string() + " " +
                    emb.string() + " --out " + (dir / "wmd_env").string() +
                    " 2>/dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(ideanet::read_csv(dir / "wmd_env" / "wmd.csv")[1][2] == "0");
}

TEST_CASE("project command") {
  auto dir = sandbox();
  auto net = write(dir, "net.csv",
                   "trial,round,ego,alter\n"
                   "1,1,E1,A1\n1,1,E1,A2\n1,1,E2,A2\n1,1,E2,A3\n1,1,E3,A4\n");
  auto out = dir / "proj";
  auto r = run("project " + net.string() + " --out " + out.string());
  CHECK(r.status == 0);
  auto rows = ideanet::read_csv(out / "projection.csv");
  REQUIRE(rows.size() == 4);  // header + 3 pairs
  CHECK(rows[1] == std::vector<std::string>{"1", "1", "E1", "E2", "1"});
  CHECK(rows[2] == std::vector<std::string>{"1", "1", "E1", "E3", "0"});
  CHECK(rows[3] == std::vector<std::string>{"1", "1", "E2", "E3", "0"});
}

TEST_CASE("simulate command: tiny run, determinism, config file") {
  auto dir = sandbox();
  auto config = write(dir, "sim.conf",
                      "# tiny sweep\n"
                      "instances = 1\n"
                      "runs_per_instance = 1\n"
                      "p_r_grid = 0.5\n"
                      "seed = 9\n");
  auto out1 = dir / "s1";
  auto r1 = run("simulate --config " + config.string() + " --out " + out1.string());
  CHECK(r1.status == 0);
  auto rows = ideanet::read_csv(out1 / "records.csv");
  REQUIRE(rows.size() == 2);  // header + single record
  CHECK(rows[1][0] == "linear");
  CHECK(rows[1][1] == "none");

  // Identical config -> byte-identical records and aggregate.
  auto out2 = dir / "s2";
  CHECK(run("simulate --config " + config.string() + " --out " + out2.string())
            .status == 0);
  CHECK(read_text(out1 / "records.csv") == read_text(out2 / "records.csv"));
  CHECK(read_text(out1 / "aggregate.csv") == read_text(out2 / "aggregate.csv"));

  // --set overrides the config file; --seed overrides config seed.
  auto out3 = dir / "s3";
  auto r3 = run("simulate --config " + config.string() +
                " --set p_r_grid=0,1 --set redundancy=full --seed 10 --out " +
                out3.string() + " --svg");
  CHECK(r3.status == 0);
  auto rows3 = ideanet::read_csv(out3 / "records.csv");
  REQUIRE(rows3.size() == 3);
  CHECK(rows3[1][1] == "full");
  CHECK(fs::exists(out3 / "sweep.svg"));
  CHECK(read_text(out3 / "sweep.svg").substr(0, 4) == "<svg");

  // Serial vs parallel execution agree byte-for-byte.
  auto out4 = dir / "s4";
  auto out5 = dir / "s5";
  std::string common = "simulate --set instances=4 --set runs_per_instance=3 "
                       "--set p_r_grid=0,0.5,1 --seed 77 ";
  CHECK(run(common + "--threads 1 --out " + out4.string()).status == 0);
  CHECK(run(common + "--threads 4 --out " + out5.string()).status == 0);
  CHECK(read_text(out4 / "records.csv") == read_text(out5 / "records.csv"));

  // Bad config values -> parse or domain errors.
  auto badconf = write(dir, "bad.conf", "m = seven\n");
  CHECK(run("simulate --config " + badconf.string()).status == 2);
  auto badval = write(dir, "badval.conf", "m = 4\n");
  CHECK(run("simulate --config " + badval.string()).status == 3);
}

TEST_CASE("regress command") {
  auto dir = sandbox();
  std::string body = "trial,alter,followers_frac,u_rel,r_rel,q_rel\n";
  // Planted: y follows u almost exactly.
  for (int i = 0; i < 12; ++i) {
    double u = 0.05 + 0.01 * i;
    body += "1,A" + std::to_string(i) + "," + ideanet::format_real(u * 2) + "," +
            ideanet::format_real(u) + "," +
            ideanet::format_real(0.08 + 0.003 * ((i * 7) % 5)) + "," +
            ideanet::format_real(0.08 + 0.004 * ((i * 3) % 4)) + "\n";
  }
  auto input = write(dir, "reg.csv", body);
  auto out = dir / "reg";
  auto r = run("regress " + input.string() + " --out " + out.string());
  CHECK(r.status == 0);
  auto rows = ideanet::read_csv(out / "regression.csv");
  REQUIRE(rows.size() == 6);  // header + 3 terms + R2 + adj_R2
  CHECK(rows[0] == std::vector<std::string>{"term", "beta", "se", "t", "p"});
  CHECK(rows[1][0] == "u_rel");
  CHECK(std::stod(rows[1][1]) > 0.9);  // dominant planted effect
  CHECK(rows[4][0] == "R2");
  CHECK(std::stod(rows[4][1]) > 0.95);
}

TEST_CASE("ttest command") {
  auto dir = sandbox();
  auto input = write(dir, "tt.csv",
                     "group,value\na,1\na,2\na,3\nb,4\nb,5\nb,6\n");
  auto out = dir / "tt";
  auto r = run("ttest " + input.string() + " --out " + out.string());
  CHECK(r.status == 0);
  auto rows = ideanet::read_csv(out / "ttest.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "a_vs_b");
  CHECK(std::stod(rows[1][2]) == 4.0);  // pooled df
  CHECK(std::stod(rows[1][1]) < -3.6);

  // Three groups -> three pairwise rows with Bonferroni over 3.
  auto input3 = write(dir, "tt3.csv",
                      "group,value\na,1\na,2\nb,4\nb,5\nc,9\nc,11\n");
  auto r3 = run("ttest " + input3.string() + " --out " + (dir / "tt3").string());
  CHECK(r3.status == 0);
  auto rows3 = ideanet::read_csv(dir / "tt3" / "ttest.csv");
  REQUIRE(rows3.size() == 4);
  CHECK(std::stod(rows3[1][4]) ==
        doctest::Approx(std::min(1.0, std::stod(rows3[1][3]) * 3)).epsilon(1e-9));

  CHECK(run("ttest " + write(dir, "tt1.csv", "group,value\na,1\na,2\n").string())
            .status == 3);
}

TEST_CASE("agreement command") {
  auto dir = sandbox();
  auto input = write(dir, "ag.csv",
                     "idea,r1,r2,r3\ni1,1,2,1\ni2,2,3,2\ni3,3,4,3\ni4,4,5,4\n");
  auto out = dir / "ag";
  auto r = run("agreement " + input.string() + " --out " + out.string());
  CHECK(r.status == 0);
  auto rows = ideanet::read_csv(out / "agreement.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][0] == "icc_3k");
  CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rows[2][0] == "krippendorff_alpha");

  // Missing cells: ICC skipped, alpha still computed.
  auto sparse = write(dir, "ag2.csv", "idea,r1,r2\ni1,1,1\ni2,2,\ni3,3,3\n");
  auto r2 = run("agreement " + sparse.string() + " --out " + (dir / "ag2").string() +
                " --quiet");
  CHECK(r2.status == 0);
  auto rows2 = ideanet::read_csv(dir / "ag2" / "agreement.csv");
  REQUIRE(rows2.size() == 2);
  CHECK(rows2[1][0] == "krippendorff_alpha");
  CHECK(std::stod(rows2[1][1]) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("usage errors exit 1") {
  CHECK(run("").status == 1);
  CHECK(run("frobnicate").status == 1);
  CHECK(run("quotient onlyonearg").status == 1);
}

TEST_CASE("emitted CSVs round-trip byte-identically") {
  auto dir = sandbox();
  auto ideas = write(dir, "rt.csv",
                     std::string(kIdeasHeader) +
                         "1,dynamic,1,1,P1,i1,b1,a,\"text, with comma\"\n");
  auto tax = write(dir, "rt.tsv", "a\troot\n");
  auto out = dir / "rt1";
  REQUIRE(run("quotient " + ideas.string() + " " + tax.string() + " --out " +
              out.string())
              .status == 0);
  // Re-emit: parse and re-serialize with the library writer.
  auto text = read_text(out / "quotient.csv");
  auto rows = ideanet::parse_csv(text);
  std::string again;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) again += ",";
      again += ideanet::csv_escape(row[i]);
    }
    again += "\n";
  }
  CHECK(again == text);
}
