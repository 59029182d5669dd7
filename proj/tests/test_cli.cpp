#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "climd/io.hpp"
#include "doctest.h"
#include "support.hpp"

using climd::read_text_file;
using climd::testing::run_cli;
using climd::testing::ScratchDir;
namespace fs = std::filesystem;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string labels_file(const std::vector<std::size_t>& counts) {
  std::string text = "sample_id,label\n";
  std::size_t next = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t k = 0; k < counts[c]; ++k) text += "s" + std::to_string(next++) + "," + std::to_string(c) + "\n";
  }
  return text;
}

}  // namespace

TEST_CASE("cli: fit reports the fitted alpha") {
  ScratchDir dir("fit");
  write_file(dir / "labels.csv", labels_file({100, 50, 10}));
  const auto r = run_cli("fit --labels " + dir / "labels.csv" + " --out " + dir / "out");
  CHECK(r.code == 0);
  CHECK(r.out.find("5.8895555196866") != std::string::npos);
  const auto report = read_text_file(dir / "out/distribution.csv");
  CHECK(report.find("# alpha_hat=5.8895555196866") != std::string::npos);
  CHECK(fs::exists(dir / "out/manifest.json"));

  const auto stdout_only = run_cli("fit --labels " + dir / "labels.csv");
  CHECK(stdout_only.code == 0);
  CHECK(stdout_only.out.find("class_id,count,rank\n0,100,1\n1,50,2\n2,10,3\n") != std::string::npos);
}

TEST_CASE("cli: balanced labels are flagged, not rejected") {
  ScratchDir dir("balanced");
  write_file(dir / "labels.csv", labels_file({7, 7, 7}));
  const auto r = run_cli("fit --labels " + dir / "labels.csv");
  CHECK(r.code == 0);
  CHECK(r.out.find("alpha_hat=degenerate-balanced") != std::string::npos);
}

TEST_CASE("cli: fit errors") {
  ScratchDir dir("fiterr");
  const auto missing = run_cli("fit --labels " + dir / "nope.csv" + " --out " + dir / "out");
  CHECK(missing.code == 3);
  CHECK_FALSE(fs::exists(dir / "out"));

  write_file(dir / "bad.csv", "sample_id,label\na,0\nb,1\nc,x\n");
  const auto bad = run_cli("fit --labels " + dir / "bad.csv" + " --out " + dir / "out");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("bad.csv:4:") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));

  CHECK(run_cli("fit --labels").code == 1);
  CHECK(run_cli("frobnicate").code == 1);
}

TEST_CASE("cli: figure2 table") {
  const auto r = run_cli("figure2");
  CHECK(r.code == 0);
  CHECK(r.out.starts_with("epoch,rank_1,rank_2,rank_3,rank_4,rank_5,rank_6,rank_7,rank_8,rank_9,rank_10\n"
                          "1,10,10,10,10,10,10,10,10,10,10\n"));
  CHECK(r.out.find("\n10,501,") != std::string::npos);
}

TEST_CASE("cli: eval") {
  ScratchDir dir("eval");
  write_file(dir / "pred.csv", "sample_id,true,pred\na,0,0\nb,0,1\nc,1,1\n");
  const auto r = run_cli("eval --predictions " + dir / "pred.csv");
  CHECK(r.code == 0);
  CHECK(r.out.find("accuracy,0.6666666666666666") != std::string::npos);
  CHECK(r.out.find("macro_f1,0.6666666666666666") != std::string::npos);
  CHECK(r.out.find("0,1,1\n1,0,1\n") != std::string::npos);
}

TEST_CASE("cli: pipeline, score and schedule agree") {
  ScratchDir dir("pipe");
  const auto p = run_cli("pipeline --synthetic --n 200 --epochs 8 --out " + dir / "p");
  REQUIRE(p.code == 0);
  for (const char* f : {"traces.jsonl", "difficulty.csv", "distribution.csv", "schedule.csv", "summary.csv",
                        "targets.csv", "manifest.json"}) {
    CHECK(fs::exists(dir / (std::string("p/") + f)));
  }

  const auto again = run_cli("pipeline --synthetic --n 200 --epochs 8 --out " + dir / "p2");
  REQUIRE(again.code == 0);
  for (const char* f : {"traces.jsonl", "difficulty.csv", "schedule.csv"}) {
    CHECK(read_text_file(dir / (std::string("p/") + f)) == read_text_file(dir / (std::string("p2/") + f)));
  }

  REQUIRE(run_cli("score --traces " + dir / "p/traces.jsonl" + " --out " + dir / "s").code == 0);
  CHECK(read_text_file(dir / "s/difficulty.csv") == read_text_file(dir / "p/difficulty.csv"));

  const auto s = run_cli("schedule --difficulty " + dir / "s/difficulty.csv" + " --distribution " +
                         dir / "p/distribution.csv" + " --epochs 8 --out " + dir / "sc");
  REQUIRE(s.code == 0);
  CHECK(read_text_file(dir / "sc/schedule.csv") == read_text_file(dir / "p/schedule.csv"));
  CHECK(read_text_file(dir / "sc/summary.csv") == read_text_file(dir / "p/summary.csv"));

  const auto manifest = read_text_file(dir / "sc/manifest.json");
  CHECK(manifest.find("\"command\": \"schedule\"") != std::string::npos);
  CHECK(manifest.find(dir / "s/difficulty.csv") != std::string::npos);
}

TEST_CASE("cli: thread cap does not change output") {
  ScratchDir dir("threads");
  REQUIRE(run_cli("pipeline --synthetic --n 200 --epochs 4 --out " + dir / "p").code == 0);
  REQUIRE(run_cli("score --threads 4 --traces " + dir / "p/traces.jsonl" + " --out " + dir / "a").code == 0);
  REQUIRE(run_cli("score --threads 1 --traces " + dir / "p/traces.jsonl" + " --out " + dir / "b").code == 0);
  const std::string capped = std::string("CLIMD_THREADS=1 ") + CLIMD_BIN + " score --traces " + dir / "p/traces.jsonl" +
                             " --out " + dir / "c >/dev/null";
  REQUIRE(std::system(capped.c_str()) == 0);
  CHECK(read_text_file(dir / "a/difficulty.csv") == read_text_file(dir / "b/difficulty.csv"));
  CHECK(read_text_file(dir / "a/difficulty.csv") == read_text_file(dir / "c/difficulty.csv"));
}

TEST_CASE("cli: corrupt trace line aborts the pipeline") {
  ScratchDir dir("corrupt");
  REQUIRE(run_cli("pipeline --synthetic --n 200 --epochs 4 --out " + dir / "p").code == 0);
  std::string traces = read_text_file(dir / "p/traces.jsonl");
  std::size_t pos = 0;
  for (int line = 1; line < 5; ++line) pos = traces.find('\n', pos) + 1;
  traces.insert(pos, "{\"sample_id\": \"broken\", \"label\": 0}\n");
  write_file(dir / "bad.jsonl", traces);
  const auto r = run_cli("pipeline --traces " + dir / "bad.jsonl" + " --out " + dir / "q");
  CHECK(r.code == 1);
  CHECK(r.out.find("bad.jsonl:5:") != std::string::npos);
  CHECK(r.out.find("stage read-traces") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "q"));

  CHECK(run_cli("pipeline --out " + dir / "q").code == 1);
}

TEST_CASE("cli: simulate writes a report and manifest") {
  ScratchDir dir("sim");
  const auto r = run_cli("simulate --n 300 --epochs 3 --seeds 2 --out " + dir / "sim");
  REQUIRE(r.code == 0);
  const auto report = read_text_file(dir / "sim/report.csv");
  CHECK(report.starts_with("seed,arm,"));
  CHECK(report.find("\nwins,climd,") != std::string::npos);
  const auto manifest = read_text_file(dir / "sim/manifest.json");
  CHECK(manifest.find("\"seeds\": [") != std::string::npos);
  CHECK(manifest.find("report.csv") != std::string::npos);
}
