// Copyright 2026 The Runahead Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "json.hpp"
#include "runahead/graph.hpp"
#include "runahead/io.hpp"

namespace runahead {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kAssets = RUNAHEAD_ASSETS_DIR;

struct Cli {
  int code = 0;
  std::string out;
  std::string err;
};

Cli cli(std::vector<std::string> args) {
  args.insert(args.begin(), "runahead");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Cli r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("runahead_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::map<std::string, std::string>> parse_tsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, '\t')) cells.push_back(c);
    if (header.empty()) {
      header = cells;
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(row);
  }
  return rows;
}

TEST(Cli, RunChain3Speculative) {
  auto dir = scratch("chain3");
  auto r = cli({"run", kAssets + "/scenarios/chain3.json", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto summary = json::parse(read_text_file(dir / "summary.json"));
  EXPECT_DOUBLE_EQ(summary.at("t_exec").get<double>(), 3.0);
  EXPECT_DOUBLE_EQ(summary.at("t_vrf").get<double>(), 3.0);
  EXPECT_TRUE(fs::exists(dir / "trace.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "ledger.jsonl"));

  auto seq = cli({"run", kAssets + "/scenarios/chain3.json", "--out", dir.string(), "--mode",
                  "sequential"});
  ASSERT_EQ(seq.code, 0) << seq.err;
  EXPECT_DOUBLE_EQ(json::parse(seq.out).at("t_exec").get<double>(), 5.0);
}

TEST(Cli, NoVerifyHasNoVerifierCost) {
  auto dir = scratch("noverify");
  auto r = cli({"run", kAssets + "/scenarios/chain3.json", "--out", dir.string(), "--mode",
                "noverify"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto summary = json::parse(r.out);
  EXPECT_DOUBLE_EQ(summary.at("t_exec").get<double>(), 3.0);
  EXPECT_DOUBLE_EQ(summary.at("verification_cost").get<double>(), 0.0);
}

TEST(Cli, RevisionRollsBack) {
  auto dir = scratch("revise");
  auto r = cli({"run", kAssets + "/scenarios/chain3_revise.json", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto summary = json::parse(r.out);
  EXPECT_EQ(summary.at("rollbacks").get<int>(), 1);
  EXPECT_DOUBLE_EQ(summary.at("t_exec").get<double>(), 5.0);
  EXPECT_GT(summary.at("wasted_cost").get<double>(), 0.0);
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(cli({"run", "/definitely/not/here.json"}).code, 2);
  EXPECT_EQ(cli({"run", kAssets + "/scenarios/chain3.json", "--mode", "warp"}).code, 2);
  EXPECT_EQ(cli({"bogus"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
  auto bad = scratch("bad.json");
  write_text_file(bad, "{\"workflow\": ");
  EXPECT_EQ(cli({"run", bad.string()}).code, 2);
  fs::remove(bad);
}

TEST(Cli, SweepRowsRespectInvariants) {
  auto r = cli({"sweep", kAssets + "/scenarios/report6_sim.json", "--budget", "0,0.001,inf",
                "--match-rate", "1,0.5", "--vrf-scale", "0.5,1,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = parse_tsv(r.out);
  ASSERT_EQ(rows.size(), 18u);
  std::map<std::string, double> last_nspec;
  std::size_t any_rollbacks = 0;
  for (const auto& row : rows) {
    if (row.at("match_rate") == "1") {
      EXPECT_EQ(std::stod(row.at("wasted_cost")), 0.0);
    }
    if (row.at("budget") == "0") {
      EXPECT_EQ(row.at("t_exec"), row.at("t_exec_seq"));
      EXPECT_EQ(row.at("rollbacks"), "0");
    }
    EXPECT_LE(std::stod(row.at("t_exec")), std::stod(row.at("t_exec_seq")) + 1e-9);
    any_rollbacks += std::stoul(row.at("rollbacks"));
    // vrf_scale is the innermost loop: nspec must not shrink as it grows.
    const auto key = row.at("budget") + "/" + row.at("match_rate");
    const double nspec = std::stod(row.at("nspec"));
    if (row.at("vrf_scale") != "0.5") {
      EXPECT_GE(nspec, last_nspec[key]);
    }
    last_nspec[key] = nspec;
  }
  EXPECT_GT(any_rollbacks, 0u);
}

TEST(Cli, SameSeedGivesIdenticalTraces) {
  auto a = scratch("seed_a"), b = scratch("seed_b");
  const auto sc = kAssets + "/scenarios/report6_sim.json";
  ASSERT_EQ(cli({"run", sc, "--out", a.string(), "--seed", "11"}).code, 0);
  ASSERT_EQ(cli({"run", sc, "--out", b.string(), "--seed", "11"}).code, 0);
  auto ta = read_text_file(a / "trace.jsonl");
  EXPECT_EQ(ta, read_text_file(b / "trace.jsonl"));
  EXPECT_EQ(read_text_file(a / "ledger.jsonl"), read_text_file(b / "ledger.jsonl"));

  auto g = load_workflow_file(kAssets + "/workflows/report6.json");
  std::istringstream in(ta);
  std::string line;
  std::size_t events = 0;
  while (std::getline(in, line)) {
    auto j = json::parse(line);
    if (j.contains("summary")) continue;
    ++events;
    EXPECT_TRUE(g.find(j.at("node").get<std::string>())) << line;
    const auto ev = j.at("event").get<std::string>();
    EXPECT_TRUE(ev == "state-transition" || ev == "spec-start" || ev == "commit" ||
                ev == "rollback")
        << ev;
  }
  EXPECT_GT(events, 0u);
}

TEST(Cli, FaultCampaignIsDeterministic) {
  auto a = scratch("faults_a.jsonl"), b = scratch("faults_b.jsonl");
  const auto cfg = kAssets + "/faults/campaign.json";
  auto ra = cli({"faults", cfg, "--seed", "3", "--trials", "5", "--out", a.string()});
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(cli({"faults", cfg, "--seed", "3", "--trials", "5", "--out", b.string()}).code, 0);
  EXPECT_EQ(read_text_file(a), read_text_file(b));
  EXPECT_FALSE(ra.out.empty());
}

TEST(Cli, SelectorTrainAndEvaluate) {
  auto dir = scratch("selector");
  fs::create_directories(dir);
  const auto train = (dir / "train.jsonl").string(), test = (dir / "test.jsonl").string();
  const auto ckpt = (dir / "policy.json").string();
  ASSERT_EQ(cli({"train-selector", "--synthetic", "200", "--seed", "1", "--out", train}).code, 0);
  ASSERT_EQ(cli({"train-selector", "--synthetic", "100", "--seed", "2", "--out", test}).code, 0);
  auto t = cli({"train-selector", "--data", train, "--out", ckpt, "--steps", "200"});
  ASSERT_EQ(t.code, 0) << t.err;
  auto e = cli({"eval-selector", "--checkpoint", ckpt, "--data", test, "--train", train});
  ASSERT_EQ(e.code, 0) << e.err;
  auto rows = parse_tsv(e.out);
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows[0].at("strategy"), "learned");
  EXPECT_EQ(rows[1].at("strategy"), "tabular");
  EXPECT_EQ(rows[2].at("strategy"), "oracle");
  EXPECT_DOUBLE_EQ(std::stod(rows[2].at("argmax_accuracy")), 1.0);
  EXPECT_GE(std::stod(rows[0].at("argmax_accuracy")), 0.9);
  EXPECT_EQ(cli({"train-selector", "--out", ckpt}).code, 2);
}

TEST(Cli, LearnedAndTabularScenariosRun) {
  for (const char* name : {"diamond_learned", "diamond_tabular"}) {
    auto dir = scratch(name);
    auto r = cli({"run", kAssets + "/scenarios/" + name + ".json", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto summary = json::parse(r.out);
    EXPECT_EQ(summary.at("verifiers").size(), 4u) << name;
    EXPECT_FALSE(summary.at("failed").get<bool>());
  }
}

TEST(Cli, CalibrateWritesThresholds) {
  auto out = scratch("thresholds.json");
  auto r = cli({"calibrate-sim", "--data", kAssets + "/calibration/pairs.jsonl", "--out",
                out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(read_text_file(out));
  EXPECT_FALSE(j.empty());
  EXPECT_NE(r.out.find("rouge-l"), std::string::npos);
}

}  // namespace
}  // namespace runahead
