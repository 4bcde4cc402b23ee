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

#include <random>

#include "runahead/error.hpp"
#include "runahead/fsm.hpp"
#include "runahead/scheduler.hpp"
#include "oracles.hpp"

namespace runahead {
namespace {

using testing::invalidated_sum;
using testing::RandomScenario;
using testing::result;

void expect_fsm_safe(const RunResult& r) { EXPECT_EQ(testing::fsm_violation(r), ""); }

ExecResult priced(std::string output, double latency) {
  return result(std::move(output), latency, 120, 80);
}

struct Chain3 {
  WorkflowGraph g = testing::chain(3);
  ScriptedExecutor exec{"executor"};
  std::unique_ptr<ScriptedVerifier> verifier;
  std::vector<std::optional<VerifierKind>> assignment{VerifierKind::llm_as_judge(), std::nullopt,
                                                      std::nullopt};

  explicit Chain3(std::optional<std::string> revision) {
    exec.append("node1", priced("one", 1.0));
    for (int i = 0; i < 2; ++i) {
      exec.append("node2", priced("two", 1.0));
      exec.append("node3", priced("three", 1.0));
    }
    ExecResult s = priced("alt", 0.0);
    s.provider = "secondary";
    ExecResult j = priced("[[A]]", 0.0);
    j.provider = "judge";
    verifier = std::make_unique<ScriptedVerifier>(
        ScriptedVerifier::Script{{"node1", {{revision, 2.0, {s, j}}}}});
  }

  RunResult run(RunMode mode, double budget = std::numeric_limits<double>::infinity()) {
    RunOptions opt;
    opt.mode = mode;
    opt.budget = budget;
    return run_workflow({&g, &exec, verifier.get(), assignment, nullptr}, opt);
  }
};

TEST(Scheduler, Chain3SequentialVersusSpeculative) {
  Chain3 seq(std::nullopt);
  auto a = seq.run(RunMode::kSequential);
  EXPECT_DOUBLE_EQ(a.metrics.t_exec, 5.0);
  EXPECT_DOUBLE_EQ(a.metrics.t_vrf, 5.0);
  EXPECT_EQ(a.metrics.final_output, "three");

  Chain3 spec(std::nullopt);
  auto b = spec.run(RunMode::kSpeculative);
  EXPECT_DOUBLE_EQ(b.metrics.t_exec, 3.0);
  EXPECT_DOUBLE_EQ(b.metrics.t_vrf, 3.0);
  EXPECT_EQ(b.metrics.final_output, "three");
  EXPECT_EQ(b.metrics.rollbacks, 0u);
  EXPECT_EQ(b.metrics.wasted_cost.picodollars(), 0);
  ASSERT_EQ(b.plans.size(), 1u);
  EXPECT_EQ(b.plans[0].eligible, (std::vector<std::string>{"node2", "node3"}));
  EXPECT_TRUE(b.plans[0].approved);
  expect_fsm_safe(a);
  expect_fsm_safe(b);
  EXPECT_EQ(a.metrics.total_cost, b.metrics.total_cost);
}

TEST(Scheduler, Chain3RevisionRollsBack) {
  Chain3 c(std::string("a completely different first step"));
  auto r = c.run(RunMode::kSpeculative);
  EXPECT_EQ(r.metrics.rollbacks, 1u);
  EXPECT_DOUBLE_EQ(r.metrics.t_exec, 5.0);
  ASSERT_EQ(r.rollback_events.size(), 1u);
  EXPECT_EQ(r.rollback_events[0].failed_node, "node1");
  EXPECT_DOUBLE_EQ(r.rollback_events[0].timestamp, 3.0);
  EXPECT_EQ(r.rollback_events[0].invalidated, (std::vector<std::string>{"node2", "node3"}));
  CostConfig cfg;
  const auto one_exec = call_cost(cfg, [] {
    auto x = priced("two", 1.0);
    x.provider = "executor";
    return x;
  }());
  EXPECT_EQ(r.metrics.wasted_cost.picodollars(), 2 * one_exec.total().picodollars());
  EXPECT_EQ(r.metrics.wasted_cost.picodollars(), invalidated_sum(r.ledger));
  EXPECT_EQ(r.outputs.at("node1"), "a completely different first step");
  expect_fsm_safe(r);
}

TEST(Scheduler, ZeroBudgetMatchesSequential) {
  Chain3 seq(std::nullopt), zero(std::nullopt);
  auto a = seq.run(RunMode::kSequential);
  auto b = zero.run(RunMode::kSpeculative, 0.0);
  EXPECT_DOUBLE_EQ(a.metrics.t_exec, b.metrics.t_exec);
  EXPECT_DOUBLE_EQ(a.metrics.t_vrf, b.metrics.t_vrf);
  for (const auto& p : b.plans) EXPECT_FALSE(p.approved);
  for (const auto& e : b.trace) EXPECT_NE(e.event, "spec-start");
}

TEST(Scheduler, NoVerifyDiamond) {
  auto g = testing::diamond();
  ScriptedExecutor exec("executor");
  for (const char* id : {"W1", "W2", "W3", "W4"}) exec.append(id, priced(id, 1.0));
  ScriptedVerifier unused({});
  std::vector<std::optional<VerifierKind>> assign(4, VerifierKind::llm_as_judge());
  RunOptions opt;
  opt.mode = RunMode::kNoVerify;
  auto r = run_workflow({&g, &exec, &unused, assign, nullptr}, opt);
  EXPECT_DOUBLE_EQ(r.metrics.t_exec, 3.0);
  EXPECT_DOUBLE_EQ(r.metrics.t_vrf, 3.0);
  EXPECT_EQ(r.metrics.verification_cost.picodollars(), 0);
  EXPECT_EQ(r.metrics.final_output, "W4");
  expect_fsm_safe(r);
}

TEST(Scheduler, ExecutorFailureMarksRunFailed) {
  auto g = testing::chain(2);
  ScriptedExecutor exec("executor");
  exec.append("node1", priced("one", 1.0));
  ScriptedVerifier v({});
  RunOptions opt;
  opt.mode = RunMode::kNoVerify;
  auto r = run_workflow({&g, &exec, &v, {}, nullptr}, opt);
  EXPECT_TRUE(r.metrics.failed);
  EXPECT_FALSE(r.metrics.error.empty());
}

TEST(Scheduler, TraceJsonlEndsWithSummary) {
  Chain3 c(std::nullopt);
  auto r = c.run(RunMode::kSpeculative);
  auto text = trace_jsonl(r);
  auto last = text.substr(text.rfind('\n', text.size() - 2) + 1);
  auto j = nlohmann::json::parse(last);
  EXPECT_DOUBLE_EQ(j.at("summary").at("t_exec").get<double>(), 3.0);
  std::size_t lines = std::count(text.begin(), text.end(), '\n');
  EXPECT_EQ(lines, r.trace.size() + 1);
}

TEST(SchedulerProperty, ConservativeEquivalenceAndLatencyDominance) {
  std::mt19937_64 rng(31);
  std::size_t rollbacks = 0, faster = 0;
  for (int t = 0; t < 150; ++t) {
    auto s = RandomScenario::make(rng);
    auto seq = s.run(RunMode::kSequential, true);
    auto spec = s.run(RunMode::kSpeculative, true);
    ASSERT_FALSE(seq.metrics.failed) << seq.metrics.error;
    ASSERT_FALSE(spec.metrics.failed) << spec.metrics.error;
    EXPECT_EQ(spec.metrics.final_output, seq.metrics.final_output) << "trial " << t;
    EXPECT_EQ(spec.outputs, seq.outputs) << "trial " << t;
    EXPECT_LE(spec.metrics.t_exec, seq.metrics.t_exec + 1e-9) << "trial " << t;
    EXPECT_LE(spec.metrics.t_vrf, seq.metrics.t_vrf + 1e-9) << "trial " << t;
    EXPECT_GE(spec.metrics.t_vrf, spec.metrics.t_exec);
    expect_fsm_safe(seq);
    expect_fsm_safe(spec);
    rollbacks += spec.metrics.rollbacks;
    faster += spec.metrics.t_exec < seq.metrics.t_exec ? 1 : 0;
  }
  EXPECT_GT(rollbacks, 20u);
  EXPECT_GT(faster, 20u);
}

TEST(SchedulerProperty, BudgetSafetyAndWasteAccounting) {
  std::mt19937_64 rng(32);
  std::size_t approved = 0, rejected = 0;
  for (int t = 0; t < 150; ++t) {
    auto s = RandomScenario::make(rng);
    const double budget = (rng() % 4 == 0) ? INFINITY : 1e-6 * static_cast<double>(rng() % 40);
    auto r = s.run(RunMode::kSpeculative, rng() % 2 == 0, budget);
    ASSERT_FALSE(r.metrics.failed) << r.metrics.error;
    for (const auto& p : r.plans) {
      if (p.approved) {
        EXPECT_LE(p.expected_cost, budget);
      }
      EXPECT_EQ(p.budget, budget);
      (p.approved ? approved : rejected)++;
    }
    EXPECT_EQ(r.metrics.wasted_cost.picodollars(), invalidated_sum(r.ledger));
    EXPECT_EQ(r.metrics.total_cost, r.ledger.total());
    EXPECT_EQ(r.metrics.verification_cost, r.ledger.verification_total());
    expect_fsm_safe(r);
    for (const auto& ev : r.rollback_events) {
      auto f = *s.g.find(ev.failed_node);
      for (const auto& n : ev.invalidated) EXPECT_TRUE(s.g.reaches(f, *s.g.find(n)));
    }
  }
  EXPECT_GT(approved, 10u);
  EXPECT_GT(rejected, 10u);
}

TEST(SchedulerProperty, ZeroBudgetEqualsSequential) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 60; ++t) {
    auto s = RandomScenario::make(rng);
    auto seq = s.run(RunMode::kSequential, false);
    auto zero = s.run(RunMode::kSpeculative, false, 0.0);
    EXPECT_DOUBLE_EQ(zero.metrics.t_exec, seq.metrics.t_exec);
    EXPECT_DOUBLE_EQ(zero.metrics.t_vrf, seq.metrics.t_vrf);
    EXPECT_EQ(zero.metrics.final_output, seq.metrics.final_output);
    EXPECT_EQ(zero.metrics.rollbacks, 0u);
  }
}

TEST(Scheduler, WallClockSmoke) {
  auto g = testing::chain(3);
  ScriptedExecutor exec("executor");
  for (const char* id : {"node1", "node2", "node3"}) exec.append(id, priced(id, 0.02));
  ScriptedVerifier v({{"node1", {{std::nullopt, 0.04, {}}}}});
  RunOptions opt;
  opt.clock = ClockKind::kWall;
  opt.emulate_latency = true;
  std::vector<std::optional<VerifierKind>> assign{VerifierKind::llm_as_judge(), std::nullopt,
                                                  std::nullopt};
  auto r = run_workflow({&g, &exec, &v, assign, nullptr}, opt);
  ASSERT_FALSE(r.metrics.failed) << r.metrics.error;
  EXPECT_EQ(r.metrics.final_output, "node3");
  EXPECT_GE(r.metrics.t_exec, 0.05);
  EXPECT_LT(r.metrics.t_exec, 2.0);
  expect_fsm_safe(r);
}

}  // namespace
}  // namespace runahead
