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

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "runahead/error.hpp"
#include "oracles.hpp"
#include "runahead/selector.hpp"

namespace runahead {
namespace {

using testing::loss_oracle;

std::vector<VerifierKind> three_kinds() {
  return {VerifierKind::self_refine(), VerifierKind::llm_as_judge(), VerifierKind::debate(1)};
}

SelectorPolicy small_policy(std::size_t dim = 16) {
  return SelectorPolicy(std::make_shared<HashedBowFeaturizer>(dim), three_kinds());
}

TrainingSample sample(std::string prompt, std::vector<double> gain, std::vector<double> cost) {
  TrainingSample s;
  s.prompt = std::move(prompt);
  s.perf_gain = std::move(gain);
  s.cost = std::move(cost);
  return s;
}

TEST(Utility, Examples) {
  EXPECT_NEAR(utility(0.10, 0.02, 1.0), 0.08, 1e-15);
  EXPECT_DOUBLE_EQ(utility(0.3, 123.0, 0.0), 0.3);
  EXPECT_DOUBLE_EQ(utility(0.0, 1.0, 2.0), -2.0);
}

TEST(GroupAdvantage, Examples) {
  const double u[] = {0.3, 0.1, 0.2};
  auto a = group_advantage(u);
  EXPECT_NEAR(a[0], 0.1, 1e-12);
  EXPECT_NEAR(a[1], -0.1, 1e-12);
  EXPECT_NEAR(a[2], 0.0, 1e-12);
  const double c[] = {0.7, 0.7, 0.7, 0.7};
  for (double v : group_advantage(c)) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(GroupAdvantage, SumsToZero) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> u(1 + rng() % 8);
    for (auto& v : u) v = g(rng);
    auto a = group_advantage(u);
    EXPECT_NEAR(std::accumulate(a.begin(), a.end(), 0.0), 0.0, 1e-12);
  }
}

TEST(Softmax, ValidDistributionForExtremeInputs) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> big(-800.0, 800.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> z(1 + rng() % 7);
    for (auto& v : z) v = big(rng);
    auto p = softmax(z);
    double sum = 0.0;
    for (double v : p) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(SelectVerifier, ZeroHeadIsUniform) {
  auto p = small_policy();
  auto s = select_verifier(p, "anything at all");
  for (double v : s.distribution) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(s.index, 0u);
  EXPECT_EQ(s.kind, VerifierKind::self_refine());
}

TEST(SelectVerifier, Deterministic) {
  auto p = small_policy();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (auto& w : p.weights()) w = g(rng);
  EXPECT_EQ(select_verifier(p, "same prompt").distribution,
            select_verifier(p, "same prompt").distribution);
}

TEST(Featurizer, NormalizedAndDeterministic) {
  HashedBowFeaturizer f(64);
  auto x = f.features("The quick brown fox. The end.");
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  EXPECT_NEAR(n2, 1.0, 1e-12);
  EXPECT_EQ(x, f.features("the QUICK brown fox the end"));
  for (double v : f.features("")) EXPECT_EQ(v, 0.0);
}

TEST(GrpoLoss, MatchesDefinition) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  auto p = small_policy();
  for (auto& w : p.weights()) w = g(rng);
  std::vector<TrainingSample> batch = {sample("solve x + 1 = 2", {0.1, -0.2, 0.4}, {0.1, 0.0, 0.5}),
                                       sample("write a poem", {0.0, 0.3, 0.1}, {0.2, 0.1, 0.9})};
  EXPECT_NEAR(grpo_loss(p, batch, 0.7), loss_oracle(p, batch, 0.7), 1e-12);
}

TEST(GrpoGradient, MatchesCentralFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-0.5, 0.5), c(0.0, 1.0);
  const char* words[] = {"alpha", "beta", "gamma", "delta", "eps", "zeta"};
  const double h = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    auto p = small_policy(8);
    for (auto& w : p.weights()) w = g(rng);
      std::vector<TrainingSample> batch;
    for (int i = 0; i < 3; ++i) {
      std::string prompt;
      for (int k = 0; k < 4; ++k) prompt += std::string(words[rng() % 6]) + " ";
      batch.push_back(sample(prompt, {u(rng), u(rng), u(rng)}, {c(rng), c(rng), c(rng)}));
    }
    auto grad = grpo_gradient(p, batch, 1.0);
    auto check = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + h;
      const double up = loss_oracle(p, batch, 1.0);
      param = saved - h;
      const double down = loss_oracle(p, batch, 1.0);
      param = saved;
      const double numeric = (up - down) / (2 * h);
      const double rel = std::abs(analytic - numeric) / std::max(1e-3, std::abs(numeric));
      worst = std::max(worst, rel);
    };
    for (std::size_t i = 0; i < p.weights().size(); ++i) check(p.weights()[i], grad.weights[i]);
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(GrpoUpdate, ZeroAdvantagesLeaveWeightsUnchanged) {
  auto p = small_policy();
  p.weights()[3] = 0.25;
  auto before = p.weights();
  std::vector<TrainingSample> batch = {sample("hello there", {0.2, 0.2, 0.2}, {0.1, 0.1, 0.1})};
  grpo_update(p, batch, 1.0, 0.1);
  EXPECT_EQ(p.weights(), before);
}

TEST(GrpoUpdate, MovesProbabilityTowardPositiveAdvantage) {
  auto p = small_policy();
  // Utilities (lambda 0) [0.3, 0.1, 0.2] give advantages [0.1, -0.1, 0].
  std::vector<TrainingSample> batch = {sample("route the query", {0.3, 0.1, 0.2}, {0, 0, 0})};
  auto before = p.distribution(std::string_view("route the query"));
  grpo_update(p, batch, 0.0, 0.5);
  auto after = p.distribution(std::string_view("route the query"));
  EXPECT_GT(after[0], before[0]);
  EXPECT_LT(after[1], before[1]);
}

TEST(GrpoUpdate, NonFiniteLossThrows) {
  auto p = small_policy();
  std::vector<TrainingSample> batch = {sample("x", {NAN, 0.0, 0.0}, {0, 0, 0})};
  try {
    grpo_update(p, batch, 1.0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteLoss);
  }
}

TEST(Training, LossTrendsDownOnSeparableSet) {
  auto data = synthetic_dominated_dataset(64, 3, 9);
  auto p = small_policy(256);
  TrainOptions opt;
  opt.steps = 100;
  opt.batch_size = data.size();
  auto losses = train_selector(p, data, opt);
  ASSERT_EQ(losses.size(), 100u);
  std::vector<double> ma;
  for (std::size_t i = 10; i <= losses.size(); ++i) {
    ma.push_back(std::accumulate(losses.begin() + (i - 10), losses.begin() + i, 0.0) / 10);
  }
  for (std::size_t i = 1; i < ma.size(); ++i) EXPECT_LE(ma[i], ma[i - 1] + 1e-12) << i;
  EXPECT_LT(ma.back(), ma.front());
}

TEST(Training, LearnsDominantVerifier) {
  auto train = synthetic_dominated_dataset(400, 5, 1);
  auto test = synthetic_dominated_dataset(200, 5, 2);
  SelectorPolicy p(std::make_shared<HashedBowFeaturizer>(), default_verifier_set());
  TrainOptions opt;
  opt.seed = 3;
  train_selector(p, train, opt);
  std::size_t hits = 0;
  for (const auto& s : test) {
    if (select_verifier(p, s.prompt).index == utility_argmax(s, opt.lambda)) ++hits;
  }
  EXPECT_GE(hits, 180u);
}

TEST(UtilityArgmax, CostWeaklyDecreasesInLambda) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.3, 0.6), c(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng() % 5;
    TrainingSample s;
    for (std::size_t k = 0; k < n; ++k) {
      s.perf_gain.push_back(u(rng));
      s.cost.push_back(c(rng));
    }
    double prev = INFINITY;
    for (double lambda = 0.0; lambda <= 5.0; lambda += 0.05) {
      double cost = s.cost[utility_argmax(s, lambda)];
      EXPECT_LE(cost, prev);
      prev = cost;
    }
  }
}

TEST(Oracle, Examples) {
  TrainingSample s = sample("q", {0, 0, 0}, {0.5, 0.2, 0.1});
  s.correct = {true, true, false};
  auto c = oracle_select(s);
  EXPECT_EQ(c.index, 1u);
  EXPECT_FALSE(c.fallback);

  s.correct = {false, false, false};
  c = oracle_select(s);
  EXPECT_EQ(c.index, 2u);
  EXPECT_TRUE(c.fallback);

  TrainingSample one = sample("q", {0}, {3.0});
  one.correct = {false};
  EXPECT_EQ(oracle_select(one).index, 0u);

  TrainingSample tie = sample("q", {0, 0}, {0.2, 0.2});
  tie.correct = {true, true};
  EXPECT_EQ(oracle_select(tie).index, 0u);
}

TEST(Tabular, PerCategoryBest) {
  std::vector<TrainingSample> data;
  for (int i = 0; i < 4; ++i) {
    auto s = sample("m", {0.1, 0.5, 0.0}, {0.0, 0.1, 0.0});
    s.category = TaskCategory::kMath;
    data.push_back(s);
    auto t = sample("c", {0.3, 0.1, 0.0}, {0.0, 0.0, 0.0});
    t.category = TaskCategory::kCode;
    data.push_back(t);
  }
  auto tab = TabularSelector::fit(data, 1.0, 3);
  EXPECT_EQ(tab.select(TaskCategory::kMath), 1u);
  EXPECT_EQ(tab.select(TaskCategory::kCode), 0u);
  EXPECT_EQ(tab.select(TaskCategory::kTool), 0u);
}

TEST(Checkpoint, RoundTrip) {
  auto p = small_policy(32);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (auto& w : p.weights()) w = g(rng);
  auto path = std::filesystem::temp_directory_path() / "runahead_policy_test.json";
  save_policy(p, path);
  auto q = load_policy(path);
  std::filesystem::remove(path);
  EXPECT_EQ(q.weights(), p.weights());
  EXPECT_EQ(q.verifiers(), p.verifiers());
  EXPECT_EQ(q.dim(), 32u);
  EXPECT_THROW(parse_policy("{\"format\":\"other\"}"), Error);
}

TEST(TrainingData, JsonlRoundTripAndValidation) {
  auto data = synthetic_dominated_dataset(10, 4, 8);
  data[0].correct = {true, false, true, false};
  data[1].category = TaskCategory::kTool;
  auto back = parse_training_jsonl(dump_training_jsonl(data));
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(back[i].prompt, data[i].prompt);
    EXPECT_EQ(back[i].perf_gain, data[i].perf_gain);
    EXPECT_EQ(back[i].cost, data[i].cost);
    EXPECT_EQ(back[i].correct, data[i].correct);
    EXPECT_EQ(back[i].category, data[i].category);
  }
  EXPECT_THROW(validate(sample("x", {0.1}, {0.1, 0.2}), 2), Error);
  EXPECT_THROW(validate(sample("x", {0.1, 0.1}, {0.1, -0.2}), 2), Error);
}

}  // namespace
}  // namespace runahead
