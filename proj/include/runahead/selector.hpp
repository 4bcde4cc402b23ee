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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "runahead/graph.hpp"
#include "runahead/verifiers.hpp"

namespace runahead {

// One prompt with the observed outcome of every candidate verifier.
struct TrainingSample {
  std::string prompt;
  std::vector<double> perf_gain;  // accuracy delta, may be negative
  std::vector<double> cost;       // >= 0
  std::vector<bool> correct;      // optional; used by the oracle baseline
  std::optional<TaskCategory> category;
};

// Throws kInvalidArgument unless the sample covers exactly n verifiers.
void validate(const TrainingSample& sample, std::size_t n);

double utility(double perf_gain, double cost, double lambda);
std::vector<double> utilities(const TrainingSample& sample, double lambda);
// A_i = U_i - mean(U).
std::vector<double> group_advantage(std::span<const double> utilities);

// Maps prompt text to a fixed-width feature vector.
class Featurizer {
 public:
  virtual ~Featurizer() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> features(std::string_view text) const = 0;
  virtual std::string kind() const = 0;
};

// Signed feature hashing of tokenize() output (FNV-1a 64; bucket = h mod
// dim, sign from the top bit), L2-normalized.
class HashedBowFeaturizer : public Featurizer {
 public:
  explicit HashedBowFeaturizer(std::size_t dim = 1024) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  std::vector<double> features(std::string_view text) const override;
  std::string kind() const override { return "hashed-bow"; }

 private:
  std::size_t dim_;
};

// Featurizer plus a linear head (N x D weights, no bias); softmax over the
// logits is the selection distribution.
class SelectorPolicy {
 public:
  SelectorPolicy(std::shared_ptr<const Featurizer> featurizer, std::vector<VerifierKind> verifiers);

  std::size_t num_verifiers() const { return verifiers_.size(); }
  std::size_t dim() const { return featurizer_->dim(); }
  const std::vector<VerifierKind>& verifiers() const { return verifiers_; }
  const Featurizer& featurizer() const { return *featurizer_; }

  std::vector<double>& weights() { return weights_; }  // row-major [verifier][feature]
  const std::vector<double>& weights() const { return weights_; }

  std::vector<double> logits(std::span<const double> x) const;
  std::vector<double> distribution(std::span<const double> x) const;
  std::vector<double> distribution(std::string_view prompt) const;

 private:
  std::shared_ptr<const Featurizer> featurizer_;
  std::vector<VerifierKind> verifiers_;
  std::vector<double> weights_;
};

std::vector<double> softmax(std::span<const double> logits);

struct Selection {
  std::vector<double> distribution;
  std::size_t index = 0;  // argmax, ties to the lower index
  VerifierKind kind;
};

Selection select_verifier(const SelectorPolicy& policy, std::string_view prompt);

// Mean over the batch of -sum_i A_i log f(v_i | prompt).
double grpo_loss(const SelectorPolicy& policy, std::span<const TrainingSample> batch,
                 double lambda);

struct PolicyGradient {
  std::vector<double> weights;
};

PolicyGradient grpo_gradient(const SelectorPolicy& policy, std::span<const TrainingSample> batch,
                             double lambda);

// One gradient-descent step on the head; the featurizer stays frozen.
// Returns the loss before the step. Throws kNonFiniteLoss.
double grpo_update(SelectorPolicy& policy, std::span<const TrainingSample> batch, double lambda,
                   double step_size);

struct TrainOptions {
  double lambda = 1.0;
  double step_size = 0.1;
  std::size_t batch_size = 32;
  std::size_t steps = 500;
  std::uint64_t seed = 0;
};

// Mini-batches are drawn from a seeded reshuffle of the data each epoch.
// Returns the loss of every step.
std::vector<double> train_selector(SelectorPolicy& policy, std::span<const TrainingSample> data,
                                   const TrainOptions& options);

// argmax_i U_i, ties to the lower index.
std::size_t utility_argmax(const TrainingSample& sample, double lambda);

struct OracleChoice {
  std::size_t index = 0;
  bool fallback = false;  // no verifier was correct; cheapest overall
};

// Cheapest verifier among those marked correct, ties to the lower index.
OracleChoice oracle_select(const TrainingSample& sample);

// Per-category argmax of mean utility over the training data.
class TabularSelector {
 public:
  static TabularSelector fit(std::span<const TrainingSample> data, double lambda,
                             std::size_t num_verifiers);
  // Categories absent from the training data map to index 0.
  std::size_t select(TaskCategory category) const;

  const std::map<TaskCategory, std::size_t>& table() const { return table_; }

 private:
  std::map<TaskCategory, std::size_t> table_;
};

std::string dump_policy(const SelectorPolicy& policy);
SelectorPolicy parse_policy(std::string_view text);
void save_policy(const SelectorPolicy& policy, const std::filesystem::path& path);
SelectorPolicy load_policy(const std::filesystem::path& path);

// JSONL, one sample per line:
//   {"prompt", "perf_gain": [...], "cost": [...], "correct"?: [...],
//    "category"?: "math"}
std::vector<TrainingSample> parse_training_jsonl(std::string_view text);
std::vector<TrainingSample> load_training_jsonl(const std::filesystem::path& path);
std::string dump_training_jsonl(std::span<const TrainingSample> samples);

// Prompts drawn from per-verifier topic vocabularies; the topic's verifier
// has the highest utility for every lambda in [0, 2].
std::vector<TrainingSample> synthetic_dominated_dataset(std::size_t n, std::size_t num_verifiers,
                                                        std::uint64_t seed);

}  // namespace runahead
