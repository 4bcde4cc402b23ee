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

#include "runahead/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "runahead/error.hpp"
#include "runahead/io.hpp"
#include "runahead/similarity.hpp"

namespace runahead {

using json = nlohmann::json;

namespace {

constexpr std::string_view kCheckpointFormat = "runahead-selector";
constexpr int kCheckpointVersion = 1;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double log_sum_exp(std::span<const double> v) {
  double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

struct Prepared {
  std::vector<double> x;
  std::vector<double> adv;
};

std::vector<Prepared> prepare(const SelectorPolicy& policy,
                              std::span<const TrainingSample> batch, double lambda) {
  std::vector<Prepared> out;
  out.reserve(batch.size());
  for (const auto& s : batch) {
    validate(s, policy.num_verifiers());
    auto u = utilities(s, lambda);
    out.push_back({policy.featurizer().features(s.prompt), group_advantage(u)});
  }
  return out;
}

double loss_of(const SelectorPolicy& policy, const std::vector<Prepared>& prep) {
  double total = 0.0;
  for (const auto& p : prep) {
    auto z = policy.logits(p.x);
    double lse = log_sum_exp(z);
    for (std::size_t i = 0; i < z.size(); ++i) total -= p.adv[i] * (z[i] - lse);
  }
  return prep.empty() ? 0.0 : total / static_cast<double>(prep.size());
}

PolicyGradient gradient_of(const SelectorPolicy& policy, const std::vector<Prepared>& prep) {
  const std::size_t n = policy.num_verifiers();
  const std::size_t d = policy.dim();
  PolicyGradient g{std::vector<double>(n * d, 0.0)};
  if (prep.empty()) return g;
  const double inv_b = 1.0 / static_cast<double>(prep.size());
  for (const auto& p : prep) {
    auto probs = policy.distribution(p.x);
    double adv_sum = std::accumulate(p.adv.begin(), p.adv.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double gk = -(p.adv[k] - probs[k] * adv_sum) * inv_b;
      if (gk == 0.0) continue;
      double* row = g.weights.data() + k * d;
      for (std::size_t j = 0; j < d; ++j) row[j] += gk * p.x[j];
    }
  }
  return g;
}

double apply_step(SelectorPolicy& policy, const std::vector<Prepared>& prep, double step_size) {
  double loss = loss_of(policy, prep);
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::kNonFiniteLoss, "selector loss is not finite");
  }
  auto g = gradient_of(policy, prep);
  auto& w = policy.weights();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step_size * g.weights[i];
  return loss;
}

TrainingSample sample_from_json(const json& j) {
  TrainingSample s;
  s.prompt = j.at("prompt").get<std::string>();
  s.perf_gain = j.at("perf_gain").get<std::vector<double>>();
  s.cost = j.at("cost").get<std::vector<double>>();
  if (j.contains("correct")) s.correct = j.at("correct").get<std::vector<bool>>();
  if (j.contains("category")) s.category = parse_category(j.at("category").get<std::string>());
  return s;
}

}  // namespace

void validate(const TrainingSample& sample, std::size_t n) {
  if (sample.perf_gain.size() != n || sample.cost.size() != n) {
    throw Error(ErrorCode::kInvalidArgument,
                "training sample has " + std::to_string(sample.perf_gain.size()) + " gains and " +
                    std::to_string(sample.cost.size()) + " costs, expected " + std::to_string(n));
  }
  if (!sample.correct.empty() && sample.correct.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "training sample correctness has wrong length");
  }
  for (double c : sample.cost) {
    if (!(c >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "verifier cost must be >= 0");
  }
}

double utility(double perf_gain, double cost, double lambda) { return perf_gain - lambda * cost; }

std::vector<double> utilities(const TrainingSample& sample, double lambda) {
  std::vector<double> u(sample.perf_gain.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = utility(sample.perf_gain[i], sample.cost.at(i), lambda);
  }
  return u;
}

std::vector<double> group_advantage(std::span<const double> u) {
  if (u.empty()) return {};
  double mean = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(u.size());
  std::vector<double> a(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) a[i] = u[i] - mean;
  return a;
}

std::vector<double> HashedBowFeaturizer::features(std::string_view text) const {
  std::vector<double> x(dim_, 0.0);
  for (const auto& tok : tokenize(text)) {
    std::uint64_t h = fnv1a(tok);
    x[h % dim_] += (h >> 63) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double v : x) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
  }
  return x;
}

SelectorPolicy::SelectorPolicy(std::shared_ptr<const Featurizer> featurizer,
                               std::vector<VerifierKind> verifiers)
    : featurizer_(std::move(featurizer)), verifiers_(std::move(verifiers)) {
  if (!featurizer_ || featurizer_->dim() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "selector needs a featurizer with dim > 0");
  }
  if (verifiers_.empty()) throw Error(ErrorCode::kInvalidArgument, "selector needs verifiers");
  weights_.assign(verifiers_.size() * featurizer_->dim(), 0.0);
}

std::vector<double> SelectorPolicy::logits(std::span<const double> x) const {
  const std::size_t d = dim();
  if (x.size() != d) throw Error(ErrorCode::kInvalidArgument, "feature width mismatch");
  std::vector<double> z(verifiers_.size(), 0.0);
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double* row = weights_.data() + k * d;
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += row[j] * x[j];
    z[k] = acc;
  }
  return z;
}

std::vector<double> SelectorPolicy::distribution(std::span<const double> x) const {
  return softmax(logits(x));
}

std::vector<double> SelectorPolicy::distribution(std::string_view prompt) const {
  return distribution(featurizer_->features(prompt));
}

std::vector<double> softmax(std::span<const double> z) {
  if (z.empty()) return {};
  double lse = log_sum_exp(z);
  std::vector<double> p(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = std::exp(z[i] - lse);
  return p;
}

Selection select_verifier(const SelectorPolicy& policy, std::string_view prompt) {
  Selection s;
  s.distribution = policy.distribution(prompt);
  s.index = argmax(s.distribution);
  s.kind = policy.verifiers()[s.index];
  return s;
}

double grpo_loss(const SelectorPolicy& policy, std::span<const TrainingSample> batch,
                 double lambda) {
  return loss_of(policy, prepare(policy, batch, lambda));
}

PolicyGradient grpo_gradient(const SelectorPolicy& policy, std::span<const TrainingSample> batch,
                             double lambda) {
  return gradient_of(policy, prepare(policy, batch, lambda));
}

double grpo_update(SelectorPolicy& policy, std::span<const TrainingSample> batch, double lambda,
                   double step_size) {
  return apply_step(policy, prepare(policy, batch, lambda), step_size);
}

std::vector<double> train_selector(SelectorPolicy& policy, std::span<const TrainingSample> data,
                                   const TrainOptions& options) {
  if (options.batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch size must be > 0");
  if (!(options.step_size > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step size must be > 0");
  std::vector<double> losses;
  if (data.empty()) return losses;
  auto all = prepare(policy, data, options.lambda);
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);
  std::size_t cursor = order.size();
  losses.reserve(options.steps);
  for (std::size_t step = 0; step < options.steps; ++step) {
    std::vector<Prepared> batch;
    batch.reserve(options.batch_size);
    while (batch.size() < std::min(options.batch_size, all.size())) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(all[order[cursor++]]);
    }
    losses.push_back(apply_step(policy, batch, options.step_size));
  }
  return losses;
}

std::size_t utility_argmax(const TrainingSample& sample, double lambda) {
  auto u = utilities(sample, lambda);
  if (u.empty()) throw Error(ErrorCode::kInvalidArgument, "sample has no verifiers");
  return argmax(u);
}

OracleChoice oracle_select(const TrainingSample& sample) {
  if (sample.cost.empty()) throw Error(ErrorCode::kInvalidArgument, "sample has no verifiers");
  OracleChoice choice;
  bool found = false;
  for (std::size_t i = 0; i < sample.cost.size(); ++i) {
    bool ok = i < sample.correct.size() && sample.correct[i];
    if (ok && (!found || sample.cost[i] < sample.cost[choice.index])) {
      choice.index = i;
      found = true;
    }
  }
  if (!found) {
    choice.fallback = true;
    choice.index = 0;
    for (std::size_t i = 1; i < sample.cost.size(); ++i) {
      if (sample.cost[i] < sample.cost[choice.index]) choice.index = i;
    }
  }
  return choice;
}

TabularSelector TabularSelector::fit(std::span<const TrainingSample> data, double lambda,
                                     std::size_t num_verifiers) {
  std::map<TaskCategory, std::vector<double>> sums;
  for (const auto& s : data) {
    if (!s.category) continue;
    validate(s, num_verifiers);
    auto& acc = sums[*s.category];
    acc.resize(num_verifiers, 0.0);
    auto u = utilities(s, lambda);
    for (std::size_t i = 0; i < num_verifiers; ++i) acc[i] += u[i];
  }
  TabularSelector t;
  for (const auto& [cat, acc] : sums) t.table_[cat] = argmax(acc);
  return t;
}

std::size_t TabularSelector::select(TaskCategory category) const {
  auto it = table_.find(category);
  return it == table_.end() ? 0 : it->second;
}

std::string dump_policy(const SelectorPolicy& policy) {
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["featurizer"] = {{"kind", policy.featurizer().kind()}, {"dim", policy.dim()}};
  json names = json::array();
  for (const auto& v : policy.verifiers()) names.push_back(v.name());
  j["verifiers"] = names;
  json rows = json::array();
  const std::size_t d = policy.dim();
  for (std::size_t k = 0; k < policy.num_verifiers(); ++k) {
    rows.push_back(std::vector<double>(policy.weights().begin() + k * d,
                                       policy.weights().begin() + (k + 1) * d));
  }
  j["weights"] = rows;
  return j.dump();
}

SelectorPolicy parse_policy(std::string_view text) {
  try {
    json j = json::parse(text);
    if (j.at("format").get<std::string>() != kCheckpointFormat ||
        j.at("version").get<int>() != kCheckpointVersion) {
      throw Error(ErrorCode::kMalformedDocument, "unsupported selector checkpoint format");
    }
    const auto& f = j.at("featurizer");
    if (f.at("kind").get<std::string>() != "hashed-bow") {
      throw Error(ErrorCode::kMalformedDocument, "unknown featurizer kind");
    }
    auto feat = std::make_shared<HashedBowFeaturizer>(f.at("dim").get<std::size_t>());
    std::vector<VerifierKind> kinds;
    for (const auto& n : j.at("verifiers")) kinds.push_back(VerifierKind::parse(n.get<std::string>()));
    SelectorPolicy p(feat, kinds);
    auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
    if (rows.size() != kinds.size()) {
      throw Error(ErrorCode::kMalformedDocument, "checkpoint head does not match verifier count");
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].size() != p.dim()) {
        throw Error(ErrorCode::kMalformedDocument, "checkpoint weight row has wrong width");
      }
      std::copy(rows[k].begin(), rows[k].end(), p.weights().begin() + k * p.dim());
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("selector checkpoint: ") + e.what());
  }
}

void save_policy(const SelectorPolicy& policy, const std::filesystem::path& path) {
  write_text_file(path, dump_policy(policy));
}

SelectorPolicy load_policy(const std::filesystem::path& path) {
  return parse_policy(read_text_file(path));
}

std::vector<TrainingSample> parse_training_jsonl(std::string_view text) {
  std::vector<TrainingSample> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(sample_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedDocument,
                  "training data line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<TrainingSample> load_training_jsonl(const std::filesystem::path& path) {
  return parse_training_jsonl(read_text_file(path));
}

std::string dump_training_jsonl(std::span<const TrainingSample> samples) {
  std::string out;
  for (const auto& s : samples) {
    json j{{"prompt", s.prompt}, {"perf_gain", s.perf_gain}, {"cost", s.cost}};
    if (!s.correct.empty()) j["correct"] = s.correct;
    if (s.category) j["category"] = category_name(*s.category);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<TrainingSample> synthetic_dominated_dataset(std::size_t n, std::size_t num_verifiers,
                                                        std::uint64_t seed) {
  static const std::vector<std::vector<std::string>> kTopics = {
      {"essay", "paragraph", "rewrite", "tone", "style", "grammar", "clarity", "outline",
       "draft", "polish", "concise", "summary"},
      {"theorem", "lemma", "integral", "derivative", "equation", "algebra", "matrix",
       "eigenvalue", "limit", "series", "inequality", "proof"},
      {"python", "compile", "bug", "array", "loop", "recursion", "class", "unittest",
       "runtime", "parser", "stacktrace", "refactor"},
      {"weather", "flight", "hotel", "calendar", "booking", "lookup", "database", "currency",
       "route", "schedule", "invoice", "inventory"},
      {"debate", "policy", "ethics", "opinion", "controversial", "claim", "evidence",
       "persuade", "viewpoint", "stance", "argument", "rebuttal"},
      {"poem", "story", "character", "plot", "metaphor", "rhyme", "dialogue", "scene",
       "villain", "narrator", "chapter", "fable"},
  };
  static const std::vector<std::string> kFiller = {
      "please", "the", "task", "answer", "question", "given", "following",
      "provide", "step", "result", "carefully", "output", "about", "with"};
  static const TaskCategory kTopicCategory[] = {
      TaskCategory::kInstruction, TaskCategory::kMath, TaskCategory::kCode,
      TaskCategory::kTool,        TaskCategory::kInstruction, TaskCategory::kInstruction};
  if (num_verifiers == 0 || num_verifiers > kTopics.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic data supports 1.." + std::to_string(kTopics.size()) + " verifiers");
  }
  std::mt19937_64 rng(seed);
  auto unif = [&rng](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  std::vector<TrainingSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t topic = rng() % num_verifiers;
    std::vector<std::string> words;
    for (int w = 0; w < 6; ++w) words.push_back(kTopics[topic][rng() % kTopics[topic].size()]);
    for (int w = 0; w < 5; ++w) words.push_back(kFiller[rng() % kFiller.size()]);
    std::shuffle(words.begin(), words.end(), rng);
    TrainingSample s;
    for (const auto& w : words) s.prompt += (s.prompt.empty() ? "" : " ") + w;
    s.category = kTopicCategory[topic];
    for (std::size_t v = 0; v < num_verifiers; ++v) {
      if (v == topic) {
        s.perf_gain.push_back(unif(0.35, 0.6));
        s.cost.push_back(unif(0.02, 0.08));
        s.correct.push_back(true);
      } else {
        s.perf_gain.push_back(unif(-0.1, 0.15));
        s.cost.push_back(unif(0.05, 0.4));
        s.correct.push_back(false);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace runahead
