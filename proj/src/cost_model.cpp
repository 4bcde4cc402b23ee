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

#include "runahead/cost_model.hpp"

#include <cmath>

#include "runahead/error.hpp"

namespace runahead {

Money Money::from_dollars(double dollars) {
  if (!std::isfinite(dollars)) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite currency amount");
  }
  return Money(std::llround(dollars * 1e12));
}

void validate(const CostConfig& cfg) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (!(cfg.unit_price > 0.0)) fail("unit_price must be positive");
  if (cfg.server_gpus <= 0) fail("server_gpus must be positive");
  if (!(cfg.throughput_max > 0.0)) fail("throughput_max must be positive");
  if (!(cfg.cluster_utilization_avg > 0.0 && cfg.cluster_utilization_avg <= 1.0)) {
    fail("cluster_utilization_avg must be in (0, 1]");
  }
  for (const auto& [role, gpus] : cfg.role_gpus) {
    if (gpus <= 0 || gpus > cfg.server_gpus) {
      fail("role '" + role + "' needs between 1 and server_gpus GPUs");
    }
  }
  if (cfg.model_price &&
      (cfg.model_price->per_1k_prompt < 0.0 || cfg.model_price->per_1k_output < 0.0)) {
    fail("model prices must be non-negative");
  }
}

double gpu_cost(const CostConfig& cfg, std::string_view role, std::int64_t num_tokens) {
  auto it = cfg.role_gpus.find(role);
  if (it == cfg.role_gpus.end()) {
    throw Error(ErrorCode::kUnknownRole, "no GPU allocation for role '" + std::string(role) + "'");
  }
  const double per_gpu_second = cfg.per_gpu_hourly_price() / 3600.0;
  const double seconds =
      static_cast<double>(num_tokens) / (cfg.throughput_max * cfg.cluster_utilization_avg);
  return per_gpu_second * it->second * seconds;
}

double model_cost(const CostConfig& cfg, std::int64_t prompt_tokens, std::int64_t output_tokens) {
  if (!cfg.model_price) return 0.0;
  return cfg.model_price->per_1k_prompt * static_cast<double>(prompt_tokens) / 1000.0 +
         cfg.model_price->per_1k_output * static_cast<double>(output_tokens) / 1000.0;
}

CostEntry call_cost(const CostConfig& cfg, const ExecResult& call) {
  return {Money::from_dollars(gpu_cost(cfg, call.provider, call.total_tokens())),
          Money::from_dollars(model_cost(cfg, call.prompt_tokens, call.output_tokens))};
}

CostEntry tally_verifier_cost(const VerifierOutcome& outcome, const CostConfig& cfg) {
  CostEntry sum;
  for (const auto& c : outcome.calls) sum += call_cost(cfg, c);
  return sum;
}

double normalized_cost(const CostEntry& entry, const CostEntry& baseline) {
  if (baseline.total() == Money()) {
    throw Error(ErrorCode::kInvalidArgument, "baseline cost is zero");
  }
  return static_cast<double>(entry.total().picodollars()) /
         static_cast<double>(baseline.total().picodollars());
}

std::size_t CostLedger::add(LedgerEntry entry) {
  entries_.push_back(std::move(entry));
  return entries_.size() - 1;
}

Money CostLedger::execution_total() const {
  Money m;
  for (const auto& e : entries_) {
    if (e.kind == LedgerKind::kExecution) m += e.cost.total();
  }
  return m;
}

Money CostLedger::verification_total() const {
  Money m;
  for (const auto& e : entries_) {
    if (e.kind == LedgerKind::kVerification) m += e.cost.total();
  }
  return m;
}

Money CostLedger::wasted() const {
  Money m;
  for (const auto& e : entries_) {
    if (e.invalidated) m += e.cost.total();
  }
  return m;
}

Money CostLedger::node_total(std::string_view node) const {
  Money m;
  for (const auto& e : entries_) {
    if (e.node == node) m += e.cost.total();
  }
  return m;
}

}  // namespace runahead
