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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "runahead/executor.hpp"
#include "runahead/verifiers.hpp"

namespace runahead {

// Currency amount in integer picodollars, so ledger sums are exact and
// independent of summation order.
class Money {
 public:
  constexpr Money() = default;

  static Money from_dollars(double dollars);
  static constexpr Money from_picodollars(std::int64_t p) { return Money(p); }

  double dollars() const { return static_cast<double>(pico_) * 1e-12; }
  constexpr std::int64_t picodollars() const { return pico_; }

  constexpr Money& operator+=(Money o) {
    pico_ += o.pico_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return Money(a.pico_ + b.pico_); }
  friend constexpr Money operator-(Money a, Money b) { return Money(a.pico_ - b.pico_); }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  constexpr explicit Money(std::int64_t p) : pico_(p) {}
  std::int64_t pico_ = 0;
};

struct ModelPrice {
  double per_1k_prompt = 0.0;  // currency per 1k prompt tokens
  double per_1k_output = 0.0;  // currency per 1k output tokens
};

struct CostConfig {
  double unit_price = 13.60;  // per server-hour
  int server_gpus = 8;
  std::map<std::string, int, std::less<>> role_gpus = {
      {"executor", 2}, {"secondary", 1}, {"judge", 1}, {"advanced", 4}};
  double throughput_max = 1000.0;  // tokens/second per deployment
  double cluster_utilization_avg = 1.0;
  std::optional<ModelPrice> model_price;

  double per_gpu_hourly_price() const { return unit_price / server_gpus; }
};

// Throws kInvalidArgument unless every quantity is positive, utilization is
// in (0, 1] and no role holds more GPUs than the server has.
void validate(const CostConfig& cfg);

// per_gpu_hourly_price / 3600 * gpus(role) * num_tokens /
// (throughput_max * cluster_utilization_avg). Throws kUnknownRole.
double gpu_cost(const CostConfig& cfg, std::string_view role, std::int64_t num_tokens);
double model_cost(const CostConfig& cfg, std::int64_t prompt_tokens, std::int64_t output_tokens);

struct CostEntry {
  Money gpu;
  Money model;

  Money total() const { return gpu + model; }
  CostEntry& operator+=(const CostEntry& o) {
    gpu += o.gpu;
    model += o.model;
    return *this;
  }
};

// GPU time is priced on prompt + output tokens of the serving role.
CostEntry call_cost(const CostConfig& cfg, const ExecResult& call);
CostEntry tally_verifier_cost(const VerifierOutcome& outcome, const CostConfig& cfg);
// entry / baseline by total; the baseline must be non-zero.
double normalized_cost(const CostEntry& entry, const CostEntry& baseline);

enum class LedgerKind { kExecution, kVerification };

struct LedgerEntry {
  std::string node;
  LedgerKind kind = LedgerKind::kExecution;
  int attempt = 0;
  std::string label;  // provider role or verifier name
  CostEntry cost;
  bool invalidated = false;
};

// Per-run accounting sink. Owned by one thread (the scheduler).
class CostLedger {
 public:
  std::size_t add(LedgerEntry entry);
  void invalidate(std::size_t index) { entries_.at(index).invalidated = true; }

  const std::vector<LedgerEntry>& entries() const { return entries_; }

  Money execution_total() const;
  Money verification_total() const;
  Money total() const { return execution_total() + verification_total(); }
  Money wasted() const;
  Money node_total(std::string_view node) const;

 private:
  std::vector<LedgerEntry> entries_;
};

}  // namespace runahead
