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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "runahead/cost_model.hpp"
#include "runahead/executor.hpp"
#include "runahead/fault_lab.hpp"
#include "runahead/graph.hpp"
#include "runahead/placement.hpp"
#include "runahead/scheduler.hpp"

namespace runahead {

// Parsed run configuration. Relative paths resolve against base_dir (the
// directory of the config file). See assets/configs/run.example.jsonc.
struct Scenario {
  std::filesystem::path base_dir;
  std::shared_ptr<const WorkflowGraph> graph;
  nlohmann::json executor = {{"type", "simulated"}};
  nlohmann::json verifier = {{"type", "simulated"}};
  std::optional<std::size_t> placement_k;   // default: every node
  std::vector<std::string> placement_nodes;  // explicit list wins over k
  std::string selection = "static:judge";
  std::vector<VerifierKind> candidates = default_verifier_set();
  std::filesystem::path selector_checkpoint;
  std::filesystem::path selector_data;
  nlohmann::json oracle = nlohmann::json::object();
  double lambda = 1.0;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "runs";
  RunOptions run;
};

CostConfig parse_cost_config(const nlohmann::json& j);
CostConfig load_cost_config(const std::filesystem::path& path);
nlohmann::json cost_config_json(const CostConfig& cfg);

// Accepts // and /* */ comments. Throws kMalformedDocument, kIo or
// kInvalidArgument.
Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

std::filesystem::path resolve(const Scenario& s, const std::filesystem::path& p);

// Knobs the sweep varies on top of a scenario.
struct Overrides {
  std::optional<double> match_rate;    // simulated verifier + planning
  std::optional<double> verifier_scale;  // multiplies verifier latencies
};

// Fresh executor and verifier instances for one run; scripted state is
// never shared between runs.
struct Runtime {
  std::vector<std::unique_ptr<Executor>> executors;  // [0] runs the nodes
  std::unique_ptr<NodeVerifier> verifier;

  Executor& node_executor() { return *executors.front(); }
};

Runtime build_runtime(const Scenario& s, const Overrides& o = {});

PlacementPlan plan_placement(const Scenario& s);

// Resolves the selection strategy (learned | static:<kind> | tabular |
// oracle) to a verifier per node for the placed nodes.
std::vector<std::optional<VerifierKind>> assign_verifiers(const Scenario& s,
                                                          const PlacementPlan& placement);

struct ScenarioRun {
  PlacementPlan placement;
  std::vector<std::optional<VerifierKind>> assignment;
  RunResult result;
};

ScenarioRun run_scenario(const Scenario& s, const Overrides& o = {});

// Sum over verified nodes of |N_spec| from the nominal latencies (no run).
std::size_t static_nspec(const Scenario& s, const std::vector<std::optional<VerifierKind>>& a,
                         const Overrides& o = {});

// {"workflow", "targets"?, "trials_per_node"?, "seed"?, "payload_corpus",
//  "distribution"?: {"prompt_replacement", "context_drop",
//  "output_replacement"}, "drop_fractions"?, "executor"?, "scorer"?:
//  "exact" | {"type": "llm", ...endpoint}}
struct CampaignSetup {
  CampaignConfig config;
  std::shared_ptr<const WorkflowGraph> graph;
  nlohmann::json executor = {{"type", "simulated"}};
  nlohmann::json scorer = "exact";
  std::filesystem::path base_dir;
};

CampaignSetup load_campaign(const std::filesystem::path& path);
std::unique_ptr<Executor> make_executor(const nlohmann::json& j, const std::filesystem::path& base,
                                        const std::string& provider = "executor");

}  // namespace runahead
