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

#include "runahead/scenario.hpp"

#include <cmath>

#include "runahead/error.hpp"
#include "runahead/http_executor.hpp"
#include "runahead/io.hpp"
#include "runahead/selector.hpp"
#include "runahead/speculation.hpp"

namespace runahead {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string(what) + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

ExecResult exec_result_from(const json& j) {
  ExecResult r;
  r.output = get_or<std::string>(j, "output", "");
  r.latency = get_or<double>(j, "latency", 0.0);
  r.prompt_tokens = get_or<std::int64_t>(j, "prompt_tokens", 0);
  r.output_tokens = get_or<std::int64_t>(j, "output_tokens", 0);
  r.provider = get_or<std::string>(j, "provider", "");
  return r;
}

json load_section(const json& j, const fs::path& base, const char* key) {
  const json& v = j.at(key);
  if (v.is_string()) {
    return parse_json(read_text_file(base / v.get<std::string>()), key);
  }
  return v;
}

std::unique_ptr<NodeVerifier> make_verifier(const Scenario& s, const Overrides& o,
                                            std::vector<std::unique_ptr<Executor>>& owned) {
  const json& j = s.verifier;
  std::string type = get_or<std::string>(j, "type", "simulated");
  double scale = o.verifier_scale.value_or(1.0);
  if (type == "scripted") {
    ScriptedVerifier::Script script;
    json body = j.contains("script") ? load_section(j, s.base_dir, "script") : json::object();
    for (const auto& [key, entries] : body.items()) {
      for (const auto& e : entries) {
        ScriptedVerifier::Entry entry;
        if (e.contains("revised_output") && !e.at("revised_output").is_null()) {
          entry.revised_output = e.at("revised_output").get<std::string>();
        }
        entry.latency = get_or<double>(e, "latency", 0.0);
        for (const auto& c : e.value("calls", json::array())) {
          entry.calls.push_back(exec_result_from(c));
        }
        script[key].push_back(std::move(entry));
      }
    }
    return std::make_unique<ScriptedVerifier>(std::move(script), scale);
  }
  if (type == "simulated") {
    SimulatedVerifier::Config cfg;
    cfg.seed = get_or<std::uint64_t>(j, "seed", s.seed);
    if (j.contains("match_rate")) {
      for (const auto& [k, v] : j.at("match_rate").items()) cfg.match_rate[k] = v.get<double>();
    }
    cfg.default_match_rate = get_or<double>(j, "default_match_rate", cfg.default_match_rate);
    if (o.match_rate) {
      cfg.match_rate.clear();
      cfg.default_match_rate = *o.match_rate;
    }
    if (j.contains("latency")) {
      for (const auto& [k, v] : j.at("latency").items()) cfg.latency[k] = v.get<double>();
    }
    cfg.default_latency = get_or<double>(j, "default_latency", cfg.default_latency);
    cfg.latency_scale = scale;
    cfg.tokens_per_call = get_or<std::int64_t>(j, "tokens_per_call", cfg.tokens_per_call);
    cfg.minor_revision_share =
        get_or<double>(j, "minor_revision_share", cfg.minor_revision_share);
    return std::make_unique<SimulatedVerifier>(std::move(cfg));
  }
  if (type == "pipeline") {
    VerifierExecutors ve;
    auto role = [&](const char* key, const char* provider) -> Executor* {
      if (!j.contains(key)) return nullptr;
      owned.push_back(make_executor(j.at(key), s.base_dir, provider));
      return owned.back().get();
    };
    if (j.contains("base")) {
      ve.base = role("base", "executor");
    } else {
      owned.push_back(make_executor(s.executor, s.base_dir, "executor"));
      ve.base = owned.back().get();
    }
    ve.advanced = role("advanced", "advanced");
    ve.secondary = role("secondary", "secondary");
    ve.judge = role("judge", "judge");
    ve.majority = role("majority", "judge");
    ve.sampling.temperature = get_or<double>(j, "temperature", ve.sampling.temperature);
    ve.sampling.top_p = get_or<double>(j, "top_p", ve.sampling.top_p);
    ve.advanced_rewrites = get_or<bool>(j, "advanced_rewrites", false);
    ve.parallel = get_or<bool>(j, "parallel", false);
    return std::make_unique<PipelineVerifier>(ve);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown verifier type '" + type + "'");
}

RollbackThresholds parse_rollback(const json& j) {
  RollbackThresholds t;
  t.conservative = get_or<bool>(j, "conservative", false);
  t.fallback = get_or<double>(j, "fallback", t.fallback);
  if (j.contains("thresholds")) {
    for (const auto& [k, v] : j.at("thresholds").items()) {
      t.by_category[parse_category(k)] = v.get<double>();
    }
  }
  return t;
}

}  // namespace

CostConfig parse_cost_config(const json& j) {
  CostConfig c;
  try {
    c.unit_price = get_or<double>(j, "unit_price", c.unit_price);
    c.server_gpus = get_or<int>(j, "server_gpus", c.server_gpus);
    if (j.contains("role_gpus")) {
      c.role_gpus.clear();
      for (const auto& [k, v] : j.at("role_gpus").items()) c.role_gpus[k] = v.get<int>();
    }
    c.throughput_max = get_or<double>(j, "throughput_max", c.throughput_max);
    c.cluster_utilization_avg =
        get_or<double>(j, "cluster_utilization_avg", c.cluster_utilization_avg);
    if (j.contains("model_price") && !j.at("model_price").is_null()) {
      const auto& m = j.at("model_price");
      c.model_price = ModelPrice{m.at("per_1k_prompt").get<double>(),
                                 m.at("per_1k_output").get<double>()};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("cost config: ") + e.what());
  }
  validate(c);
  return c;
}

CostConfig load_cost_config(const fs::path& path) {
  return parse_cost_config(parse_json(read_text_file(path), "cost config"));
}

json cost_config_json(const CostConfig& cfg) {
  json j{{"unit_price", cfg.unit_price},
         {"server_gpus", cfg.server_gpus},
         {"role_gpus", cfg.role_gpus},
         {"throughput_max", cfg.throughput_max},
         {"cluster_utilization_avg", cfg.cluster_utilization_avg}};
  if (cfg.model_price) {
    j["model_price"] = {{"per_1k_prompt", cfg.model_price->per_1k_prompt},
                        {"per_1k_output", cfg.model_price->per_1k_output}};
  }
  return j;
}

std::unique_ptr<Executor> make_executor(const json& j, const fs::path& base,
                                        const std::string& provider) {
  std::string type = get_or<std::string>(j, "type", "simulated");
  if (type == "scripted") {
    ScriptedExecutor::Script script;
    json body = j.contains("script") ? load_section(j, base, "script") : json::object();
    for (const auto& [key, entries] : body.items()) {
      for (const auto& e : entries) script[key].push_back(exec_result_from(e));
    }
    return std::make_unique<ScriptedExecutor>(provider, std::move(script));
  }
  if (type == "simulated") {
    SimulatedExecutor::Config cfg;
    if (j.contains("latency")) {
      for (const auto& [k, v] : j.at("latency").items()) cfg.latency[k] = v.get<double>();
    }
    cfg.default_latency = get_or<double>(j, "default_latency", cfg.default_latency);
    cfg.prompt_tokens = get_or<std::int64_t>(j, "prompt_tokens", cfg.prompt_tokens);
    cfg.output_tokens = get_or<std::int64_t>(j, "output_tokens", cfg.output_tokens);
    return std::make_unique<SimulatedExecutor>(std::move(cfg));
  }
  if (type == "http") {
    HttpEndpoint ep;
    ep.base_url = j.at("base_url").get<std::string>();
    ep.model = j.at("model").get<std::string>();
    ep.api_key = get_or<std::string>(j, "api_key", "");
    ep.timeout_seconds = get_or<double>(j, "timeout_seconds", ep.timeout_seconds);
    ep.max_retries = get_or<int>(j, "max_retries", ep.max_retries);
    ep.initial_backoff_seconds =
        get_or<double>(j, "initial_backoff_seconds", ep.initial_backoff_seconds);
    return std::make_unique<HttpExecutor>(ep, provider);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown executor type '" + type + "'");
}

Scenario parse_scenario(std::string_view text, const fs::path& base_dir) {
  json j = parse_json(text, "scenario");
  Scenario s;
  s.base_dir = base_dir;
  try {
    if (!j.contains("workflow")) {
      throw Error(ErrorCode::kMalformedDocument, "scenario needs a 'workflow'");
    }
    const json& w = j.at("workflow");
    if (w.is_string()) {
      s.graph = std::make_shared<WorkflowGraph>(load_workflow_file(base_dir / w.get<std::string>()));
    } else {
      s.graph = std::make_shared<WorkflowGraph>(load_workflow(w.dump()));
    }
    if (j.contains("executor")) s.executor = j.at("executor");
    if (j.contains("verifier")) s.verifier = j.at("verifier");
    if (j.contains("placement")) {
      const json& p = j.at("placement");
      if (p.contains("k")) s.placement_k = p.at("k").get<std::size_t>();
      if (p.contains("nodes")) s.placement_nodes = p.at("nodes").get<std::vector<std::string>>();
    }
    s.selection = get_or<std::string>(j, "selection", s.selection);
    if (j.contains("verifiers")) {
      s.candidates.clear();
      for (const auto& v : j.at("verifiers")) s.candidates.push_back(VerifierKind::parse(v.get<std::string>()));
    }
    s.selector_checkpoint = get_or<std::string>(j, "selector_checkpoint", "");
    s.selector_data = get_or<std::string>(j, "selector_data", "");
    if (j.contains("oracle")) s.oracle = j.at("oracle");
    s.lambda = get_or<double>(j, "lambda", s.lambda);
    s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
    s.output_dir = get_or<std::string>(j, "output_dir", s.output_dir.string());

    RunOptions& r = s.run;
    r.mode = parse_mode(get_or<std::string>(j, "mode", std::string(mode_name(r.mode))));
    r.clock = parse_clock(get_or<std::string>(j, "clock", "virtual"));
    if (j.contains("budget") && j.at("budget").is_number()) r.budget = j.at("budget").get<double>();
    if (j.contains("rollback")) r.rollback = parse_rollback(j.at("rollback"));
    if (j.contains("match_rate")) {
      for (const auto& [k, v] : j.at("match_rate").items()) r.match_rate[k] = v.get<double>();
    }
    r.default_match_rate = get_or<double>(j, "default_match_rate", r.default_match_rate);
    if (j.contains("cost")) {
      const json& c = j.at("cost");
      r.cost = c.is_string() ? load_cost_config(base_dir / c.get<std::string>())
                             : parse_cost_config(c);
    }
    r.emulate_latency = get_or<bool>(j, "emulate_latency", false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("scenario: ") + e.what());
  }
  if (!(s.lambda >= 0.0) || !std::isfinite(s.lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be finite and >= 0");
  }
  if (!(s.run.budget >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "budget must be >= 0");
  return s;
}

Scenario load_scenario(const fs::path& path) {
  return parse_scenario(read_text_file(path), path.parent_path());
}

fs::path resolve(const Scenario& s, const fs::path& p) {
  return p.is_absolute() ? p : s.base_dir / p;
}

Runtime build_runtime(const Scenario& s, const Overrides& o) {
  Runtime rt;
  rt.executors.push_back(make_executor(s.executor, s.base_dir, "executor"));
  rt.verifier = make_verifier(s, o, rt.executors);
  return rt;
}

PlacementPlan plan_placement(const Scenario& s) {
  const WorkflowGraph& g = *s.graph;
  if (!s.placement_nodes.empty()) {
    PlacementPlan p;
    for (const auto& id : s.placement_nodes) {
      g.index_of(id);
      p.selected.push_back(id);
    }
    p.budget = p.selected.size();
    return p;
  }
  return place_verifiers(g, topo_profile(g), s.placement_k.value_or(g.size()));
}

std::vector<std::optional<VerifierKind>> assign_verifiers(const Scenario& s,
                                                          const PlacementPlan& placement) {
  const WorkflowGraph& g = *s.graph;
  std::vector<std::optional<VerifierKind>> out(g.size());
  if (placement.selected.empty()) return out;
  const std::string& sel = s.selection;
  std::function<VerifierKind(WorkflowGraph::NodeIndex)> pick;
  std::optional<SelectorPolicy> policy;
  std::optional<TabularSelector> table;
  if (sel.rfind("static:", 0) == 0) {
    VerifierKind k = VerifierKind::parse(sel.substr(7));
    pick = [k](WorkflowGraph::NodeIndex) { return k; };
  } else if (sel == "learned") {
    if (s.selector_checkpoint.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "learned selection needs 'selector_checkpoint'");
    }
    policy = load_policy(resolve(s, s.selector_checkpoint));
    pick = [&](WorkflowGraph::NodeIndex i) {
      return select_verifier(*policy, g.node(i).objective).kind;
    };
  } else if (sel == "tabular") {
    if (s.selector_data.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "tabular selection needs 'selector_data'");
    }
    auto data = load_training_jsonl(resolve(s, s.selector_data));
    table = TabularSelector::fit(data, s.lambda, s.candidates.size());
    pick = [&](WorkflowGraph::NodeIndex i) {
      return s.candidates.at(table->select(g.node(i).category));
    };
  } else if (sel == "oracle") {
    pick = [&](WorkflowGraph::NodeIndex i) {
      const std::string& id = g.node(i).id;
      if (!s.oracle.contains(id)) {
        throw Error(ErrorCode::kInvalidArgument, "oracle table has no entry for " + id);
      }
      TrainingSample t;
      t.cost = s.oracle.at(id).at("cost").get<std::vector<double>>();
      t.perf_gain.assign(t.cost.size(), 0.0);
      t.correct = s.oracle.at(id).at("correct").get<std::vector<bool>>();
      validate(t, s.candidates.size());
      return s.candidates.at(oracle_select(t).index);
    };
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown selection strategy '" + sel + "'");
  }
  for (const auto& id : placement.selected) {
    auto i = g.index_of(id);
    out[i] = pick(i);
  }
  return out;
}

ScenarioRun run_scenario(const Scenario& s, const Overrides& o) {
  ScenarioRun run;
  run.placement = plan_placement(s);
  run.assignment = assign_verifiers(s, run.placement);
  Runtime rt = build_runtime(s, o);
  RunOptions opt = s.run;
  if (o.match_rate) {
    opt.match_rate.clear();
    opt.default_match_rate = *o.match_rate;
  }
  RunInputs in;
  in.graph = s.graph.get();
  in.executor = &rt.node_executor();
  in.verifier = rt.verifier.get();
  in.assignment = run.assignment;
  run.result = run_workflow(in, opt);
  return run;
}

std::size_t static_nspec(const Scenario& s, const std::vector<std::optional<VerifierKind>>& a,
                         const Overrides& o) {
  const WorkflowGraph& g = *s.graph;
  Runtime rt = build_runtime(s, o);
  std::vector<double> lat(g.size(), 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (auto r = rt.node_executor().peek(g.node(i).id)) lat[i] = r->latency;
  }
  std::size_t total = 0;
  for (std::size_t u = 0; u < g.size(); ++u) {
    if (!a.at(u)) continue;
    double vlat = rt.verifier->peek_latency(*a[u], g.node(u).id).value_or(0.0);
    total += eligible_spec_set(g, u, lat, vlat).size();
  }
  return total;
}

CampaignSetup load_campaign(const fs::path& path) {
  json j = parse_json(read_text_file(path), "campaign config");
  CampaignSetup c;
  c.base_dir = path.parent_path();
  try {
    c.config.graph_path = c.base_dir / j.at("workflow").get<std::string>();
    c.graph = std::make_shared<WorkflowGraph>(load_workflow_file(c.config.graph_path));
    c.config.targets = get_or<std::vector<std::string>>(j, "targets", {});
    c.config.trials_per_node = get_or<int>(j, "trials_per_node", c.config.trials_per_node);
    c.config.seed = get_or<std::uint64_t>(j, "seed", c.config.seed);
    c.config.payload_corpus_path = c.base_dir / j.at("payload_corpus").get<std::string>();
    if (j.contains("distribution")) {
      const json& d = j.at("distribution");
      c.config.distribution.prompt_replacement =
          get_or<double>(d, "prompt_replacement", c.config.distribution.prompt_replacement);
      c.config.distribution.context_drop =
          get_or<double>(d, "context_drop", c.config.distribution.context_drop);
      c.config.distribution.output_replacement =
          get_or<double>(d, "output_replacement", c.config.distribution.output_replacement);
    }
    c.config.drop_fractions = get_or<std::vector<double>>(j, "drop_fractions", c.config.drop_fractions);
    if (j.contains("executor")) c.executor = j.at("executor");
    if (j.contains("scorer")) c.scorer = j.at("scorer");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("campaign config: ") + e.what());
  }
  validate(c.config.distribution);
  return c;
}

}  // namespace runahead
