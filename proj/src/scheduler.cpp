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

#include "runahead/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <functional>
#include <queue>
#include <thread>

#include "runahead/error.hpp"
#include "runahead/similarity.hpp"

namespace runahead {

using json = nlohmann::json;
using NodeIndex = WorkflowGraph::NodeIndex;

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Completion {
  enum Kind { kExec, kVerify } kind = kExec;
  NodeIndex node = 0;
  int attempt = 0;
  double time = 0.0;
  std::uint64_t seq = 0;
  ExecResult exec;
  VerifierOutcome outcome;
  std::optional<std::string> error;
};

// Work fills the completion and returns its latency in seconds.
using Work = std::function<double(Completion&)>;

double run_work(const Work& work, Completion& c) {
  try {
    return work(c);
  } catch (const std::exception& e) {
    c.error = e.what();
  }
  return 0.0;
}

class Dispatcher {
 public:
  virtual ~Dispatcher() = default;
  virtual double now() const = 0;
  virtual void submit(Completion c, Work work) = 0;
  // Next completion in time order; nullopt once nothing is outstanding.
  virtual std::optional<Completion> next() = 0;
};

class VirtualDispatcher : public Dispatcher {
 public:
  double now() const override { return now_; }

  void submit(Completion c, Work work) override {
    double latency = run_work(work, c);
    c.time = now_ + latency;
    c.seq = seq_++;
    queue_.push(std::move(c));
  }

  std::optional<Completion> next() override {
    if (queue_.empty()) return std::nullopt;
    Completion c = queue_.top();
    queue_.pop();
    now_ = c.time;
    return c;
  }

 private:
  struct Later {
    bool operator()(const Completion& a, const Completion& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  double now_ = 0.0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Completion, std::vector<Completion>, Later> queue_;
};

class WallDispatcher : public Dispatcher {
 public:
  explicit WallDispatcher(bool emulate_latency)
      : emulate_(emulate_latency), start_(std::chrono::steady_clock::now()) {}

  ~WallDispatcher() override {
    for (auto& t : threads_) t.join();
  }

  double now() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void submit(Completion c, Work work) override {
    ++outstanding_;
    threads_.emplace_back([this, c = std::move(c), work = std::move(work)]() mutable {
      double latency = run_work(work, c);
      if (emulate_ && latency > 0.0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(latency));
      }
      std::lock_guard lock(mu_);
      c.time = now();
      c.seq = seq_++;
      done_.push_back(std::move(c));
      cv_.notify_one();
    });
  }

  std::optional<Completion> next() override {
    if (outstanding_ == 0) return std::nullopt;
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return !done_.empty(); });
    Completion c = std::move(done_.front());
    done_.pop_front();
    --outstanding_;
    return c;
  }

 private:
  bool emulate_;
  std::chrono::steady_clock::time_point start_;
  std::size_t outstanding_ = 0;
  std::uint64_t seq_ = 0;
  std::vector<std::thread> threads_;
  std::deque<Completion> done_;
  std::mutex mu_;
  std::condition_variable cv_;
};

struct NodeRec {
  int attempt = 0;
  NodeState state = NodeState::kWaiting;
  std::optional<std::string> output;
  std::string prompt;
  std::vector<std::size_t> ledger_entries;
  std::optional<SpeculationPlan> plan;
  std::vector<char> in_plan;
};

class Scheduler {
 public:
  Scheduler(const RunInputs& in, const RunOptions& opt) : in_(in), opt_(opt), g_(*in.graph) {
    if (!in.graph || !in.executor) {
      throw Error(ErrorCode::kInvalidArgument, "run needs a graph and an executor");
    }
    if (in.assignment.size() != g_.size() && !in.assignment.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "verifier assignment does not match graph size");
    }
    validate(opt.cost);
    bool any_verifier = false;
    for (const auto& a : in.assignment) any_verifier = any_verifier || a.has_value();
    if (any_verifier && opt.mode != RunMode::kNoVerify && !in.verifier) {
      throw Error(ErrorCode::kMissingExecutor, "verifiers are placed but no verifier is configured");
    }
    if (in.estimator) {
      estimator_ = in.estimator;
    } else {
      own_estimator_ = std::make_unique<PeekEstimator>(
          g_, *in.executor, opt.cost, std::vector<NodeEstimate>(g_.size()));
      estimator_ = own_estimator_.get();
    }
    if (opt.clock == ClockKind::kVirtual) {
      dispatcher_ = std::make_unique<VirtualDispatcher>();
    } else {
      dispatcher_ = std::make_unique<WallDispatcher>(opt.emulate_latency);
    }
    recs_.resize(g_.size());
  }

  RunResult run() {
    for (;;) {
      dispatch_ready();
      auto c = dispatcher_->next();
      if (!c) break;
      if (c->kind == Completion::kExec) {
        on_exec(*c);
      } else {
        on_verify(*c);
      }
    }
    return finish();
  }

 private:
  const std::optional<VerifierKind>& kind_of(NodeIndex i) const {
    static const std::optional<VerifierKind> kNone;
    if (in_.assignment.empty() || opt_.mode == RunMode::kNoVerify) return kNone;
    return in_.assignment[i];
  }

  const std::string& id(NodeIndex i) const { return g_.node(i).id; }

  void emit(const std::string& node, const char* event, json detail) {
    result_.trace.push_back({dispatcher_->now(), node, event, std::move(detail)});
  }

  void move_to(NodeIndex i, FsmInput input, json extra = json::object()) {
    NodeRec& r = recs_[i];
    NodeState from = r.state;
    r.state = transition(from, input);
    extra["attempt"] = r.attempt;
    extra["from"] = state_name(from);
    extra["to"] = state_name(r.state);
    extra["input"] = input_name(input);
    emit(id(i), "state-transition", std::move(extra));
  }

  void fail_run(const std::string& message) {
    if (!result_.metrics.failed) {
      result_.metrics.failed = true;
      result_.metrics.error = message;
    }
  }

  std::vector<NodeIndex> verifying_ancestors(NodeIndex j) const {
    std::vector<NodeIndex> out;
    for (auto u : g_.topo_order()) {
      if (recs_[u].state == NodeState::kVerifying && g_.reaches(u, j)) out.push_back(u);
    }
    return out;
  }

  bool ready(NodeIndex j) const {
    for (auto p : g_.parents(j)) {
      NodeState s = recs_[p].state;
      if (s == NodeState::kCompleted) continue;
      if (s == NodeState::kVerifying && opt_.mode == RunMode::kSpeculative) continue;
      return false;
    }
    if (opt_.mode != RunMode::kSpeculative) return true;
    for (auto u : verifying_ancestors(j)) {
      const NodeRec& r = recs_[u];
      if (!r.plan || !r.plan->approved || !r.in_plan[j]) return false;
    }
    return true;
  }

  void dispatch_ready() {
    if (result_.metrics.failed) return;
    for (auto j : g_.topo_order()) {
      if (recs_[j].state == NodeState::kWaiting && ready(j)) start(j);
    }
  }

  void start(NodeIndex j) {
    NodeRec& r = recs_[j];
    std::map<std::string, std::string, std::less<>> outputs;
    for (auto p : g_.parents(j)) outputs[id(p)] = *recs_[p].output;
    auto upstream = gather_upstream(g_, j, outputs);
    r.prompt = build_prompt(g_.node(j), upstream);
    move_to(j, FsmInput::kRun);
    auto under = verifying_ancestors(j);
    if (!under.empty()) {
      json ids = json::array();
      for (auto u : under) ids.push_back(id(u));
      emit(id(j), "spec-start", {{"attempt", r.attempt}, {"under", ids}});
    }
    Completion c;
    c.kind = Completion::kExec;
    c.node = j;
    c.attempt = r.attempt;
    Executor* exec = in_.executor;
    ExecRequest req{id(j), r.prompt};
    dispatcher_->submit(std::move(c), [exec, req](Completion& out) {
      out.exec = exec->execute(req);
      return out.exec.latency;
    });
  }

  std::size_t book(NodeIndex i, LedgerKind kind, int attempt, std::string label, CostEntry cost,
                   bool invalidated) {
    return result_.ledger.add({id(i), kind, attempt, std::move(label), cost, invalidated});
  }

  void on_exec(Completion& c) {
    NodeRec& r = recs_[c.node];
    bool stale = c.attempt != r.attempt;
    if (c.error) {
      if (!stale) fail_run("node " + id(c.node) + ": " + *c.error);
      return;
    }
    CostEntry cost;
    try {
      cost = call_cost(opt_.cost, c.exec);
    } catch (const Error& e) {
      fail_run("node " + id(c.node) + ": " + e.what());
      return;
    }
    std::size_t entry = book(c.node, LedgerKind::kExecution, c.attempt, c.exec.provider, cost, stale);
    if (stale) return;
    r.ledger_entries.push_back(entry);
    t_exec_ = std::max(t_exec_, c.time);
    estimator_->observe_exec(c.node, c.exec.latency, cost.total().dollars());
    r.output = c.exec.output;
    const auto& kind = kind_of(c.node);
    if (!kind) {
      move_to(c.node, FsmInput::kNoVerify);
      return;
    }
    start_verifier(c.node, *kind);
  }

  void start_verifier(NodeIndex u, const VerifierKind& kind) {
    NodeRec& r = recs_[u];
    VerifierInput input{id(u), r.prompt, "", *r.output};
    NodeVerifier* verifier = in_.verifier;
    int attempt = r.attempt;
    Completion c;
    c.kind = Completion::kVerify;
    c.node = u;
    c.attempt = attempt;
    std::optional<double> known_latency;
    Work work;
    if (opt_.clock == ClockKind::kVirtual) {
      Completion pre;
      run_work([&](Completion& out) {
        out.outcome = verifier->verify(kind, input, attempt);
        return out.outcome.latency;
      }, pre);
      if (!pre.error) known_latency = pre.outcome.latency;
      work = [pre](Completion& out) {
        if (pre.error) throw std::runtime_error(*pre.error);
        out.outcome = pre.outcome;
        return out.outcome.latency;
      };
    } else {
      work = [verifier, kind, input, attempt](Completion& out) {
        out.outcome = verifier->verify(kind, input, attempt);
        return out.outcome.latency;
      };
    }
    json extra = json::object();
    extra["verifier"] = kind.name();
    if (opt_.mode == RunMode::kSpeculative) {
      plan(u, kind, known_latency);
      extra["plan"] = plan_json(*r.plan);
    }
    move_to(u, FsmInput::kVerify, std::move(extra));
    dispatcher_->submit(std::move(c), std::move(work));
  }

  double match_rate(const VerifierKind& kind) const {
    auto it = opt_.match_rate.find(kind.name());
    return it == opt_.match_rate.end() ? opt_.default_match_rate : it->second;
  }

  void plan(NodeIndex u, const VerifierKind& kind, std::optional<double> known_latency) {
    std::vector<NodeEstimate> est(g_.size());
    std::vector<double> lat(g_.size());
    for (NodeIndex i = 0; i < g_.size(); ++i) {
      est[i] = estimator_->estimate(i);
      lat[i] = est[i].exec_latency;
    }
    if (!known_latency) known_latency = in_.verifier->peek_latency(kind, id(u));
    double vlat = known_latency ? *known_latency : est[u].verifier_latency;
    auto eligible = eligible_spec_set(g_, u, lat, vlat);
    std::vector<double> costs;
    SpeculationPlan p;
    p.verifying_node = id(u);
    for (auto j : eligible) {
      p.eligible.push_back(id(j));
      costs.push_back(est[j].exec_cost + (kind_of(j) ? est[j].verifier_cost : 0.0));
    }
    p.expected_cost = expected_spec_cost(match_rate(kind), costs);
    p.budget = opt_.budget;
    p.approved = approve(p.expected_cost, p.budget);
    NodeRec& r = recs_[u];
    r.in_plan.assign(g_.size(), 0);
    for (auto j : eligible) r.in_plan[j] = 1;
    r.plan = p;
    result_.plans.push_back(p);
  }

  static json plan_json(const SpeculationPlan& p) {
    json j{{"eligible", p.eligible}, {"expected_cost", p.expected_cost}, {"approved", p.approved}};
    if (std::isfinite(p.budget)) {
      j["budget"] = p.budget;
    } else {
      j["budget"] = "inf";
    }
    return j;
  }

  std::vector<NodeIndex> started_descendants(NodeIndex u) const {
    std::vector<NodeIndex> out;
    for (auto d : g_.descendants(u)) {
      if (recs_[d].state != NodeState::kWaiting) out.push_back(d);
    }
    return out;
  }

  json ids_json(const std::vector<NodeIndex>& v) const {
    json a = json::array();
    for (auto i : v) a.push_back(id(i));
    return a;
  }

  void on_verify(Completion& c) {
    NodeRec& r = recs_[c.node];
    bool stale = c.attempt != r.attempt;
    if (c.error) {
      if (!stale) fail_run("verifier on " + id(c.node) + ": " + *c.error);
      return;
    }
    const auto& kind = kind_of(c.node);
    CostEntry cost;
    try {
      cost = tally_verifier_cost(c.outcome, opt_.cost);
    } catch (const Error& e) {
      fail_run("verifier on " + id(c.node) + ": " + e.what());
      return;
    }
    std::size_t entry =
        book(c.node, LedgerKind::kVerification, c.attempt, kind ? kind->name() : "", cost, stale);
    if (stale) return;
    r.ledger_entries.push_back(entry);
    t_vrf_ = std::max(t_vrf_, c.time);
    estimator_->observe_verifier(c.node, c.outcome.latency, cost.total().dollars());

    const std::string original = *r.output;
    bool kept = c.outcome.verdict == Revision::kKept || c.outcome.revised_output == original;
    auto started = started_descendants(c.node);
    if (kept) {
      move_to(c.node, FsmInput::kSuccess);
      if (!started.empty()) {
        emit(id(c.node), "commit", {{"attempt", r.attempt}, {"nodes", ids_json(started)}});
      }
      r.plan.reset();
      return;
    }
    std::string revised = c.outcome.revised_output;
    move_to(c.node, FsmInput::kFail);
    r.output = revised;
    move_to(c.node, FsmInput::kRerun);
    r.plan.reset();
    if (started.empty()) return;
    auto decision = decide_rollback(g_.node(c.node).category, original, revised, opt_.rollback);
    if (decision == RollbackDecision::kKeep) {
      emit(id(c.node), "commit",
           {{"attempt", r.attempt},
            {"nodes", ids_json(started)},
            {"rouge_l", rouge_l(original, revised)}});
      return;
    }
    for (auto d : started) {
      NodeRec& dr = recs_[d];
      for (auto e : dr.ledger_entries) result_.ledger.invalidate(e);
      dr.ledger_entries.clear();
      ++dr.attempt;
      dr.state = NodeState::kWaiting;
      dr.output.reset();
      dr.plan.reset();
    }
    RollbackEvent ev{id(c.node), {}, revised, c.time};
    for (auto d : started) ev.invalidated.push_back(id(d));
    emit(id(c.node), "rollback", {{"invalidated", ev.invalidated}, {"corrected_output", revised}});
    result_.rollback_events.push_back(std::move(ev));
  }

  RunResult finish() {
    auto& m = result_.metrics;
    for (NodeIndex i = 0; i < g_.size(); ++i) {
      if (recs_[i].state == NodeState::kCompleted) {
        result_.outputs[id(i)] = *recs_[i].output;
      } else if (!m.failed) {
        fail_run("node " + id(i) + " did not complete");
      }
    }
    if (recs_[g_.terminal()].state == NodeState::kCompleted) {
      m.final_output = *recs_[g_.terminal()].output;
    }
    m.t_exec = t_exec_;
    m.t_vrf = std::max(t_exec_, t_vrf_);
    m.rollbacks = result_.rollback_events.size();
    m.wasted_cost = result_.ledger.wasted();
    m.total_cost = result_.ledger.total();
    m.verification_cost = result_.ledger.verification_total();
    return std::move(result_);
  }

  const RunInputs& in_;
  const RunOptions& opt_;
  const WorkflowGraph& g_;
  std::unique_ptr<Estimator> own_estimator_;
  Estimator* estimator_ = nullptr;
  std::vector<NodeRec> recs_;
  double t_exec_ = 0.0;
  double t_vrf_ = 0.0;
  RunResult result_;
  std::unique_ptr<Dispatcher> dispatcher_;
};

}  // namespace

std::string_view mode_name(RunMode m) {
  switch (m) {
    case RunMode::kNoVerify: return "noverify";
    case RunMode::kSequential: return "sequential";
    case RunMode::kSpeculative: return "speculative";
  }
  return "?";
}

RunMode parse_mode(std::string_view name) {
  for (auto m : {RunMode::kNoVerify, RunMode::kSequential, RunMode::kSpeculative}) {
    if (mode_name(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + std::string(name) + "'");
}

std::string_view clock_name(ClockKind c) {
  return c == ClockKind::kVirtual ? "virtual" : "wall";
}

ClockKind parse_clock(std::string_view name) {
  if (name == "virtual") return ClockKind::kVirtual;
  if (name == "wall") return ClockKind::kWall;
  throw Error(ErrorCode::kInvalidArgument, "unknown clock '" + std::string(name) + "'");
}

VerifierOutcome PipelineVerifier::verify(const VerifierKind& kind, const VerifierInput& input,
                                         int /*attempt*/) {
  return run_verifier(kind, input, executors_);
}

const std::vector<ScriptedVerifier::Entry>* ScriptedVerifier::find(const VerifierKind& kind,
                                                                   std::string_view node,
                                                                   std::string* key) const {
  std::string k = std::string(node) + "@" + kind.name();
  auto it = script_.find(k);
  if (it == script_.end()) {
    k = std::string(node);
    it = script_.find(k);
  }
  if (it == script_.end() || it->second.empty()) return nullptr;
  if (key) *key = k;
  return &it->second;
}

VerifierOutcome ScriptedVerifier::verify(const VerifierKind& kind, const VerifierInput& input,
                                         int /*attempt*/) {
  Entry entry;
  {
    std::lock_guard lock(mu_);
    std::string key;
    const auto* entries = find(kind, input.node_id, &key);
    if (!entries) {
      throw Error(ErrorCode::kScriptExhausted, "no scripted verifier outcome for " + input.node_id);
    }
    std::size_t idx = next_[key]++;
    entry = (*entries)[std::min(idx, entries->size() - 1)];
  }
  VerifierOutcome out;
  out.revised_output = entry.revised_output.value_or(input.original_output);
  out.verdict =
      out.revised_output == input.original_output ? Revision::kKept : Revision::kRevised;
  out.calls = entry.calls;
  out.latency = entry.latency * latency_scale_;
  return out;
}

std::optional<double> ScriptedVerifier::peek_latency(const VerifierKind& kind,
                                                     std::string_view node) const {
  std::lock_guard lock(mu_);
  std::string key;
  const auto* entries = find(kind, node, &key);
  if (!entries) return std::nullopt;
  auto it = next_.find(key);
  std::size_t idx = it == next_.end() ? 0 : it->second;
  return (*entries)[std::min(idx, entries->size() - 1)].latency * latency_scale_;
}

int pipeline_call_count(const VerifierKind& kind) {
  switch (kind.type) {
    case VerifierType::kSelfRefine:
    case VerifierType::kAdvancedRefine:
    case VerifierType::kLlmAsJudge:
      return 2;
    case VerifierType::kSelfConsistency:
      return kind.n_samples + (kind.mode == MajorityMode::kGen ? 1 : 0);
    case VerifierType::kDebate:
      return 2 + 2 * kind.rounds + 1;
  }
  return 1;
}

double SimulatedVerifier::match_rate(const VerifierKind& kind) const {
  auto it = cfg_.match_rate.find(kind.name());
  return it == cfg_.match_rate.end() ? cfg_.default_match_rate : it->second;
}

double SimulatedVerifier::latency(std::string_view node) const {
  auto it = cfg_.latency.find(node);
  return (it == cfg_.latency.end() ? cfg_.default_latency : it->second) * cfg_.latency_scale;
}

VerifierOutcome SimulatedVerifier::verify(const VerifierKind& kind, const VerifierInput& input,
                                          int /*attempt*/) {
  std::uint64_t h = mix(cfg_.seed);
  h = fnv1a(input.node_id, h);
  h = fnv1a("\x1f", h);
  h = fnv1a(input.original_output, h);
  double u = static_cast<double>(mix(h) >> 11) * 0x1.0p-53;
  VerifierOutcome out;
  bool keep = u < match_rate(kind);
  double v = static_cast<double>(mix(h ^ 0x9e3779b97f4a7c15ULL) >> 11) * 0x1.0p-53;
  if (keep) {
    out.revised_output = input.original_output;
  } else if (v < cfg_.minor_revision_share) {
    out.revised_output = input.original_output + " [revised]";
  } else {
    out.revised_output = "rewrite " + hex16(mix(h + 1));
  }
  out.verdict = keep ? Revision::kKept : Revision::kRevised;
  out.latency = latency(input.node_id);
  int n = pipeline_call_count(kind);
  for (int i = 0; i < n; ++i) {
    ExecResult call;
    call.prompt_tokens = cfg_.tokens_per_call / 2;
    call.output_tokens = cfg_.tokens_per_call - call.prompt_tokens;
    call.provider = "executor";
    if (kind.type == VerifierType::kAdvancedRefine && i == 0) call.provider = "advanced";
    if (kind.type == VerifierType::kLlmAsJudge) call.provider = i == 0 ? "secondary" : "judge";
    if (kind.type == VerifierType::kDebate) {
      if (i == n - 1) {
        call.provider = "judge";
      } else if (i % 2 == 1) {
        call.provider = "secondary";
      }
    }
    if (kind.type == VerifierType::kSelfConsistency && kind.mode == MajorityMode::kGen &&
        i == n - 1) {
      call.provider = "judge";
    }
    out.calls.push_back(call);
  }
  return out;
}

ExecResult SimulatedExecutor::execute(const ExecRequest& req) {
  validate(req);
  ExecResult r = *peek(req.node_id);
  r.output = req.node_id + ":" + hex16(mix(fnv1a(req.prompt)));
  return r;
}

std::optional<ExecResult> SimulatedExecutor::peek(std::string_view key) const {
  ExecResult r;
  auto it = cfg_.latency.find(key);
  r.latency = it == cfg_.latency.end() ? cfg_.default_latency : it->second;
  r.prompt_tokens = cfg_.prompt_tokens;
  r.output_tokens = cfg_.output_tokens;
  r.provider = "executor";
  return r;
}

EmaEstimator::EmaEstimator(std::vector<NodeEstimate> priors, double alpha)
    : est_(std::move(priors)), alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "EMA alpha must be in [0, 1]");
  }
}

NodeEstimate EmaEstimator::estimate(NodeIndex node) const { return est_.at(node); }

void EmaEstimator::observe_exec(NodeIndex node, double latency, double cost) {
  auto& e = est_.at(node);
  e.exec_latency += alpha_ * (latency - e.exec_latency);
  e.exec_cost += alpha_ * (cost - e.exec_cost);
}

void EmaEstimator::observe_verifier(NodeIndex node, double latency, double cost) {
  auto& e = est_.at(node);
  e.verifier_latency += alpha_ * (latency - e.verifier_latency);
  e.verifier_cost += alpha_ * (cost - e.verifier_cost);
}

PeekEstimator::PeekEstimator(const WorkflowGraph& g, const Executor& executor,
                             const CostConfig& cost, std::vector<NodeEstimate> priors,
                             double alpha)
    : EmaEstimator(std::move(priors), alpha), graph_(g), executor_(executor), cost_(cost) {}

NodeEstimate PeekEstimator::estimate(NodeIndex node) const {
  NodeEstimate e = EmaEstimator::estimate(node);
  if (auto next = executor_.peek(graph_.node(node).id)) {
    e.exec_latency = next->latency;
    try {
      e.exec_cost = call_cost(cost_, *next).total().dollars();
    } catch (const Error&) {
    }
  }
  return e;
}

RunResult run_workflow(const RunInputs& inputs, const RunOptions& options) {
  Scheduler s(inputs, options);
  return s.run();
}

json metrics_json(const RunMetrics& m) {
  json j{{"t_exec", m.t_exec},
         {"t_vrf", m.t_vrf},
         {"rollbacks", m.rollbacks},
         {"wasted_cost", m.wasted_cost.dollars()},
         {"total_cost", m.total_cost.dollars()},
         {"verification_cost", m.verification_cost.dollars()},
         {"final_output", m.final_output},
         {"failed", m.failed}};
  if (m.failed) j["error"] = m.error;
  return j;
}

std::string trace_jsonl(const RunResult& result) {
  std::string out;
  for (const auto& e : result.trace) {
    json j{{"t", e.t}, {"node", e.node}, {"event", e.event}, {"detail", e.detail}};
    out += j.dump();
    out += '\n';
  }
  out += json{{"summary", metrics_json(result.metrics)}}.dump();
  out += '\n';
  return out;
}

std::string ledger_jsonl(const CostLedger& ledger) {
  std::string out;
  for (const auto& e : ledger.entries()) {
    json j{{"node", e.node},
           {"kind", e.kind == LedgerKind::kExecution ? "execution" : "verification"},
           {"attempt", e.attempt},
           {"label", e.label},
           {"gpu_cost", e.cost.gpu.dollars()},
           {"model_cost", e.cost.model.dollars()},
           {"total", e.cost.total().dollars()},
           {"invalidated", e.invalidated}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace runahead
