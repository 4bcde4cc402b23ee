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

#include "runahead/verifiers.hpp"

#include <algorithm>
#include <charconv>
#include <future>

#include "runahead/error.hpp"
#include "runahead/prompts.hpp"
#include "runahead/similarity.hpp"

namespace runahead {

std::string VerifierKind::name() const {
  switch (type) {
    case VerifierType::kSelfRefine: return "self-refine";
    case VerifierType::kAdvancedRefine: return "adv-refine";
    case VerifierType::kSelfConsistency:
      return std::string(mode == MajorityMode::kGen ? "sc-gen:" : "sc-select:") +
             std::to_string(n_samples);
    case VerifierType::kLlmAsJudge: return "judge";
    case VerifierType::kDebate: return "debate:" + std::to_string(rounds);
  }
  return "";
}

namespace {

int parse_count(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bad verifier name '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

VerifierKind VerifierKind::parse(std::string_view name) {
  VerifierKind k;
  const auto colon = name.find(':');
  const auto head = name.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);
  if (head == "self-refine") {
    k = self_refine();
  } else if (head == "adv-refine") {
    k = advanced_refine();
  } else if (head == "sc-gen" || head == "sc-select") {
    k = self_consistency(head == "sc-gen" ? MajorityMode::kGen : MajorityMode::kSelect,
                         arg.empty() ? 3 : parse_count(arg, name));
  } else if (head == "judge") {
    k = llm_as_judge();
  } else if (head == "debate") {
    k = debate(arg.empty() ? 1 : parse_count(arg, name));
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown verifier '" + std::string(name) + "'");
  }
  validate(k);
  return k;
}

void validate(const VerifierKind& kind) {
  if (kind.type == VerifierType::kSelfConsistency &&
      (kind.n_samples < 3 || kind.n_samples % 2 == 0)) {
    throw Error(ErrorCode::kInvalidArgument, "self-consistency needs an odd sample count >= 3");
  }
  if (kind.type == VerifierType::kDebate && kind.rounds < 1) {
    throw Error(ErrorCode::kInvalidArgument, "debate needs at least one round");
  }
}

std::vector<VerifierKind> default_verifier_set() {
  return {VerifierKind::self_refine(), VerifierKind::advanced_refine(),
          VerifierKind::self_consistency(MajorityMode::kSelect, 3), VerifierKind::llm_as_judge(),
          VerifierKind::debate(1)};
}

Verdict parse_verdict(std::string_view text) {
  static constexpr std::pair<std::string_view, Verdict> kTokens[] = {
      {"[[Correct]]", Verdict::kCorrect}, {"[[Incorrect]]", Verdict::kIncorrect},
      {"[[A]]", Verdict::kPreferA},       {"[[B]]", Verdict::kPreferB},
      {"[[C]]", Verdict::kTie}};
  std::optional<Verdict> best;
  std::size_t best_pos = 0;
  for (const auto& [token, verdict] : kTokens) {
    const auto pos = text.rfind(token);
    if (pos != std::string_view::npos && (!best || pos > best_pos)) {
      best = verdict;
      best_pos = pos;
    }
  }
  if (!best) {
    throw Error(ErrorCode::kUnparseableVerdict, "no verdict token in judge output");
  }
  return *best;
}

std::size_t closest_to_majority(std::span<const std::string> samples) {
  if (samples.size() <= 1) return 0;
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      if (i != j) sum += rouge_l(samples[i], samples[j]);
    }
    const double mean = sum / static_cast<double>(samples.size() - 1);
    if (mean > best_score) {
      best_score = mean;
      best = i;
    }
  }
  return best;
}

MajorityResult majority_select(std::span<const std::string> samples, MajorityMode mode,
                               const std::string& question, Executor* selector,
                               const std::string& key) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "majority over zero samples");
  }
  if (samples.size() == 1) return {samples.front(), std::nullopt};
  if (mode == MajorityMode::kSelect) {
    return {samples[closest_to_majority(samples)], std::nullopt};
  }
  if (selector == nullptr) {
    throw Error(ErrorCode::kMissingExecutor, "sc-gen needs a majority executor");
  }
  ExecRequest req{key, render_prompt(prompt_template(PromptTemplate::kMajorityVote),
                                     {{"QUESTION", question}}, samples)};
  ExecResult r = selector->execute(req);
  return {r.output, r};
}

namespace {

Executor* require(Executor* e, const char* what) {
  if (e == nullptr) {
    throw Error(ErrorCode::kMissingExecutor, std::string("verifier needs a ") + what + " executor");
  }
  return e;
}

// Collects calls and tracks the critical path of a pipeline made of
// sequential stages, each a set of independent calls.
class CallLog {
 public:
  void stage(std::span<const ExecResult> results) {
    double longest = 0.0;
    for (const auto& r : results) {
      calls_.push_back(r);
      longest = std::max(longest, r.latency);
    }
    latency_ += longest;
  }
  void call(const ExecResult& r) { stage(std::span<const ExecResult>(&r, 1)); }

  std::vector<ExecResult> take_calls() { return std::move(calls_); }
  double latency() const { return latency_; }

 private:
  std::vector<ExecResult> calls_;
  double latency_ = 0.0;
};

struct Job {
  Executor* executor;
  ExecRequest request;
};

std::vector<ExecResult> run_stage(std::vector<Job> jobs, bool parallel) {
  std::vector<ExecResult> out;
  if (!parallel || jobs.size() < 2) {
    for (auto& j : jobs) out.push_back(j.executor->execute(j.request));
    return out;
  }
  std::vector<std::future<ExecResult>> futures;
  for (auto& j : jobs) {
    futures.push_back(std::async(std::launch::async, [&j] { return j.executor->execute(j.request); }));
  }
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

// Judge call with one re-ask on an unparseable reply.
Verdict ask_judge(Executor* judge, const ExecRequest& req, CallLog& log) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    ExecResult r = judge->execute(req);
    log.call(r);
    try {
      Verdict v = parse_verdict(r.output);
      if (v == Verdict::kPreferA || v == Verdict::kPreferB || v == Verdict::kTie) return v;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::kUnparseableVerdict, "judge gave no [[A]]/[[B]]/[[C]] verdict for " + req.node_id);
}

std::string key(const VerifierInput& in, const std::string& stage) {
  return in.node_id + "#" + stage;
}

std::string run_refine(const VerifierKind& kind, const VerifierInput& in,
                       const VerifierExecutors& ex, CallLog& log) {
  const bool advanced = kind.type == VerifierType::kAdvancedRefine;
  Executor* critic = advanced ? require(ex.advanced, "advanced") : require(ex.base, "base");
  Executor* writer = advanced && ex.advanced_rewrites ? critic : require(ex.base, "base");
  ExecResult feedback = critic->execute(
      {key(in, "feedback"),
       render_prompt(prompt_template(PromptTemplate::kRefineFeedback),
                     {{"QUESTION", in.question}, {"ORIGINAL_ANSWER", in.original_output}})});
  log.call(feedback);
  ExecResult revision = writer->execute(
      {key(in, "revise"),
       render_prompt(prompt_template(PromptTemplate::kRefineRevision),
                     {{"QUESTION", in.question},
                      {"ORIGINAL_ANSWER", in.original_output},
                      {"FEEDBACK", feedback.output}})});
  log.call(revision);
  return revision.output;
}

std::string run_self_consistency(const VerifierKind& kind, const VerifierInput& in,
                                 const VerifierExecutors& ex, CallLog& log) {
  Executor* base = require(ex.base, "base");
  std::vector<Job> jobs;
  for (int i = 1; i <= kind.n_samples; ++i) {
    jobs.push_back({base, {key(in, "sample" + std::to_string(i)), in.question, ex.sampling}});
  }
  auto samples = run_stage(std::move(jobs), ex.parallel);
  log.stage(samples);
  std::vector<std::string> texts;
  for (const auto& s : samples) texts.push_back(s.output);
  Executor* selector = ex.majority ? ex.majority : (ex.judge ? ex.judge : ex.base);
  auto m = majority_select(texts, kind.mode, in.question, selector, key(in, "majority"));
  if (m.call) log.call(*m.call);
  return m.text;
}

std::string run_judge(const VerifierInput& in, const VerifierExecutors& ex, CallLog& log) {
  Executor* secondary = require(ex.secondary, "secondary");
  Executor* judge = require(ex.judge, "judge");
  ExecResult other = secondary->execute({key(in, "secondary"), in.question, ex.sampling});
  log.call(other);
  ExecRequest req{key(in, "judge"),
                  render_prompt(prompt_template(PromptTemplate::kJudge),
                                {{"QUESTION", in.question},
                                 {"PREDICTION_A", in.original_output},
                                 {"PREDICTION_B", other.output}})};
  return ask_judge(judge, req, log) == Verdict::kPreferB ? other.output : in.original_output;
}

// Two debaters (base and secondary) answer independently, cross-examine
// each other for `rounds` rounds, then the judge picks a final answer.
std::string run_debate(const VerifierKind& kind, const VerifierInput& in,
                       const VerifierExecutors& ex, CallLog& log) {
  Executor* debaters[2] = {require(ex.base, "base"), require(ex.secondary, "secondary")};
  Executor* judge = require(ex.judge, "judge");

  std::vector<Job> opening;
  for (int a = 0; a < 2; ++a) {
    opening.push_back({debaters[a], {key(in, "debate-open" + std::to_string(a + 1)), in.question,
                                     ex.sampling}});
  }
  auto results = run_stage(std::move(opening), ex.parallel);
  log.stage(results);
  std::string answers[2] = {results[0].output, results[1].output};

  for (int r = 1; r <= kind.rounds; ++r) {
    std::vector<Job> jobs;
    for (int a = 0; a < 2; ++a) {
      const std::string colleague[] = {answers[1 - a]};
      jobs.push_back(
          {debaters[a],
           {key(in, "debate-r" + std::to_string(r) + "-" + std::to_string(a + 1)),
            render_prompt(prompt_template(PromptTemplate::kDebateRound),
                          {{"QUESTION", in.question}, {"ORIGINAL_ANSWER", answers[a]}},
                          colleague)}});
    }
    auto revised = run_stage(std::move(jobs), ex.parallel);
    log.stage(revised);
    answers[0] = revised[0].output;
    answers[1] = revised[1].output;
  }

  const std::string finals[] = {answers[0], answers[1]};
  ExecRequest req{key(in, "debate-judge"),
                  render_prompt(prompt_template(PromptTemplate::kDebateJudge),
                                {{"CONTEXT", in.context}, {"QUESTION", in.question}}, finals)};
  return ask_judge(judge, req, log) == Verdict::kPreferB ? answers[1] : answers[0];
}

}  // namespace

VerifierOutcome run_verifier(const VerifierKind& kind, const VerifierInput& input,
                             const VerifierExecutors& executors) {
  validate(kind);
  CallLog log;
  std::string revised;
  switch (kind.type) {
    case VerifierType::kSelfRefine:
    case VerifierType::kAdvancedRefine:
      revised = run_refine(kind, input, executors, log);
      break;
    case VerifierType::kSelfConsistency:
      revised = run_self_consistency(kind, input, executors, log);
      break;
    case VerifierType::kLlmAsJudge:
      revised = run_judge(input, executors, log);
      break;
    case VerifierType::kDebate:
      revised = run_debate(kind, input, executors, log);
      break;
  }
  VerifierOutcome out;
  out.verdict = revised == input.original_output ? Revision::kKept : Revision::kRevised;
  out.revised_output = std::move(revised);
  out.latency = log.latency();
  out.calls = log.take_calls();
  return out;
}

}  // namespace runahead
