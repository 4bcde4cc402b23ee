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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "runahead/executor.hpp"

namespace runahead {

enum class VerifierType { kSelfRefine, kAdvancedRefine, kSelfConsistency, kLlmAsJudge, kDebate };

// sc-gen asks a model to write the majority answer; sc-select picks the
// existing sample closest to the others.
enum class MajorityMode { kGen, kSelect };

struct VerifierKind {
  VerifierType type = VerifierType::kSelfRefine;
  MajorityMode mode = MajorityMode::kSelect;  // kSelfConsistency only
  int n_samples = 3;                          // kSelfConsistency only; odd, >= 3
  int rounds = 1;                             // kDebate only; >= 1

  static VerifierKind self_refine() { return {VerifierType::kSelfRefine}; }
  static VerifierKind advanced_refine() { return {VerifierType::kAdvancedRefine}; }
  static VerifierKind self_consistency(MajorityMode mode, int n) {
    return {VerifierType::kSelfConsistency, mode, n};
  }
  static VerifierKind llm_as_judge() { return {VerifierType::kLlmAsJudge}; }
  static VerifierKind debate(int rounds = 1) {
    return {VerifierType::kDebate, MajorityMode::kSelect, 3, rounds};
  }

  // "self-refine", "adv-refine", "sc-gen:<n>", "sc-select:<n>", "judge",
  // "debate:<rounds>".
  std::string name() const;
  static VerifierKind parse(std::string_view name);

  friend bool operator==(const VerifierKind& a, const VerifierKind& b) {
    return a.name() == b.name();
  }
};

// Throws kInvalidArgument when n_samples is even or < 3, or rounds < 1.
void validate(const VerifierKind& kind);

// Candidate order used by the selector: self-refine, adv-refine,
// sc-select:3, judge, debate:1.
std::vector<VerifierKind> default_verifier_set();

enum class Verdict { kCorrect, kIncorrect, kPreferA, kPreferB, kTie };

// The last of [[Correct]], [[Incorrect]], [[A]], [[B]], [[C]] in `text`
// wins; [[C]] is a tie. Throws kUnparseableVerdict when none is present.
Verdict parse_verdict(std::string_view text);

enum class Revision { kKept, kRevised };

struct VerifierOutcome {
  std::string revised_output;
  // kKept iff revised_output is byte-identical to the original output.
  Revision verdict = Revision::kKept;
  std::vector<ExecResult> calls;
  // Critical path through the pipeline's internal call graph.
  double latency = 0.0;
};

struct VerifierInput {
  std::string node_id;
  std::string question;  // the prompt the node executed
  std::string context;   // optional extra context for the debate judge
  std::string original_output;
};

struct VerifierExecutors {
  Executor* base = nullptr;       // the node's own model
  Executor* advanced = nullptr;   // larger critic for adv-refine
  Executor* secondary = nullptr;  // independent model for judge / debate
  Executor* judge = nullptr;
  // Model that writes the sc-gen majority answer; falls back to judge,
  // then base.
  Executor* majority = nullptr;
  // Sampling for self-consistency samples and secondary answers.
  Sampling sampling{0.7, 0.95};
  // adv-refine: whether the advanced model also writes the revision.
  bool advanced_rewrites = false;
  // Run independent calls (samples, debaters) on separate threads.
  bool parallel = false;
};

// Runs one verifier pipeline. Calls are keyed "<node_id>#<stage>" so
// scripted executors can address each stage. Throws kMissingExecutor or
// kUnparseableVerdict (after one re-ask).
VerifierOutcome run_verifier(const VerifierKind& kind, const VerifierInput& input,
                             const VerifierExecutors& executors);

// Index of the sample with the highest mean ROUGE-L F1 against the others;
// ties go to the earliest index.
std::size_t closest_to_majority(std::span<const std::string> samples);

struct MajorityResult {
  std::string text;
  std::optional<ExecResult> call;  // set in kGen mode
};

MajorityResult majority_select(std::span<const std::string> samples, MajorityMode mode,
                               const std::string& question, Executor* selector,
                               const std::string& key = "majority");

}  // namespace runahead
