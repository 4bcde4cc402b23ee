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

#include <map>
#include <span>
#include <string>
#include <string_view>

namespace runahead {

enum class PromptTemplate {
  kScorer,          // scorer.txt
  kJudge,           // judge.txt
  kMajorityVote,    // majority_vote.txt
  kRollback,        // rollback.txt
  kRefineFeedback,  // refine_feedback.txt
  kRefineRevision,  // refine_revision.txt
  kDebateRound,     // debate_round.txt
  kDebateJudge,     // debate_judge.txt
  kPlanner,         // planner.txt
};

std::string_view prompt_asset_name(PromptTemplate which);
// Text of the compiled-in asset, byte-identical to assets/prompts/<name>.
std::string_view prompt_template(PromptTemplate which);

// Fills <SLOT> placeholders from `slots` in a single pass (substituted text
// is never rescanned). Templates with a numbered block
//   "... 1's Answer: <PREDICTION_1>" ... "N's Answer: <PREDICTION_N>"
// have that block expanded once per entry of `numbered`. Throws
// kInvalidArgument for an unfilled placeholder.
std::string render_prompt(std::string_view tmpl,
                          const std::map<std::string, std::string, std::less<>>& slots,
                          std::span<const std::string> numbered = {});

}  // namespace runahead
