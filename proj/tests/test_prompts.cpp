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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "runahead/error.hpp"
#include "runahead/prompts.hpp"

namespace runahead {
namespace {

const PromptTemplate kAll[] = {
    PromptTemplate::kScorer,         PromptTemplate::kJudge,          PromptTemplate::kMajorityVote,
    PromptTemplate::kRollback,       PromptTemplate::kRefineFeedback, PromptTemplate::kRefineRevision,
    PromptTemplate::kDebateRound,    PromptTemplate::kDebateJudge,    PromptTemplate::kPlanner};

TEST(Prompts, CompiledAssetsMatchFiles) {
  for (auto t : kAll) {
    std::ifstream in(std::string(RUNAHEAD_ASSETS_DIR) + "/prompts/" +
                     std::string(prompt_asset_name(t)));
    ASSERT_TRUE(in) << prompt_asset_name(t);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), prompt_template(t)) << prompt_asset_name(t);
  }
}

TEST(Prompts, JudgeTemplateSlots) {
  auto text = prompt_template(PromptTemplate::kJudge);
  EXPECT_NE(text.find("<QUESTION>"), std::string_view::npos);
  EXPECT_NE(text.find("<PREDICTION_A>"), std::string_view::npos);
  EXPECT_NE(text.find("<PREDICTION_B>"), std::string_view::npos);
  EXPECT_NE(text.find("[[A]]"), std::string_view::npos);
}

TEST(Prompts, SinglePassSubstitution) {
  auto out = render_prompt("Q: <QUESTION> / A: <ANSWER>", {{"QUESTION", "<ANSWER>"}, {"ANSWER", "x"}});
  EXPECT_EQ(out, "Q: <ANSWER> / A: x");
}

TEST(Prompts, UnfilledSlotThrows) {
  try {
    render_prompt("Q: <QUESTION>", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Prompts, LiteralAnglesSurvive) {
  EXPECT_EQ(render_prompt("a < b and <x> and <>", {}), "a < b and <x> and <>");
}

TEST(Prompts, NumberedBlockExpands) {
  const std::string samples[] = {"red", "green"};
  auto out = render_prompt(prompt_template(PromptTemplate::kMajorityVote), {{"QUESTION", "Color?"}},
                           samples);
  EXPECT_NE(out.find("Assistant 1's Answer: red"), std::string::npos);
  EXPECT_NE(out.find("Assistant 2's Answer: green"), std::string::npos);
  EXPECT_EQ(out.find("Assistant 3"), std::string::npos);
  EXPECT_EQ(out.find("<PREDICTION"), std::string::npos);
  EXPECT_NE(out.find("Question: Color?"), std::string::npos);
}

}  // namespace
}  // namespace runahead
