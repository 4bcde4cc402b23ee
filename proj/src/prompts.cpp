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

#include "runahead/prompts.hpp"

#include <cctype>
#include <utility>
#include <vector>

#include "runahead/error.hpp"

namespace runahead {

namespace {

struct Asset {
  const char* name;
  const char* text;
};

constexpr Asset kAssets[] = {
#include "prompt_assets.inc"
};

// Replaces every occurrence of `from` in `s` by `to`.
std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

// Expands the numbered block into one line per entry. Entry i's text goes
// into slot PREDICTION_<i>.
std::string expand_numbered(std::string_view tmpl, std::size_t count) {
  const auto first = tmpl.find("<PREDICTION_1>");
  const auto last = tmpl.find("<PREDICTION_N>");
  if (first == std::string_view::npos || last == std::string_view::npos) {
    return std::string(tmpl);
  }
  const auto line_begin = tmpl.rfind('\n', first) + 1;
  const auto line_end = tmpl.find('\n', first);
  const auto block_end = tmpl.find('\n', last);
  const std::string pattern(tmpl.substr(line_begin, line_end - line_begin));

  std::string out(tmpl.substr(0, line_begin));
  for (std::size_t i = 1; i <= count; ++i) {
    if (i > 1) out += "\n\n";
    const std::string k = std::to_string(i);
    std::string line = replace_all(pattern, "<PREDICTION_1>", "<PREDICTION_" + k + ">");
    line = replace_all(line, " 1's ", " " + k + "'s ");
    out += line;
  }
  out += tmpl.substr(block_end);
  return out;
}

}  // namespace

std::string_view prompt_asset_name(PromptTemplate which) {
  switch (which) {
    case PromptTemplate::kScorer: return "scorer.txt";
    case PromptTemplate::kJudge: return "judge.txt";
    case PromptTemplate::kMajorityVote: return "majority_vote.txt";
    case PromptTemplate::kRollback: return "rollback.txt";
    case PromptTemplate::kRefineFeedback: return "refine_feedback.txt";
    case PromptTemplate::kRefineRevision: return "refine_revision.txt";
    case PromptTemplate::kDebateRound: return "debate_round.txt";
    case PromptTemplate::kDebateJudge: return "debate_judge.txt";
    case PromptTemplate::kPlanner: return "planner.txt";
  }
  return "";
}

std::string_view prompt_template(PromptTemplate which) {
  const auto name = prompt_asset_name(which);
  for (const auto& a : kAssets) {
    if (name == a.name) return a.text;
  }
  throw Error(ErrorCode::kInvalidArgument, "prompt asset not compiled in: " + std::string(name));
}

std::string render_prompt(std::string_view tmpl,
                          const std::map<std::string, std::string, std::less<>>& slots,
                          std::span<const std::string> numbered) {
  std::map<std::string, std::string, std::less<>> all = slots;
  std::string source(tmpl);
  if (!numbered.empty()) {
    source = expand_numbered(tmpl, numbered.size());
    for (std::size_t i = 0; i < numbered.size(); ++i) {
      all["PREDICTION_" + std::to_string(i + 1)] = numbered[i];
    }
  }

  std::string out;
  out.reserve(source.size());
  std::size_t i = 0;
  while (i < source.size()) {
    if (source[i] == '<') {
      std::size_t j = i + 1;
      while (j < source.size() &&
             (std::isupper(static_cast<unsigned char>(source[j])) ||
              std::isdigit(static_cast<unsigned char>(source[j])) || source[j] == '_')) {
        ++j;
      }
      if (j < source.size() && source[j] == '>' && j > i + 1) {
        std::string_view key(source.data() + i + 1, j - i - 1);
        auto it = all.find(key);
        if (it == all.end()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "unfilled prompt slot <" + std::string(key) + ">");
        }
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += source[i++];
  }
  return out;
}

}  // namespace runahead
