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

#include <string>
#include <string_view>
#include <vector>

namespace runahead {

enum class SimilarityMetric { kCosine, kJaccard, kRougeL, kBleu };

inline constexpr SimilarityMetric kAllMetrics[] = {
    SimilarityMetric::kCosine, SimilarityMetric::kJaccard, SimilarityMetric::kRougeL,
    SimilarityMetric::kBleu};

std::string_view metric_name(SimilarityMetric metric);
// Accepts "cosine", "jaccard", "rouge-l" and "bleu"; throws kUnknownMetric.
SimilarityMetric parse_metric(std::string_view name);

struct SimilarityScore {
  SimilarityMetric metric;
  double value = 0.0;  // in [0, 1]
};

// Lowercases ASCII letters and splits on every byte that is not an ASCII
// letter or digit. Bytes >= 0x80 count as word characters so UTF-8 words
// stay intact. Punctuation is discarded.
std::vector<std::string> tokenize(std::string_view text);

// ROUGE-L F1 over tokenize(): P = LCS/|a|, R = LCS/|b|. 0 if either side
// has no tokens.
double rouge_l(std::string_view a, std::string_view b);

// All metrics return 0 when either side has no tokens. kBleu treats `a` as
// the candidate and `b` as the reference; the others are symmetric.
SimilarityScore similarity(SimilarityMetric metric, std::string_view a, std::string_view b);

}  // namespace runahead
