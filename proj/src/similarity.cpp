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

#include "runahead/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "runahead/error.hpp"

namespace runahead {

namespace {

using Tokens = std::vector<std::string>;

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_tokens(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return 0.0;
  const double lcs = static_cast<double>(lcs_length(a, b));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(a.size());
  const double r = lcs / static_cast<double>(b.size());
  return 2.0 * p * r / (p + r);
}

double jaccard(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

double cosine(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::map<std::string, double> ta, tb;
  for (const auto& t : a) ta[t] += 1.0;
  for (const auto& t : b) tb[t] += 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, c] : ta) {
    na += c * c;
    if (auto it = tb.find(t); it != tb.end()) dot += c * it->second;
  }
  for (const auto& [t, c] : tb) nb += c * c;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

// Sentence BLEU with clipped n-gram precisions for n = 1..4. Orders 2..4
// use add-one smoothing, (matches + 1) / (total + 1); unigram precision is
// unsmoothed so token-disjoint pairs score 0.
double bleu(const Tokens& cand, const Tokens& ref) {
  if (cand.empty() || ref.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<std::vector<std::string>, int> ref_counts, cand_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) {
      ++ref_counts[Tokens(ref.begin() + i, ref.begin() + i + n)];
    }
    for (std::size_t i = 0; i + n <= cand.size(); ++i) {
      ++cand_counts[Tokens(cand.begin() + i, cand.begin() + i + n)];
    }
    double matches = 0.0, total = 0.0;
    for (const auto& [gram, c] : cand_counts) {
      total += c;
      if (auto it = ref_counts.find(gram); it != ref_counts.end()) {
        matches += std::min(c, it->second);
      }
    }
    double p = n == 1 ? matches / total : (matches + 1.0) / (total + 1.0);
    if (p <= 0.0) return 0.0;
    log_sum += std::log(p);
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return std::clamp(bp * std::exp(log_sum / 4.0), 0.0, 1.0);
}

}  // namespace

std::string_view metric_name(SimilarityMetric metric) {
  switch (metric) {
    case SimilarityMetric::kCosine: return "cosine";
    case SimilarityMetric::kJaccard: return "jaccard";
    case SimilarityMetric::kRougeL: return "rouge-l";
    case SimilarityMetric::kBleu: return "bleu";
  }
  return "";
}

SimilarityMetric parse_metric(std::string_view name) {
  for (auto m : kAllMetrics) {
    if (metric_name(m) == name) return m;
  }
  throw Error(ErrorCode::kUnknownMetric, "unknown similarity metric '" + std::string(name) + "'");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c >= 0x80;
    if (word) {
      cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

double rouge_l(std::string_view a, std::string_view b) {
  return rouge_l_tokens(tokenize(a), tokenize(b));
}

SimilarityScore similarity(SimilarityMetric metric, std::string_view a, std::string_view b) {
  const Tokens ta = tokenize(a), tb = tokenize(b);
  switch (metric) {
    case SimilarityMetric::kCosine: return {metric, cosine(ta, tb)};
    case SimilarityMetric::kJaccard: return {metric, jaccard(ta, tb)};
    case SimilarityMetric::kRougeL: return {metric, rouge_l_tokens(ta, tb)};
    case SimilarityMetric::kBleu: return {metric, bleu(ta, tb)};
  }
  throw Error(ErrorCode::kUnknownMetric, "unknown similarity metric");
}

}  // namespace runahead
