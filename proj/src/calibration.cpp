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

#include "runahead/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "runahead/error.hpp"
#include "runahead/io.hpp"

namespace runahead {

using json = nlohmann::json;

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::vector<CalibrationPair> parse_calibration_jsonl(std::string_view text) {
  std::vector<CalibrationPair> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      out.push_back({j.at("text_a").get<std::string>(), j.at("text_b").get<std::string>(),
                     parse_category(j.at("category").get<std::string>()),
                     j.at("equivalent").get<bool>()});
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedDocument,
                  "calibration line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<CalibrationPair> load_calibration_jsonl(const std::filesystem::path& path) {
  return parse_calibration_jsonl(read_text_file(path));
}

double roc_auc(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scores and labels differ in length");
  }
  double wins = 0.0;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    ++pos;
    for (std::size_t k = 0; k < scores.size(); ++k) {
      if (labels[k]) continue;
      if (scores[i] > scores[k]) {
        wins += 1.0;
      } else if (scores[i] == scores[k]) {
        wins += 0.5;
      }
    }
  }
  for (bool l : labels) neg += l ? 0 : 1;
  if (pos == 0 || neg == 0) return 0.5;
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kInvalidArgument, "length mismatch");
  if (x.size() < 2) return 0.0;
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double youden_threshold(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scores and labels differ in length");
  }
  std::size_t pos = std::count(labels.begin(), labels.end(), true);
  std::size_t neg = labels.size() - pos;
  if (scores.empty()) return 0.0;
  std::vector<double> cand(scores.begin(), scores.end());
  std::sort(cand.begin(), cand.end(), std::greater<>());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  double best_t = cand.front();
  double best_j = -2.0;
  for (double t : cand) {
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) (labels[i] ? tp : fp)++;
    }
    double tpr = pos ? static_cast<double>(tp) / static_cast<double>(pos) : 0.0;
    double fpr = neg ? static_cast<double>(fp) / static_cast<double>(neg) : 0.0;
    if (tpr - fpr > best_j) {
      best_j = tpr - fpr;
      best_t = t;
    }
  }
  return best_t;
}

CalibrationReport calibrate(std::span<const CalibrationPair> pairs) {
  CalibrationReport report;
  for (auto metric : {SimilarityMetric::kCosine, SimilarityMetric::kJaccard,
                      SimilarityMetric::kRougeL, SimilarityMetric::kBleu}) {
    for (auto cat : kAllCategories) {
      std::vector<double> scores;
      std::vector<double> truth;
      std::vector<bool> labels;
      for (const auto& p : pairs) {
        if (p.category != cat) continue;
        scores.push_back(similarity(metric, p.text_a, p.text_b).value);
        labels.push_back(p.equivalent);
        truth.push_back(p.equivalent ? 1.0 : 0.0);
      }
      if (scores.empty()) continue;
      auto raw = std::make_unique<bool[]>(labels.size());
      std::copy(labels.begin(), labels.end(), raw.get());
      std::span<const bool> lab(raw.get(), labels.size());
      CalibrationCell cell;
      cell.pairs = scores.size();
      cell.auc = roc_auc(scores, lab);
      cell.spearman = spearman(scores, truth);
      cell.threshold = youden_threshold(scores, lab);
      report.cells[metric][cat] = cell;
      if (metric == SimilarityMetric::kRougeL) report.thresholds[cat] = cell.threshold;
    }
  }
  return report;
}

std::string report_table(const CalibrationReport& report) {
  std::string out = "metric";
  for (auto cat : kAllCategories) {
    out += '\t';
    out += category_name(cat);
  }
  out += '\n';
  for (const auto& [metric, row] : report.cells) {
    out += metric_name(metric);
    for (auto cat : kAllCategories) {
      out += '\t';
      auto it = row.find(cat);
      out += it == row.end() ? "-" : fmt3(it->second.spearman) + " / " + fmt3(it->second.auc);
    }
    out += '\n';
  }
  out += "threshold";
  for (auto cat : kAllCategories) {
    out += '\t';
    auto it = report.thresholds.find(cat);
    out += it == report.thresholds.end() ? "-" : fmt3(it->second);
  }
  out += '\n';
  return out;
}

}  // namespace runahead
