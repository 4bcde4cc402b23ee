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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "runahead/graph.hpp"
#include "runahead/similarity.hpp"

namespace runahead {

struct CalibrationPair {
  std::string text_a;
  std::string text_b;
  TaskCategory category = TaskCategory::kInstruction;
  bool equivalent = false;
};

// JSONL of {"text_a", "text_b", "category", "equivalent"}.
std::vector<CalibrationPair> parse_calibration_jsonl(std::string_view text);
std::vector<CalibrationPair> load_calibration_jsonl(const std::filesystem::path& path);

// Mann-Whitney AUC of scores for positives over negatives; ties count 1/2.
// 0.5 when either class is empty.
double roc_auc(std::span<const double> scores, std::span<const bool> labels);

// Pearson correlation of average ranks; 0 when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

// Threshold t maximizing TPR - FPR for the rule score >= t, taken from the
// observed scores; ties to the larger threshold.
double youden_threshold(std::span<const double> scores, std::span<const bool> labels);

struct CalibrationCell {
  std::size_t pairs = 0;
  double auc = 0.5;
  double spearman = 0.0;
  double threshold = 0.0;
};

struct CalibrationReport {
  std::map<SimilarityMetric, std::map<TaskCategory, CalibrationCell>> cells;
  // Youden thresholds for ROUGE-L, the metric used for rollback.
  std::map<TaskCategory, double> thresholds;
};

CalibrationReport calibrate(std::span<const CalibrationPair> pairs);

// Metric rows by category columns, "spearman / auc" per cell, then the
// thresholds; tab-separated.
std::string report_table(const CalibrationReport& report);

}  // namespace runahead
