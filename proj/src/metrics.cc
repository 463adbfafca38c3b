// Copyright 2026 The Pairrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pairrank/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pairrank/errors.h"
#include "pairrank/text_format.h"

namespace pairrank {

double FiveWayAccuracy(std::span<const int> predictions,
                       std::span<const LabelCounts> truth) {
  if (predictions.empty()) throw DomainError("accuracy over an empty set");
  if (predictions.size() != truth.size()) {
    throw DomainError("prediction and truth sizes differ");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == ArgmaxLabel(truth[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

int BinaryFromFiveWay(int label) {
  return label == kRightSlightlyBetter || label == kRightBetter ? 1 : 0;
}

int BinaryFromScores(double left_score, double right_score) {
  return left_score >= right_score ? 0 : 1;
}

double BinaryAccuracy(std::span<const int> predictions,
                      std::span<const int> truth) {
  if (predictions.empty()) throw DomainError("accuracy over an empty set");
  if (predictions.size() != truth.size()) {
    throw DomainError("prediction and truth sizes differ");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double BinaryAccuracyFromScores(
    std::span<const std::pair<double, double>> left_right_scores,
    std::span<const LabelCounts> truth) {
  if (left_right_scores.size() != truth.size()) {
    throw DomainError("prediction and truth sizes differ");
  }
  std::vector<int> predicted;
  std::vector<int> actual;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    predicted.push_back(BinaryFromScores(left_right_scores[i].first,
                                         left_right_scores[i].second));
    actual.push_back(BinaryFromFiveWay(ArgmaxLabel(truth[i])));
  }
  return BinaryAccuracy(predicted, actual);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean(i+1..j).
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double Srcc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("SRCC inputs differ in length");
  if (x.size() < 2) throw DomainError("SRCC needs at least two values");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) {
      throw DomainError("SRCC input contains NaN");
    }
  }
  const std::vector<double> rx = AverageRanks(x);
  const std::vector<double> ry = AverageRanks(y);
  const double n = static_cast<double>(x.size());
  const double mean = 0.5 * (n + 1.0);  // same for both rank vectors
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DomainError("SRCC undefined for a constant vector");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

int MajorityVoteBaseline(std::span<const int> labels) {
  if (labels.empty()) throw DomainError("baseline needs training labels");
  const int max_label = *std::max_element(labels.begin(), labels.end());
  if (max_label < 0 || *std::min_element(labels.begin(), labels.end()) < 0) {
    throw DomainError("negative label");
  }
  std::vector<std::size_t> counts(max_label + 1, 0);
  for (int label : labels) ++counts[label];
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                          counts.begin());
}

void WriteEvalReport(std::ostream& out, const EvalReport& report) {
  out << kEvalPragma << "\n";
  out << "metric " << report.metric << "\n";
  out << "value " << FormatDouble(report.value) << "\n";
  out << "pairs " << report.pairs << "\n";
  out << "items " << report.items << "\n";
  out << "variant " << (report.variant.empty() ? "-" : report.variant) << "\n";
  for (const auto& [key, value] : report.config) {
    out << "config." << key << " " << value << "\n";
  }
}

}  // namespace pairrank
