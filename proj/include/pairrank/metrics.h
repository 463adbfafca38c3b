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

#ifndef PAIRRANK_METRICS_H_
#define PAIRRANK_METRICS_H_

#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pairrank/dataio.h"

namespace pairrank {

// Fraction of pairs whose predicted label equals the majority label
// argmax_j n^j. Throws DomainError on empty or mismatched inputs.
double FiveWayAccuracy(std::span<const int> predictions,
                       std::span<const LabelCounts> truth);

// {3, 4} -> 1 ("right better" side), everything else -> 0.
int BinaryFromFiveWay(int label);
// 0 when the left score is not smaller than the right one, else 1.
int BinaryFromScores(double left_score, double right_score);

// Fraction of equal entries. Throws DomainError on empty or mismatched
// inputs.
double BinaryAccuracy(std::span<const int> predictions,
                      std::span<const int> truth);

// Binary accuracy of score comparisons against five-way truth.
double BinaryAccuracyFromScores(
    std::span<const std::pair<double, double>> left_right_scores,
    std::span<const LabelCounts> truth);

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> values);

// Spearman correlation: Pearson correlation of average ranks. Throws
// DomainError for length mismatch, fewer than two values, or a constant
// vector.
double Srcc(std::span<const double> x, std::span<const double> y);

// Most frequent label, ties to the lowest index. Throws DomainError when
// `labels` is empty.
int MajorityVoteBaseline(std::span<const int> labels);

struct EvalReport {
  std::string metric;
  double value = 0.0;
  std::size_t pairs = 0;
  std::size_t items = 0;
  std::string variant;
  std::vector<std::pair<std::string, std::string>> config;
};

inline constexpr char kEvalPragma[] = "#pairrank-eval v1";

// Line-delimited "key value" text, config entries as "config.<key>".
void WriteEvalReport(std::ostream& out, const EvalReport& report);

}  // namespace pairrank

#endif  // PAIRRANK_METRICS_H_
