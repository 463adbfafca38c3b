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

#ifndef PAIRRANK_LIKELIHOOD_H_
#define PAIRRANK_LIKELIHOOD_H_

#include <span>
#include <string>
#include <vector>

#include "pairrank/judges.h"
#include "pairrank/rank_head.h"

namespace pairrank {

inline constexpr double kDefaultProbFloor = 1e-12;

// Gaussian score difference of an ordered pair. delta_mu is
// mu_right - mu_left, so a large positive value favours the last label
// ("right better"). delta_var is a variance, sigma_left^2 + sigma_right^2.
struct PairScoreDiff {
  double delta_mu = 0.0;
  double delta_var = 1.0;
};

PairScoreDiff MakePairScoreDiff(const ScoreDistribution& left,
                                const ScoreDistribution& right);

// Probability of each of the K = bounds.size() + 1 labels: the normal mass
// of N(delta_mu, delta_var) between consecutive boundaries, with the outer
// buckets open to -inf / +inf. Throws InvariantError for non-increasing
// bounds and NumericError for delta_var <= 0.
std::vector<double> PairLabelProbs(const PairScoreDiff& diff,
                                   std::span<const double> bounds);

// Derivatives of one pair's negative log-likelihood term.
struct LabelTermGrad {
  double d_delta_mu = 0.0;
  double d_delta_var = 0.0;
  std::vector<double> d_bounds;  // size K-1
};

// -sum_j counts[j] * log(max(p_j, p_floor)). When `grad` is non-null it is
// overwritten with the derivatives; a floored bucket contributes nothing.
double CountsNll(const PairScoreDiff& diff, std::span<const double> bounds,
                 std::span<const int> counts, double p_floor,
                 LabelTermGrad* grad = nullptr);

// -log(max(p_label, p_floor)); a single judge's vote.
double SingleLabelNll(const PairScoreDiff& diff, std::span<const double> bounds,
                      int label, double p_floor, LabelTermGrad* grad = nullptr);

struct CountedPair {
  PairScoreDiff diff;
  std::vector<int> counts;  // n^j per label
};

struct JudgeLabel {
  std::string judge_id;
  int label = 0;
};

struct JudgedPair {
  PairScoreDiff diff;
  std::vector<JudgeLabel> labels;  // at most one per judge
};

// Shared-boundary cost summed over pairs. Throws DomainError on an empty
// list or when no count is positive.
double DarnCost(std::span<const CountedPair> pairs,
                std::span<const double> bounds,
                double p_floor = kDefaultProbFloor);

// Per-judge cost where judge r uses boundaries base_bounds * gamma_r.
// Throws LookupError for an unknown judge and DataError when a judge labels
// the same pair twice.
double DarnV2Cost(std::span<const JudgedPair> pairs,
                  std::span<const double> base_bounds, const JudgeTable& judges,
                  double p_floor = kDefaultProbFloor);

std::vector<double> ScaleBounds(std::span<const double> bounds, double gamma);

// Most likely label; ties go to the lowest index.
int PredictLabel(const PairScoreDiff& diff, std::span<const double> bounds);

// Each judge votes for its own most likely label; the mode wins. Ties are
// broken by the largest probability mass summed over judges, then by the
// lowest index. Throws DomainError for an empty judge set.
int PredictLabelV2(const PairScoreDiff& diff,
                   std::span<const double> base_bounds,
                   std::span<const double> gammas);

}  // namespace pairrank

#endif  // PAIRRANK_LIKELIHOOD_H_
