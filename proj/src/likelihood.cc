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

#include "pairrank/likelihood.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pairrank/boundaries.h"
#include "pairrank/errors.h"
#include "pairrank/normal.h"

namespace pairrank {
namespace {

void CheckDiff(const PairScoreDiff& diff) {
  if (!std::isfinite(diff.delta_mu)) {
    throw NumericError("score difference mean is not finite");
  }
  if (!(diff.delta_var > 0.0) || !std::isfinite(diff.delta_var)) {
    throw NumericError("score difference variance must be finite and > 0");
  }
}

// Standardized boundary positions z_k = (b_k - delta_mu) / s.
std::vector<double> Standardize(const PairScoreDiff& diff,
                                std::span<const double> bounds) {
  const double s = std::sqrt(diff.delta_var);
  std::vector<double> z(bounds.size());
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    z[k] = (bounds[k] - diff.delta_mu) / s;
  }
  return z;
}

std::vector<double> ProbsFromZ(std::span<const double> z) {
  const std::size_t K = z.size() + 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> probs(K);
  for (std::size_t j = 0; j < K; ++j) {
    const double lo = j == 0 ? -kInf : z[j - 1];
    const double hi = j == K - 1 ? kInf : z[j];
    probs[j] = NormalMass(lo, hi);
  }
  return probs;
}

// Weighted NLL over labels; `weights[j]` is the multiplicity of label j.
double WeightedNll(const PairScoreDiff& diff, std::span<const double> bounds,
                   std::span<const double> weights, double p_floor,
                   LabelTermGrad* grad) {
  CheckDiff(diff);
  CheckStrictlyIncreasing(bounds);
  const std::vector<double> z = Standardize(diff, bounds);
  const std::vector<double> probs = ProbsFromZ(z);
  const std::size_t K = probs.size();

  double cost = 0.0;
  std::vector<double> dl_dp(K, 0.0);
  for (std::size_t j = 0; j < K; ++j) {
    if (weights[j] == 0.0) continue;
    if (probs[j] > p_floor) {
      cost -= weights[j] * std::log(probs[j]);
      dl_dp[j] = -weights[j] / probs[j];
    } else {
      cost -= weights[j] * std::log(p_floor);
    }
  }
  if (grad == nullptr) return cost;

  // With s = sqrt(var): dPhi(z_k)/db_k = pdf(z_k)/s,
  // dPhi(z_k)/d delta_mu = -pdf(z_k)/s, dPhi(z_k)/d var = -z_k pdf(z_k)/(2 var).
  const double s = std::sqrt(diff.delta_var);
  grad->d_bounds.assign(K - 1, 0.0);
  grad->d_delta_mu = 0.0;
  grad->d_delta_var = 0.0;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const double pdf = NormalPdf(z[k]);
    // Boundary k is the upper edge of bucket k and the lower edge of k+1.
    const double edge = dl_dp[k] - dl_dp[k + 1];
    grad->d_bounds[k] = edge * pdf / s;
    grad->d_delta_mu -= edge * pdf / s;
    grad->d_delta_var -= edge * z[k] * pdf / (2.0 * diff.delta_var);
  }
  return cost;
}

}  // namespace

PairScoreDiff MakePairScoreDiff(const ScoreDistribution& left,
                                const ScoreDistribution& right) {
  return {right.mu - left.mu,
          right.sigma * right.sigma + left.sigma * left.sigma};
}

std::vector<double> PairLabelProbs(const PairScoreDiff& diff,
                                   std::span<const double> bounds) {
  CheckStrictlyIncreasing(bounds);
  CheckDiff(diff);
  return ProbsFromZ(Standardize(diff, bounds));
}

double CountsNll(const PairScoreDiff& diff, std::span<const double> bounds,
                 std::span<const int> counts, double p_floor,
                 LabelTermGrad* grad) {
  if (counts.size() != bounds.size() + 1) {
    throw DomainError("count vector has " + std::to_string(counts.size()) +
                      " slots for " + std::to_string(bounds.size() + 1) +
                      " labels");
  }
  std::vector<double> weights(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] < 0) throw DomainError("negative label count");
    weights[j] = counts[j];
  }
  return WeightedNll(diff, bounds, weights, p_floor, grad);
}

double SingleLabelNll(const PairScoreDiff& diff, std::span<const double> bounds,
                      int label, double p_floor, LabelTermGrad* grad) {
  if (label < 0 || label > static_cast<int>(bounds.size())) {
    throw DomainError("label " + std::to_string(label) + " out of range");
  }
  std::vector<double> weights(bounds.size() + 1, 0.0);
  weights[label] = 1.0;
  return WeightedNll(diff, bounds, weights, p_floor, grad);
}

double DarnCost(std::span<const CountedPair> pairs,
                std::span<const double> bounds, double p_floor) {
  if (pairs.empty()) throw DomainError("cost over an empty pair list");
  double cost = 0.0;
  long total = 0;
  for (const CountedPair& pair : pairs) {
    for (int n : pair.counts) total += n;
    cost += CountsNll(pair.diff, bounds, pair.counts, p_floor);
  }
  if (total <= 0) throw DomainError("no positive label counts");
  return cost;
}

std::vector<double> ScaleBounds(std::span<const double> bounds, double gamma) {
  std::vector<double> scaled(bounds.begin(), bounds.end());
  for (double& b : scaled) b *= gamma;
  return scaled;
}

double DarnV2Cost(std::span<const JudgedPair> pairs,
                  std::span<const double> base_bounds, const JudgeTable& judges,
                  double p_floor) {
  if (pairs.empty()) throw DomainError("cost over an empty pair list");
  double cost = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::set<std::string> seen;
    for (const JudgeLabel& vote : pairs[i].labels) {
      if (!seen.insert(vote.judge_id).second) {
        throw DataError("judge '" + vote.judge_id + "' labels pair " +
                        std::to_string(i) + " twice");
      }
      const double gamma = judges.gamma(judges.IndexOf(vote.judge_id));
      cost += SingleLabelNll(pairs[i].diff, ScaleBounds(base_bounds, gamma),
                             vote.label, p_floor);
    }
  }
  return cost;
}

int PredictLabel(const PairScoreDiff& diff, std::span<const double> bounds) {
  const std::vector<double> probs = PairLabelProbs(diff, bounds);
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                          probs.begin());
}

int PredictLabelV2(const PairScoreDiff& diff,
                   std::span<const double> base_bounds,
                   std::span<const double> gammas) {
  if (gammas.empty()) throw DomainError("no judges to vote");
  const std::size_t K = base_bounds.size() + 1;
  std::vector<int> votes(K, 0);
  std::vector<double> mass(K, 0.0);
  for (double gamma : gammas) {
    const std::vector<double> probs =
        PairLabelProbs(diff, ScaleBounds(base_bounds, gamma));
    const auto best = std::max_element(probs.begin(), probs.end());
    ++votes[best - probs.begin()];
    for (std::size_t j = 0; j < K; ++j) mass[j] += probs[j];
  }
  const int top = *std::max_element(votes.begin(), votes.end());
  int winner = -1;
  for (std::size_t j = 0; j < K; ++j) {
    if (votes[j] != top) continue;
    if (winner < 0 || mass[j] > mass[winner]) winner = static_cast<int>(j);
  }
  return winner;
}

}  // namespace pairrank
