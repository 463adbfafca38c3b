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

#include "pairrank/objective.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "pairrank/errors.h"
#include "pairrank/likelihood.h"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace pairrank {
namespace {

void CheckMasks(std::span<const PairObservation> batch,
                std::span<const DropoutMask> masks) {
  if (!masks.empty() && masks.size() != batch.size()) {
    throw DomainError("dropout mask count does not match batch size");
  }
}

}  // namespace

double PairObjective(const Model& model, const FeatureMatrix& features,
                     const PairObservation& pair, const DropoutMask* mask,
                     ModelGradient* grad) {
  if (pair.left >= features.rows() || pair.right >= features.rows()) {
    throw DomainError("pair references item outside the feature table");
  }
  ForwardCache left_cache;
  ForwardCache right_cache;
  const bool want_grad = grad != nullptr;
  const ScoreDistribution left = model.head.Forward(
      features.row(pair.left), mask, want_grad ? &left_cache : nullptr);
  const ScoreDistribution right = model.head.Forward(
      features.row(pair.right), mask, want_grad ? &right_cache : nullptr);
  const PairScoreDiff diff = MakePairScoreDiff(left, right);
  const std::vector<double>& bounds = model.bounds.values();

  double cost = 0.0;
  LabelTermGrad term;
  LabelTermGrad* term_ptr = want_grad ? &term : nullptr;
  double d_mu = 0.0;
  double d_var = 0.0;
  std::vector<double> d_bounds(want_grad ? bounds.size() : 0, 0.0);

  if (model.variant == Variant::kDarnV2) {
    for (const JudgeVote& vote : pair.votes) {
      if (vote.judge >= model.judges.size()) {
        throw LookupError("vote references judge index " +
                          std::to_string(vote.judge) + " outside the table");
      }
      const double gamma = model.judges.gamma(vote.judge);
      const std::vector<double> scaled = ScaleBounds(bounds, gamma);
      cost += SingleLabelNll(diff, scaled, vote.label, model.p_floor, term_ptr);
      if (!want_grad) continue;
      d_mu += term.d_delta_mu;
      d_var += term.d_delta_var;
      double d_log_gamma = 0.0;
      for (std::size_t k = 0; k < bounds.size(); ++k) {
        d_bounds[k] += gamma * term.d_bounds[k];
        d_log_gamma += term.d_bounds[k] * scaled[k];
      }
      grad->log_gamma[vote.judge] += d_log_gamma;
    }
  } else {
    cost = CountsNll(diff, bounds, pair.counts, model.p_floor, term_ptr);
    if (want_grad) {
      d_mu = term.d_delta_mu;
      d_var = term.d_delta_var;
      d_bounds = term.d_bounds;
    }
  }

  if (want_grad) {
    model.bounds.Backprop(d_bounds, grad->bounds);
    // delta_mu = mu_r - mu_l, delta_var = sigma_r^2 + sigma_l^2.
    model.head.Backward(features.row(pair.right), right_cache, mask, d_mu,
                        2.0 * right.sigma * d_var, grad->head);
    model.head.Backward(features.row(pair.left), left_cache, mask, -d_mu,
                        2.0 * left.sigma * d_var, grad->head);
  }
  return cost;
}

double BatchObjectiveSerial(const Model& model, const FeatureMatrix& features,
                            std::span<const PairObservation> batch,
                            std::span<const DropoutMask> masks,
                            ModelGradient* grad) {
  CheckMasks(batch, masks);
  double cost = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const DropoutMask* mask = masks.empty() ? nullptr : &masks[i];
    cost += PairObjective(model, features, batch[i], mask, grad);
  }
  if (grad != nullptr) CheckFinite(model, *grad);
  return cost;
}

double BatchObjectiveParallel(const Model& model, const FeatureMatrix& features,
                              std::span<const PairObservation> batch,
                              std::span<const DropoutMask> masks,
                              ModelGradient* grad, std::size_t shard_size) {
  CheckMasks(batch, masks);
  if (shard_size == 0) throw DomainError("shard size must be positive");
  const std::size_t num_shards = (batch.size() + shard_size - 1) / shard_size;
  std::vector<double> shard_cost(num_shards, 0.0);
  std::vector<ModelGradient> shard_grad;
  if (grad != nullptr) {
    shard_grad.assign(num_shards, ModelGradient::ZerosLike(model));
  }

  // Exceptions must not escape an OpenMP region; keep the first one.
  std::vector<std::exception_ptr> errors(num_shards);
  const long shards = static_cast<long>(num_shards);
#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < shards; ++s) {
    try {
      const std::size_t begin = static_cast<std::size_t>(s) * shard_size;
      const std::size_t end = std::min(begin + shard_size, batch.size());
      ModelGradient* local = grad != nullptr ? &shard_grad[s] : nullptr;
      double cost = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const DropoutMask* mask = masks.empty() ? nullptr : &masks[i];
        cost += PairObjective(model, features, batch[i], mask, local);
      }
      shard_cost[s] = cost;
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  double cost = 0.0;
  for (std::size_t s = 0; s < num_shards; ++s) {
    cost += shard_cost[s];
    if (grad != nullptr) *grad += shard_grad[s];
  }
  if (grad != nullptr) CheckFinite(model, *grad);
  return cost;
}

std::vector<ScoreDistribution> ScoreItemsSerial(const RankHead& head,
                                                const FeatureMatrix& features) {
  std::vector<ScoreDistribution> scores(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    scores[i] = head.Forward(features.row(i));
  }
  return scores;
}

std::vector<ScoreDistribution> ScoreItemsParallel(const RankHead& head,
                                                  const FeatureMatrix& features) {
  std::vector<ScoreDistribution> scores(features.rows());
  std::vector<std::exception_ptr> errors(features.rows());
  const long n = static_cast<long>(features.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      scores[i] = head.Forward(features.row(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return scores;
}

}  // namespace pairrank
