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

#ifndef PAIRRANK_MODEL_H_
#define PAIRRANK_MODEL_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pairrank/boundaries.h"
#include "pairrank/judges.h"
#include "pairrank/likelihood.h"
#include "pairrank/rank_head.h"

namespace pairrank {

enum class Variant {
  kDarn5,       // five labels, shared boundaries
  kDarnBinary,  // two labels, one boundary
  kDarnV2,      // five labels, per-judge boundary scale
};

std::string VariantName(Variant variant);
Variant ParseVariant(const std::string& name);
int NumLabels(Variant variant);

// Everything the objective depends on.
struct Model {
  Variant variant = Variant::kDarn5;
  RankHead head;
  BoundarySet bounds;
  JudgeTable judges;  // consulted only by kDarnV2
  double p_floor = kDefaultProbFloor;

  int num_labels() const { return bounds.num_labels(); }
  // Boundaries judge `judge_index` labels against.
  std::vector<double> JudgeBounds(std::size_t judge_index) const;
};

// Gradient with the same layout as Model's trainable parameters.
struct ModelGradient {
  std::vector<double> head;
  std::vector<double> bounds;     // w.r.t. BoundarySet::raw()
  std::vector<double> log_gamma;  // w.r.t. JudgeTable::log_gamma()

  static ModelGradient ZerosLike(const Model& model);
  void SetZero();
  ModelGradient& operator+=(const ModelGradient& other);
  void Scale(double factor);
  std::size_t size() const {
    return head.size() + bounds.size() + log_gamma.size();
  }
};

// Named views over trainable parameters, in a fixed order shared by models
// and gradients: head, bounds, log_gamma.
struct ParameterBlock {
  std::string name;
  std::span<double> values;
};

std::vector<ParameterBlock> ParameterBlocks(Model& model);
std::vector<ParameterBlock> ParameterBlocks(ModelGradient& grad);

// Applies fn(value&) to every trainable parameter in block order, then
// refreshes derived boundary values.
void ForEachParameter(Model& model, const std::function<void(double&)>& fn);

// Throws NumericError naming the first parameter block ("W2", "bounds",
// "log_gamma", ...) that holds a non-finite entry.
void CheckFinite(const Model& model, const ModelGradient& grad);

}  // namespace pairrank

#endif  // PAIRRANK_MODEL_H_
