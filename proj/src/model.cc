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

#include "pairrank/model.h"

#include <cmath>

#include "pairrank/errors.h"

namespace pairrank {

std::string VariantName(Variant variant) {
  switch (variant) {
    case Variant::kDarn5:
      return "darn5";
    case Variant::kDarnBinary:
      return "darn-binary";
    case Variant::kDarnV2:
      return "darn-v2";
  }
  return "?";
}

Variant ParseVariant(const std::string& name) {
  if (name == "darn5") return Variant::kDarn5;
  if (name == "darn-binary") return Variant::kDarnBinary;
  if (name == "darn-v2") return Variant::kDarnV2;
  throw ConfigError("unknown model variant '" + name +
                    "' (expected darn5, darn-binary or darn-v2)");
}

int NumLabels(Variant variant) {
  return variant == Variant::kDarnBinary ? 2 : 5;
}

std::vector<double> Model::JudgeBounds(std::size_t judge_index) const {
  return ScaleBounds(bounds.values(), judges.gamma(judge_index));
}

ModelGradient ModelGradient::ZerosLike(const Model& model) {
  ModelGradient grad;
  grad.head.assign(model.head.params().size(), 0.0);
  grad.bounds.assign(model.bounds.raw().size(), 0.0);
  grad.log_gamma.assign(model.judges.size(), 0.0);
  return grad;
}

void ModelGradient::SetZero() {
  std::fill(head.begin(), head.end(), 0.0);
  std::fill(bounds.begin(), bounds.end(), 0.0);
  std::fill(log_gamma.begin(), log_gamma.end(), 0.0);
}

ModelGradient& ModelGradient::operator+=(const ModelGradient& other) {
  for (std::size_t i = 0; i < head.size(); ++i) head[i] += other.head[i];
  for (std::size_t i = 0; i < bounds.size(); ++i) bounds[i] += other.bounds[i];
  for (std::size_t i = 0; i < log_gamma.size(); ++i) {
    log_gamma[i] += other.log_gamma[i];
  }
  return *this;
}

void ModelGradient::Scale(double factor) {
  for (double& g : head) g *= factor;
  for (double& g : bounds) g *= factor;
  for (double& g : log_gamma) g *= factor;
}

std::vector<ParameterBlock> ParameterBlocks(Model& model) {
  return {{"head", model.head.params()},
          {"bounds", model.bounds.mutable_raw()},
          {"log_gamma", model.judges.mutable_log_gamma()}};
}

std::vector<ParameterBlock> ParameterBlocks(ModelGradient& grad) {
  return {{"head", grad.head},
          {"bounds", grad.bounds},
          {"log_gamma", grad.log_gamma}};
}

void ForEachParameter(Model& model, const std::function<void(double&)>& fn) {
  for (ParameterBlock& block : ParameterBlocks(model)) {
    for (double& v : block.values) fn(v);
  }
  model.bounds.Refresh();
}

void CheckFinite(const Model& model, const ModelGradient& grad) {
  for (std::size_t i = 0; i < grad.head.size(); ++i) {
    if (!std::isfinite(grad.head[i])) {
      throw NumericError("non-finite gradient in block " +
                         model.head.BlockName(i));
    }
  }
  for (double g : grad.bounds) {
    if (!std::isfinite(g)) throw NumericError("non-finite gradient in block bounds");
  }
  for (std::size_t i = 0; i < grad.log_gamma.size(); ++i) {
    if (!std::isfinite(grad.log_gamma[i])) {
      throw NumericError("non-finite gradient in block log_gamma (judge '" +
                         model.judges.id(i) + "')");
    }
  }
}

}  // namespace pairrank
