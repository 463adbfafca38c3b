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

#include "pairrank/boundaries.h"

#include <cmath>
#include <sstream>
#include <utility>

#include "pairrank/errors.h"

namespace pairrank {
namespace {

int NumRaw(int num_labels, BoundaryMode mode) {
  if (mode == BoundaryMode::kFree) return num_labels - 1;
  return (num_labels - 1) / 2;
}

}  // namespace

std::string BoundaryModeName(BoundaryMode mode) {
  return mode == BoundaryMode::kFree ? "free" : "antisymmetric";
}

BoundaryMode ParseBoundaryMode(const std::string& name) {
  if (name == "free") return BoundaryMode::kFree;
  if (name == "antisymmetric") return BoundaryMode::kAntisymmetric;
  throw ConfigError("unknown boundary mode '" + name + "'");
}

double Softplus(double x) {
  if (x > 30.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double InverseSoftplus(double y) {
  if (!(y > 0.0)) throw InvariantError("softplus inverse needs y > 0");
  if (y > 30.0) return y + std::log(-std::expm1(-y));
  return std::log(std::expm1(y));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void CheckStrictlyIncreasing(std::span<const double> values) {
  if (values.empty()) throw InvariantError("boundary set is empty");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw InvariantError("boundary " + std::to_string(k) + " is not finite");
    }
    if (k > 0 && !(values[k] > values[k - 1])) {
      std::ostringstream msg;
      msg << "boundaries not strictly increasing at index " << k << " ("
          << values[k - 1] << " >= " << values[k] << ")";
      throw InvariantError(msg.str());
    }
  }
}

BoundarySet BoundarySet::FromValues(std::span<const double> values,
                                    BoundaryMode mode) {
  CheckStrictlyIncreasing(values);
  BoundarySet set;
  set.num_labels_ = static_cast<int>(values.size()) + 1;
  set.mode_ = mode;
  const std::size_t n = values.size();
  if (mode == BoundaryMode::kFree) {
    set.raw_.push_back(values[0]);
    for (std::size_t k = 1; k < n; ++k) {
      set.raw_.push_back(InverseSoftplus(values[k] - values[k - 1]));
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(values[k] + values[n - 1 - k]) > 1e-12) {
        throw InvariantError("antisymmetric boundaries must mirror about 0");
      }
    }
    const std::size_t half = n / 2;  // first index of the positive half
    const std::size_t start = (n % 2 == 1) ? half + 1 : half;
    double prev = 0.0;
    for (std::size_t k = start; k < n; ++k) {
      set.raw_.push_back(InverseSoftplus(values[k] - prev));
      prev = values[k];
    }
  }
  set.Refresh();
  return set;
}

BoundarySet BoundarySet::FromRaw(int num_labels, BoundaryMode mode,
                                 std::vector<double> raw) {
  if (num_labels < 2) throw ConfigError("need at least two labels");
  if (static_cast<int>(raw.size()) != NumRaw(num_labels, mode)) {
    throw ConfigError("boundary raw parameter count " +
                      std::to_string(raw.size()) + " does not match " +
                      std::to_string(num_labels) + " labels");
  }
  BoundarySet set;
  set.num_labels_ = num_labels;
  set.mode_ = mode;
  set.raw_ = std::move(raw);
  set.Refresh();
  set.CheckOrdered();
  return set;
}

BoundarySet BoundarySet::Default(int num_labels, BoundaryMode mode) {
  if (num_labels < 2) throw ConfigError("need at least two labels");
  std::vector<double> values(num_labels - 1);
  const double center = 0.5 * (num_labels - 2);
  for (int k = 0; k < num_labels - 1; ++k) values[k] = k - center;
  return FromValues(values, mode);
}

void BoundarySet::Refresh() {
  const int n = num_labels_ - 1;
  values_.assign(n, 0.0);
  if (mode_ == BoundaryMode::kFree) {
    values_[0] = raw_[0];
    for (int k = 1; k < n; ++k) values_[k] = values_[k - 1] + Softplus(raw_[k]);
    return;
  }
  const int start = (n % 2 == 1) ? n / 2 + 1 : n / 2;
  double acc = 0.0;
  for (int k = start; k < n; ++k) {
    acc += Softplus(raw_[k - start]);
    values_[k] = acc;
    values_[n - 1 - k] = -acc;
  }
}

void BoundarySet::Backprop(std::span<const double> value_grad,
                           std::span<double> raw_grad) const {
  const int n = num_labels_ - 1;
  if (mode_ == BoundaryMode::kFree) {
    // suffix[k] = sum_{i>=k} dL/db_i
    double suffix = 0.0;
    for (int k = n - 1; k >= 1; --k) {
      suffix += value_grad[k];
      raw_grad[k] += Sigmoid(raw_[k]) * suffix;
    }
    raw_grad[0] += suffix + value_grad[0];
    return;
  }
  const int start = (n % 2 == 1) ? n / 2 + 1 : n / 2;
  double suffix = 0.0;
  for (int k = n - 1; k >= start; --k) {
    suffix += value_grad[k] - value_grad[n - 1 - k];
    raw_grad[k - start] += Sigmoid(raw_[k - start]) * suffix;
  }
}

void BoundarySet::CheckOrdered() const { CheckStrictlyIncreasing(values_); }

}  // namespace pairrank
