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

#ifndef PAIRRANK_BOUNDARIES_H_
#define PAIRRANK_BOUNDARIES_H_

#include <span>
#include <string>
#include <vector>

namespace pairrank {

// How the raw boundary parameters map onto ordered boundaries.
enum class BoundaryMode {
  // raw = (b_0, r_1, ..., r_{K-2}); b_k = b_0 + sum_{m<=k} softplus(r_m).
  kFree,
  // Boundaries mirrored about zero: b_k = -b_{K-2-k}. Only the positive
  // half is stored, as softplus increments.
  kAntisymmetric,
};

std::string BoundaryModeName(BoundaryMode mode);
BoundaryMode ParseBoundaryMode(const std::string& name);

double Softplus(double x);
double InverseSoftplus(double y);
double Sigmoid(double x);

// Ordered decision boundaries b_0 < ... < b_{K-2} for K labels. Ordering is
// guaranteed by the parameterization: every gap is a softplus output.
class BoundarySet {
 public:
  BoundarySet() = default;

  // Builds the raw parameterization reproducing `values` exactly (up to
  // softplus round-off). Throws InvariantError unless strictly increasing,
  // and for kAntisymmetric unless the values are mirrored about zero.
  static BoundarySet FromValues(std::span<const double> values,
                                BoundaryMode mode = BoundaryMode::kFree);

  // Wraps already-raw parameters (e.g. read from a checkpoint).
  static BoundarySet FromRaw(int num_labels, BoundaryMode mode,
                             std::vector<double> raw);

  // Symmetric unit-spaced default: (-1.5,-0.5,0.5,1.5) for K=5, (0) for K=2.
  static BoundarySet Default(int num_labels,
                             BoundaryMode mode = BoundaryMode::kFree);

  int num_labels() const { return num_labels_; }
  BoundaryMode mode() const { return mode_; }

  // Derived boundary values, size K-1.
  const std::vector<double>& values() const { return values_; }

  std::span<double> mutable_raw() { return raw_; }
  std::span<const double> raw() const { return raw_; }

  // Recomputes values() after raw parameters were modified in place.
  void Refresh();

  // Chain rule from dL/db_k (size K-1) to dL/d raw, accumulated into
  // `raw_grad` (size raw().size()).
  void Backprop(std::span<const double> value_grad,
                std::span<double> raw_grad) const;

  // Throws InvariantError if the derived values are not strictly increasing.
  void CheckOrdered() const;

 private:
  int num_labels_ = 0;
  BoundaryMode mode_ = BoundaryMode::kFree;
  std::vector<double> raw_;
  std::vector<double> values_;
};

// Throws InvariantError unless `values` is non-empty and strictly increasing.
void CheckStrictlyIncreasing(std::span<const double> values);

}  // namespace pairrank

#endif  // PAIRRANK_BOUNDARIES_H_
