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

#ifndef PAIRRANK_RANK_HEAD_H_
#define PAIRRANK_RANK_HEAD_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pairrank/rng.h"

namespace pairrank {

inline constexpr double kDefaultSigmaFloor = 1e-3;

// Latent score distribution of one item.
struct ScoreDistribution {
  double mu = 0.0;
  double sigma = kDefaultSigmaFloor;
};

// Row-major matrix of per-item feature vectors.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> mutable_row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }

  // Appends a row; the first row fixes the column count.
  void AppendRow(std::span<const double> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct HeadShape {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;  // trunk widths, e.g. {512, 256, 128}

  std::size_t NumParams() const;
  bool operator==(const HeadShape&) const = default;
};

// Per-layer inverted-dropout multipliers (0 or 1/(1-rate)) for the trunk.
// A pair shares one mask for both of its items.
struct DropoutMask {
  std::vector<std::vector<double>> layers;
};

DropoutMask DrawDropoutMask(const HeadShape& shape, double rate, Rng& rng);

// Activations kept by Forward for the backward pass.
struct ForwardCache {
  std::vector<std::vector<double>> pre;   // z^(n) per trunk layer
  std::vector<std::vector<double>> post;  // h^(n) after ReLU and mask
  double mu_pre = 0.0;
  double sigma_pre = 0.0;
};

// Shared-weight scoring network: ReLU trunk of fully connected layers
// followed by two scalar heads,
//   mu    = ReLU(w_mu . h + b_mu)
//   sigma = max(sigma_floor, ReLU(w_sigma . h + b_sigma)).
//
// All parameters live in one flat vector; layer l stores W_l as an
// (out x in) row-major block followed by b_l, then the mu head (w, b) and
// the sigma head (w, b).
class RankHead {
 public:
  RankHead() = default;
  RankHead(HeadShape shape, double sigma_floor = kDefaultSigmaFloor);

  const HeadShape& shape() const { return shape_; }
  double sigma_floor() const { return sigma_floor_; }
  std::size_t num_layers() const { return shape_.hidden.size(); }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  // Views into the flat parameter vector (or an equally shaped gradient).
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;
  std::size_t mu_offset() const;     // w_mu, then b_mu
  std::size_t sigma_offset() const;  // w_sigma, then b_sigma

  // Name of the parameter block containing flat index `i` ("W1", "b2",
  // "mu_head", ...), for diagnostics.
  std::string BlockName(std::size_t i) const;

  // Scores one item. `mask` may be null (evaluation mode). Throws
  // ConfigError on a dimension mismatch and NumericError naming the layer
  // when an activation is not finite.
  ScoreDistribution Forward(std::span<const double> features,
                            const DropoutMask* mask = nullptr,
                            ForwardCache* cache = nullptr) const;

  // Accumulates dL/dparams into `grad` (size NumParams) given the upstream
  // derivatives dL/dmu and dL/dsigma for one Forward call. ReLU and the
  // sigma floor have zero derivative at their kinks.
  void Backward(std::span<const double> features, const ForwardCache& cache,
                const DropoutMask* mask, double dmu, double dsigma,
                std::span<double> grad) const;

 private:
  HeadShape shape_;
  double sigma_floor_ = kDefaultSigmaFloor;
  std::vector<double> params_;
  std::vector<std::size_t> layer_offsets_;  // start of W_l for each layer
};

}  // namespace pairrank

#endif  // PAIRRANK_RANK_HEAD_H_
