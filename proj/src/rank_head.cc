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

#include "pairrank/rank_head.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pairrank/errors.h"

namespace pairrank {

void FeatureMatrix::AppendRow(std::span<const double> values) {
  if (rows_ == 0 && data_.empty()) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw ConfigError("feature dimension " + std::to_string(values.size()) +
                      " does not match " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

std::size_t HeadShape::NumParams() const {
  std::size_t n = 0;
  std::size_t in = input_dim;
  for (std::size_t width : hidden) {
    n += width * in + width;
    in = width;
  }
  return n + 2 * (in + 1);
}

DropoutMask DrawDropoutMask(const HeadShape& shape, double rate, Rng& rng) {
  DropoutMask mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t width : shape.hidden) {
    std::vector<double> layer(width);
    for (double& m : layer) m = rng.Uniform() < rate ? 0.0 : keep_scale;
    mask.layers.push_back(std::move(layer));
  }
  return mask;
}

RankHead::RankHead(HeadShape shape, double sigma_floor)
    : shape_(std::move(shape)), sigma_floor_(sigma_floor) {
  if (shape_.input_dim == 0) throw ConfigError("input dimension must be > 0");
  if (shape_.hidden.empty()) throw ConfigError("need at least one hidden layer");
  if (!(sigma_floor_ > 0.0)) throw ConfigError("sigma_floor must be > 0");
  std::size_t offset = 0;
  std::size_t in = shape_.input_dim;
  for (std::size_t width : shape_.hidden) {
    if (width == 0) throw ConfigError("hidden width must be > 0");
    layer_offsets_.push_back(offset);
    offset += width * in + width;
    in = width;
  }
  params_.assign(shape_.NumParams(), 0.0);
}

std::size_t RankHead::weight_offset(std::size_t layer) const {
  return layer_offsets_[layer];
}

std::size_t RankHead::bias_offset(std::size_t layer) const {
  const std::size_t in = layer == 0 ? shape_.input_dim : shape_.hidden[layer - 1];
  return layer_offsets_[layer] + shape_.hidden[layer] * in;
}

std::size_t RankHead::mu_offset() const {
  const std::size_t last = num_layers() - 1;
  return bias_offset(last) + shape_.hidden[last];
}

std::size_t RankHead::sigma_offset() const {
  return mu_offset() + shape_.hidden.back() + 1;
}

std::string RankHead::BlockName(std::size_t i) const {
  if (i >= sigma_offset()) return "sigma_head";
  if (i >= mu_offset()) return "mu_head";
  for (std::size_t l = num_layers(); l-- > 0;) {
    if (i >= bias_offset(l)) return "b" + std::to_string(l + 1);
    if (i >= weight_offset(l)) return "W" + std::to_string(l + 1);
  }
  return "?";
}

ScoreDistribution RankHead::Forward(std::span<const double> features,
                                    const DropoutMask* mask,
                                    ForwardCache* cache) const {
  if (features.size() != shape_.input_dim) {
    throw ConfigError("feature dimension " + std::to_string(features.size()) +
                      " does not match model dimension " +
                      std::to_string(shape_.input_dim));
  }
  ForwardCache local;
  ForwardCache& c = cache != nullptr ? *cache : local;
  c.pre.resize(num_layers());
  c.post.resize(num_layers());

  std::span<const double> in = features;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::size_t width = shape_.hidden[l];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    std::vector<double>& z = c.pre[l];
    std::vector<double>& h = c.post[l];
    z.resize(width);
    h.resize(width);
    for (std::size_t o = 0; o < width; ++o) {
      double acc = b[o];
      const double* row = w + o * in.size();
      for (std::size_t i = 0; i < in.size(); ++i) acc += row[i] * in[i];
      if (!std::isfinite(acc)) {
        throw NumericError("non-finite activation in layer " +
                           std::to_string(l + 1));
      }
      z[o] = acc;
      double a = acc > 0.0 ? acc : 0.0;
      if (mask != nullptr) a *= mask->layers[l][o];
      h[o] = a;
    }
    in = h;
  }

  const double* wm = params_.data() + mu_offset();
  const double* ws = params_.data() + sigma_offset();
  const std::size_t last = in.size();
  double zm = wm[last];
  double zs = ws[last];
  for (std::size_t i = 0; i < last; ++i) {
    zm += wm[i] * in[i];
    zs += ws[i] * in[i];
  }
  if (!std::isfinite(zm)) throw NumericError("non-finite activation in mu head");
  if (!std::isfinite(zs)) {
    throw NumericError("non-finite activation in sigma head");
  }
  c.mu_pre = zm;
  c.sigma_pre = zs;
  return {zm > 0.0 ? zm : 0.0, std::max(sigma_floor_, zs > 0.0 ? zs : 0.0)};
}

void RankHead::Backward(std::span<const double> features,
                        const ForwardCache& cache, const DropoutMask* mask,
                        double dmu, double dsigma,
                        std::span<double> grad) const {
  const double dzm = cache.mu_pre > 0.0 ? dmu : 0.0;
  const double dzs = cache.sigma_pre > sigma_floor_ ? dsigma : 0.0;
  if (dzm == 0.0 && dzs == 0.0) return;

  const std::size_t last_layer = num_layers() - 1;
  const std::vector<double>& h_last = cache.post[last_layer];
  const std::size_t width_last = h_last.size();
  const double* wm = params_.data() + mu_offset();
  const double* ws = params_.data() + sigma_offset();
  double* gm = grad.data() + mu_offset();
  double* gs = grad.data() + sigma_offset();

  std::vector<double> dh(width_last);
  for (std::size_t i = 0; i < width_last; ++i) {
    gm[i] += dzm * h_last[i];
    gs[i] += dzs * h_last[i];
    dh[i] = dzm * wm[i] + dzs * ws[i];
  }
  gm[width_last] += dzm;
  gs[width_last] += dzs;

  std::vector<double> dz;
  std::vector<double> dh_prev;
  for (std::size_t l = num_layers(); l-- > 0;) {
    const std::size_t width = shape_.hidden[l];
    std::span<const double> in =
        l == 0 ? features : std::span<const double>(cache.post[l - 1]);
    dz.assign(width, 0.0);
    for (std::size_t o = 0; o < width; ++o) {
      if (cache.pre[l][o] <= 0.0) continue;
      dz[o] = mask != nullptr ? dh[o] * mask->layers[l][o] : dh[o];
    }
    const double* w = params_.data() + weight_offset(l);
    double* gw = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    const bool need_input_grad = l > 0;
    if (need_input_grad) dh_prev.assign(in.size(), 0.0);
    for (std::size_t o = 0; o < width; ++o) {
      const double d = dz[o];
      if (d == 0.0) continue;
      gb[o] += d;
      double* grow = gw + o * in.size();
      const double* wrow = w + o * in.size();
      for (std::size_t i = 0; i < in.size(); ++i) grow[i] += d * in[i];
      if (need_input_grad) {
        for (std::size_t i = 0; i < in.size(); ++i) dh_prev[i] += d * wrow[i];
      }
    }
    if (need_input_grad) dh.swap(dh_prev);
  }
}

}  // namespace pairrank
