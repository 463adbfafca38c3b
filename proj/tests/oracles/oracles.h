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

// Independent reference implementations used by the tests. Each one is
// written for clarity over speed and shares no code with the library.

#ifndef PAIRRANK_TESTS_ORACLES_ORACLES_H_
#define PAIRRANK_TESTS_ORACLES_ORACLES_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace oracle {

// Standard normal CDF by composite Simpson quadrature of the density on
// [0, |z|]. Absolute error is below 1e-13 for |z| <= 10.
inline double Phi(double z) {
  const double a = std::min(std::fabs(z), 12.0);
  if (a == 0.0) return 0.5;
  const int n = 8000;  // even
  const double h = a / n;
  auto f = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
  long double sum = f(0.0) + f(a);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0L : 2.0L) * f(i * h);
  const double half = static_cast<double>(sum * h / 3.0L);
  return z >= 0 ? 0.5 + half : 0.5 - half;
}

inline std::vector<double> LabelProbs(double delta_mu, double delta_var,
                                      const std::vector<double>& bounds) {
  const double s = std::sqrt(delta_var);
  std::vector<double> cdf = {0.0};
  for (double b : bounds) cdf.push_back(Phi((b - delta_mu) / s));
  cdf.push_back(1.0);
  std::vector<double> p;
  for (std::size_t j = 0; j + 1 < cdf.size(); ++j) p.push_back(cdf[j + 1] - cdf[j]);
  return p;
}

// Forward pass over the documented flat layout: for each layer W (out x in,
// row-major) then b; then mu head (w, b) and sigma head (w, b).
struct Scores {
  double mu;
  double sigma;
};
inline Scores Forward(const std::vector<double>& params, std::size_t input_dim,
                      const std::vector<std::size_t>& hidden,
                      const std::vector<double>& x, double sigma_floor,
                      const std::vector<std::vector<double>>* keep = nullptr,
                      double keep_scale = 1.0) {
  std::size_t k = 0;
  std::vector<double> h = x;
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    const std::size_t out = hidden[l];
    std::vector<std::vector<double>> w(out, std::vector<double>(in));
    for (std::size_t r = 0; r < out; ++r)
      for (std::size_t c = 0; c < in; ++c) w[r][c] = params[k++];
    std::vector<double> next(out);
    for (std::size_t r = 0; r < out; ++r) {
      double z = 0.0;
      for (std::size_t c = 0; c < in; ++c) z += w[r][c] * h[c];
      z += params[k + r];
      next[r] = z > 0.0 ? z : 0.0;
      if (keep != nullptr) next[r] *= (*keep)[l][r] * keep_scale;
    }
    k += out;
    h = next;
    in = out;
  }
  double zm = 0.0;
  for (std::size_t c = 0; c < in; ++c) zm += params[k + c] * h[c];
  zm += params[k + in];
  k += in + 1;
  double zs = 0.0;
  for (std::size_t c = 0; c < in; ++c) zs += params[k + c] * h[c];
  zs += params[k + in];
  return {zm > 0.0 ? zm : 0.0, std::max(sigma_floor, zs > 0.0 ? zs : 0.0)};
}

// All (bye, partner-array) matchings of `count` positions under `ok`.
// Chooses what the documented pairing rule selects: the latest feasible
// bye, then the lexicographically smallest partner array.
struct Match {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::optional<std::size_t> bye;
};

inline void EnumerateMatchings(std::vector<int>& partner, std::size_t count,
                               const std::function<bool(std::size_t, std::size_t)>& ok,
                               std::vector<std::vector<int>>& out) {
  std::size_t first = count;
  for (std::size_t i = 0; i < count; ++i) {
    if (partner[i] == -1) {
      first = i;
      break;
    }
  }
  if (first == count) {
    out.push_back(partner);
    return;
  }
  for (std::size_t j = first + 1; j < count; ++j) {
    if (partner[j] != -1 || !ok(first, j)) continue;
    partner[first] = static_cast<int>(j);
    partner[j] = static_cast<int>(first);
    EnumerateMatchings(partner, count, ok, out);
    partner[first] = -1;
    partner[j] = -1;
  }
}

inline std::optional<Match> BruteMatch(
    std::size_t count, const std::function<bool(std::size_t, std::size_t)>& ok) {
  std::vector<std::size_t> byes;
  if (count % 2 == 1) {
    for (std::size_t b = count; b-- > 0;) byes.push_back(b);
  } else {
    byes.push_back(count);  // sentinel: no bye
  }
  for (std::size_t bye : byes) {
    std::vector<int> partner(count, -1);
    if (bye < count) partner[bye] = static_cast<int>(bye);
    std::vector<std::vector<int>> all;
    EnumerateMatchings(partner, count, ok, all);
    if (all.empty()) continue;
    const std::vector<int>& best = *std::min_element(all.begin(), all.end());
    Match m;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = static_cast<std::size_t>(best[i]);
      if (j > i) m.pairs.emplace_back(i, j);
    }
    if (bye < count) m.bye = bye;
    return m;
  }
  return std::nullopt;
}

// Whether a (near-)perfect matching exists; plain backtracking.
inline bool CanMatch(std::vector<bool>& taken, std::size_t count, int byes_left,
                     const std::function<bool(std::size_t, std::size_t)>& ok) {
  std::size_t first = count;
  for (std::size_t i = 0; i < count; ++i) {
    if (!taken[i]) {
      first = i;
      break;
    }
  }
  if (first == count) return true;
  taken[first] = true;
  if (byes_left > 0 && CanMatch(taken, count, byes_left - 1, ok)) {
    taken[first] = false;
    return true;
  }
  for (std::size_t j = first + 1; j < count; ++j) {
    if (taken[j] || !ok(first, j)) continue;
    taken[j] = true;
    const bool found = CanMatch(taken, count, byes_left, ok);
    taken[j] = false;
    if (found) {
      taken[first] = false;
      return true;
    }
  }
  taken[first] = false;
  return false;
}

inline bool CanMatch(std::size_t count,
                     const std::function<bool(std::size_t, std::size_t)>& ok) {
  std::vector<bool> taken(count, false);
  return CanMatch(taken, count, static_cast<int>(count % 2), ok);
}

// Majority label by explicit scan; ties to the lowest label.
inline int ArgmaxLabel(const std::array<int, 5>& counts) {
  int best = 0;
  for (int j = 1; j < 5; ++j) {
    if (counts[j] > counts[best]) best = j;
  }
  return best;
}

inline double FiveWayRecount(const std::vector<int>& predicted,
                             const std::vector<std::array<int, 5>>& truth) {
  int hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == ArgmaxLabel(truth[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

inline int ToBinary(int label) { return label >= 3 ? 1 : 0; }

// Average 1-based ranks in O(n^2).
inline std::vector<double> Ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0;
    double equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

inline double Spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::vector<double> rx = Ranks(x);
  const std::vector<double> ry = Ranks(y);
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Upper 0.1% points of the chi-square distribution, df = 1..6.
inline double ChiSquare999(int df) {
  static const double kTable[] = {10.828, 13.816, 16.266, 18.467, 20.515, 22.458};
  return kTable[df - 1];
}

// Pearson statistic with bins of expected count < 5 merged into their
// neighbour. Returns (statistic, degrees of freedom).
inline std::pair<double, int> ChiSquare(const std::vector<long>& observed,
                                        const std::vector<double>& probs,
                                        long total) {
  std::vector<double> exp_bins;
  std::vector<double> obs_bins;
  double e_acc = 0, o_acc = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    e_acc += probs[j] * total;
    o_acc += observed[j];
    if (e_acc >= 5.0) {
      exp_bins.push_back(e_acc);
      obs_bins.push_back(o_acc);
      e_acc = o_acc = 0;
    }
  }
  if (e_acc > 0 || o_acc > 0) {
    if (exp_bins.empty()) {
      exp_bins.push_back(e_acc);
      obs_bins.push_back(o_acc);
    } else {
      exp_bins.back() += e_acc;
      obs_bins.back() += o_acc;
    }
  }
  double stat = 0;
  for (std::size_t i = 0; i < exp_bins.size(); ++i) {
    const double d = obs_bins[i] - exp_bins[i];
    stat += d * d / exp_bins[i];
  }
  return {stat, static_cast<int>(exp_bins.size()) - 1};
}

}  // namespace oracle

#endif  // PAIRRANK_TESTS_ORACLES_ORACLES_H_
