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

#include "pairrank/normal.h"

#include <cmath>
#include <numbers>

namespace pairrank {

double NormalPdf(double z) {
  if (std::isinf(z)) return 0.0;
  return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi *
                                   std::numbers::sqrt2);
}

double NormalCdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double NormalSf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// Intervals centred right of zero use upper tails. Cdf(-x) and Sf(x) are
// the same expression, so mirrored intervals give bit-identical masses.
double NormalMass(double lo, double hi) {
  if (lo + hi > 0.0) return NormalSf(lo) - NormalSf(hi);
  return NormalCdf(hi) - NormalCdf(lo);
}

}  // namespace pairrank
