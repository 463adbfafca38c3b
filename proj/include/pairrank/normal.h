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

#ifndef PAIRRANK_NORMAL_H_
#define PAIRRANK_NORMAL_H_

namespace pairrank {

// Standard normal density.
double NormalPdf(double z);

// Standard normal CDF, Phi(z). Accepts +-infinity.
double NormalCdf(double z);

// Upper tail 1 - Phi(z), computed without cancellation.
double NormalSf(double z);

// Phi(hi) - Phi(lo) for lo <= hi. Uses whichever tail keeps both terms
// small so that deep-tail buckets do not lose all significant digits.
double NormalMass(double lo, double hi);

}  // namespace pairrank

#endif  // PAIRRANK_NORMAL_H_
