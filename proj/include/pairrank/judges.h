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

#ifndef PAIRRANK_JUDGES_H_
#define PAIRRANK_JUDGES_H_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace pairrank {

// A judge's personal boundary scale gamma = exp(log_gamma); judge r labels
// against boundaries b_k * gamma.
struct JudgeProfile {
  std::string judge_id;
  double log_gamma = 0.0;

  double gamma() const { return std::exp(log_gamma); }
};

// Dense table of judge profiles addressed by index, with id lookup.
class JudgeTable {
 public:
  JudgeTable() = default;

  // Adds a judge with gamma = 1 if absent; returns its index either way.
  std::size_t Add(const std::string& judge_id, double log_gamma = 0.0);

  // Throws LookupError for unknown ids.
  std::size_t IndexOf(const std::string& judge_id) const;
  std::optional<std::size_t> Find(const std::string& judge_id) const;

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::string& id(std::size_t index) const { return ids_[index]; }
  double log_gamma(std::size_t index) const { return log_gamma_[index]; }
  double gamma(std::size_t index) const { return std::exp(log_gamma_[index]); }
  JudgeProfile profile(std::size_t index) const {
    return {ids_[index], log_gamma_[index]};
  }

  std::span<double> mutable_log_gamma() { return log_gamma_; }
  std::span<const double> log_gamma() const { return log_gamma_; }

 private:
  std::vector<std::string> ids_;
  std::vector<double> log_gamma_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace pairrank

#endif  // PAIRRANK_JUDGES_H_
