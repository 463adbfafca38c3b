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

#include "pairrank/judges.h"

#include "pairrank/errors.h"

namespace pairrank {

std::size_t JudgeTable::Add(const std::string& judge_id, double log_gamma) {
  if (auto it = index_.find(judge_id); it != index_.end()) return it->second;
  const std::size_t index = ids_.size();
  ids_.push_back(judge_id);
  log_gamma_.push_back(log_gamma);
  index_.emplace(judge_id, index);
  return index;
}

std::optional<std::size_t> JudgeTable::Find(const std::string& judge_id) const {
  if (auto it = index_.find(judge_id); it != index_.end()) return it->second;
  return std::nullopt;
}

std::size_t JudgeTable::IndexOf(const std::string& judge_id) const {
  if (auto found = Find(judge_id)) return *found;
  throw LookupError("unknown judge id '" + judge_id + "'");
}

}  // namespace pairrank
