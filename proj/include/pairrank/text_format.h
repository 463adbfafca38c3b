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

#ifndef PAIRRANK_TEXT_FORMAT_H_
#define PAIRRANK_TEXT_FORMAT_H_

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace pairrank {

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

std::string_view Trim(std::string_view text);
std::vector<std::string> Split(std::string_view text, char delimiter);
// Splits on runs of spaces or tabs.
std::vector<std::string> SplitWhitespace(std::string_view text);

// Strict parsers; `context` prefixes the DataError message.
double ParseDouble(std::string_view text, const std::string& context);
std::int64_t ParseInt(std::string_view text, const std::string& context);
bool ParseBool(std::string_view text, const std::string& context);

// Identifiers used in the text formats: non-empty, no separators.
bool IsValidId(std::string_view id);
void CheckId(std::string_view id, const std::string& context);

// Reads the first line and checks it is exactly `pragma` (e.g.
// "#pairrank-items v1"). Throws DataError naming `source` otherwise.
void ExpectPragma(std::istream& in, const std::string& pragma,
                  const std::string& source);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

// 64-bit FNV-1a; stable across platforms, used to derive per-item seeds.
std::uint64_t Fnv1a(std::string_view text);

}  // namespace pairrank

#endif  // PAIRRANK_TEXT_FORMAT_H_
