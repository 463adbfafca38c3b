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

#ifndef PAIRRANK_ERRORS_H_
#define PAIRRANK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pairrank {

// Base class for every error raised by the library. Subclasses map onto the
// failure categories callers are expected to distinguish (bad configuration,
// numeric breakdown, malformed data, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or degenerate distributions.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Arguments outside an operation's domain (empty inputs, bad sizes).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A structural invariant of a value was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent records (duplicates, bad labels, parse errors).
class DataError : public Error {
 public:
  using Error::Error;
};

// No valid pairing remains for a tournament group.
class ExhaustionError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

// An operation referred to something that timed out (e.g. a presentation).
class ExpiredError : public Error {
 public:
  using Error::Error;
};

// The caller is not allowed to act on the referenced object.
class AccessError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pairrank

#endif  // PAIRRANK_ERRORS_H_
