// Copyright 2026 The closedie Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLOSEDIE_ERRORS_H_
#define CLOSEDIE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace closedie {

// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input record. Carries the 1-based line number when known.
class LoadError : public Error {
 public:
  LoadError(const std::string &source, size_t line, const std::string &what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  explicit LoadError(const std::string &what) : Error(what), line_(0) {}

  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Duplicate identifiers or dangling references in the knowledge base.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// A triple, label or id that cannot be resolved against the KB.
class ResolveError : public Error {
 public:
  using Error::Error;
};

// Token not permitted by the constrained decoding state machine.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

// Beam search ran out of hypotheses before any finished.
class DecodeFailure : public Error {
 public:
  using Error::Error;
};

// Failure talking to an external scorer process or socket.
class ScorerError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value (threshold, ratios, weights).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace closedie

#endif  // CLOSEDIE_ERRORS_H_
