// Copyright 2026 The vflattack Authors
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

#ifndef VFL_ERRORS_H_
#define VFL_ERRORS_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace vfl {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf produced, or an iterative routine failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Caller supplied an invalid argument (empty data, bad fraction, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV or JSON input. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A model of the wrong family was handed to an attack, e.g. a random forest
// passed straight to the generative attack without distillation.
class ModelKindError : public Error {
 public:
  using Error::Error;
};

// The attack has nothing to work with for this sample (no candidate path).
class AttackInfeasibleError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration failed validation; carries every problem found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(Join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string Join(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration:";
    for (const auto& p : problems) out += "\n  - " + p;
    return out;
  }
  std::vector<std::string> problems_;
};

}  // namespace vfl

#endif  // VFL_ERRORS_H_
