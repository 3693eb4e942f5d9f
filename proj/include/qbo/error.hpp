// Copyright 2026 The qbo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qbo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QBO_DEFINE_ERROR(Name)            \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

QBO_DEFINE_ERROR(InvalidArgument);
QBO_DEFINE_ERROR(LengthMismatch);
QBO_DEFINE_ERROR(IndexOutOfRange);
QBO_DEFINE_ERROR(DuplicateRow);
QBO_DEFINE_ERROR(NumericalFailure);
QBO_DEFINE_ERROR(DegenerateTarget);
QBO_DEFINE_ERROR(InconsistentDimensions);
QBO_DEFINE_ERROR(TooLarge);
QBO_DEFINE_ERROR(InvalidSchedule);
QBO_DEFINE_ERROR(SpaceExhausted);
QBO_DEFINE_ERROR(InfeasiblePoint);
QBO_DEFINE_ERROR(MissingEntry);
QBO_DEFINE_ERROR(BudgetExceeded);
QBO_DEFINE_ERROR(InvalidDensity);
QBO_DEFINE_ERROR(SchemaError);
QBO_DEFINE_ERROR(IoError);
QBO_DEFINE_ERROR(ExternalSolverError);

// Raised when a driver-level accounting assertion fails; indicates a bug.
QBO_DEFINE_ERROR(InvariantViolation);

#undef QBO_DEFINE_ERROR

/// Config file problem, carrying the offending line (0 when not line-bound)
/// and field name.
class ConfigParseError : public Error {
 public:
  ConfigParseError(std::size_t line, std::string field, const std::string& what)
      : Error(format(line, field, what)), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(std::size_t line, const std::string& field, const std::string& what) {
    std::string msg = "config";
    if (line > 0) msg += ":" + std::to_string(line);
    if (!field.empty()) msg += ": field '" + field + "'";
    return msg + ": " + what;
  }

  std::size_t line_;
  std::string field_;
};

}  // namespace qbo
