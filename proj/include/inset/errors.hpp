// Copyright 2026 The INSET Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>

namespace inset {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kFormat = 3,
  kDependency = 4,
  kDivergence = 5,
};

/// Root of every error thrown by the library. The exit code tells the CLI
/// which class of failure it is reporting.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, ExitCode code = ExitCode::kInternal)
      : std::runtime_error(what), code_(code) {}

  ExitCode exit_code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Programming-contract violations (bad shapes, out-of-range ids, ...).
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(what, ExitCode::kUsage) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& what) : Error(what, ExitCode::kUsage) {}
};

class LengthError : public Error {
 public:
  explicit LengthError(const std::string& what) : Error(what, ExitCode::kUsage) {}
};

class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : Error(what, ExitCode::kUsage) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what)
      : Error(what, ExitCode::kUsage) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what, ExitCode::kUsage) {}
};

// File-format failures.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(what, ExitCode::kFormat) {}
};

class BadMagicError : public FormatError {
 public:
  explicit BadMagicError(const std::string& what) : FormatError(what) {}
};

class TruncationError : public FormatError {
 public:
  explicit TruncationError(const std::string& what) : FormatError(what) {}
};

class ChecksumError : public FormatError {
 public:
  explicit ChecksumError(const std::string& what) : FormatError(what) {}
};

class VocabMismatchError : public FormatError {
 public:
  explicit VocabMismatchError(const std::string& what) : FormatError(what) {}
};

// Missing inputs produced by an earlier pipeline stage.
class DependencyError : public Error {
 public:
  explicit DependencyError(const std::string& what)
      : Error(what, ExitCode::kDependency) {}
};

class MissingFeatureError : public DependencyError {
 public:
  explicit MissingFeatureError(const std::string& what)
      : DependencyError(what) {}
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what)
      : Error(what, ExitCode::kDivergence) {}
};

}  // namespace inset
