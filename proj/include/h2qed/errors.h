// Copyright 2026 The h2qed Authors
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

#ifndef H2QED_ERRORS_H
#define H2QED_ERRORS_H

#include <cstddef>
#include <stdexcept>
#include <string>

namespace h2qed {

/// Base of every error raised by the library. The CLI maps the subclasses
/// onto distinct exit codes.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Qubit count outside the supported range.
class SizeError : public Error {
   public:
    using Error::Error;
};

/// Invalid or duplicate gate / channel target.
class TargetError : public Error {
   public:
    using Error::Error;
};

/// Probability vector that is not normalizable or has negative mass.
class ProbabilityError : public Error {
   public:
    using Error::Error;
};

/// Malformed bit width, length mismatch or incompatible grids.
class FormatError : public Error {
   public:
    using Error::Error;
};

/// Measurement basis change requested twice.
class BasisError : public Error {
   public:
    using Error::Error;
};

/// Measured spectrum has mass where the response model allows none.
class SupportError : public Error {
   public:
    using Error::Error;
};

/// Every shot of a postselected histogram was discarded.
class EmptyBranchError : public Error {
   public:
    using Error::Error;
};

/// Unreadable or malformed input file. `line` is 1-based, 0 when unknown.
class IngestionError : public Error {
   public:
    IngestionError(const std::string &file, std::size_t line, const std::string &what)
        : Error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {
    }
    std::size_t line() const {
        return line_;
    }

   private:
    std::size_t line_;
};

/// Invalid command-line flag combination.
class UsageError : public Error {
   public:
    using Error::Error;
};

}  // namespace h2qed

#endif  // H2QED_ERRORS_H
