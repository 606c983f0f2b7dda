// include/fse/error.h

// Copyright 2026  The fse Authors

// See the LICENSE file at the repository root for clarification regarding
// multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef FSE_ERROR_H_
#define FSE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fse {

enum class ErrorKind {
  kDegenerateInput,
  kInvalidSignal,
  kShapeMismatch,
  kInvalidRate,
  kInvalidParameter,
  kRateMismatch,
  kInvalidMask,
  kNoData,
  kMissingDependency,
  kTypeMismatch,
  kUnsupportedRate,
  kInvalidFilter,
  kDuplicateHook,
  kConfigMismatch,
  kConfigError,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and tests) can branch on the category rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fse

#endif  // FSE_ERROR_H_
