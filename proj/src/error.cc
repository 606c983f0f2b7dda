// src/error.cc

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

#include "fse/error.h"

namespace fse {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateInput: return "DegenerateInput";
    case ErrorKind::kInvalidSignal: return "InvalidSignal";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kInvalidRate: return "InvalidRate";
    case ErrorKind::kInvalidParameter: return "InvalidParameter";
    case ErrorKind::kRateMismatch: return "RateMismatch";
    case ErrorKind::kInvalidMask: return "InvalidMask";
    case ErrorKind::kNoData: return "NoData";
    case ErrorKind::kMissingDependency: return "MissingDependency";
    case ErrorKind::kTypeMismatch: return "TypeMismatch";
    case ErrorKind::kUnsupportedRate: return "UnsupportedRate";
    case ErrorKind::kInvalidFilter: return "InvalidFilter";
    case ErrorKind::kDuplicateHook: return "DuplicateHook";
    case ErrorKind::kConfigMismatch: return "ConfigMismatch";
    case ErrorKind::kConfigError: return "ConfigError";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace fse
