// include/fse/nn/checkpoint.h

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

#ifndef FSE_NN_CHECKPOINT_H_
#define FSE_NN_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "fse/nn/module.h"
#include "json.hpp"

namespace fse::nn {

std::uint64_t Fnv1a64(std::string_view bytes);
std::string HexDigest(std::uint64_t h);

/// Named tensors plus a config block and provenance hashes, stored as
///   "FSECKPT1" | u64 header length | JSON header | little-endian f64 data.
/// The header lists name, shape, dtype and byte offset for each tensor.
struct Checkpoint {
  std::string kind;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json provenance = nlohmann::json::object();
  NamedTensors tensors;

  static Checkpoint FromModule(std::string kind, nlohmann::json config,
                               const Module& m);
  /// Throws ConfigMismatch when names or shapes disagree with `m`.
  void LoadInto(Module& m) const;

  std::string Serialize() const;
  static Checkpoint Deserialize(std::string_view bytes);
  void Save(const std::string& path) const;
  static Checkpoint Load(const std::string& path);

  /// FNV-1a digest of the serialized archive.
  std::string Hash() const;
  /// Digest over tensor names, shapes and values only.
  std::string WeightsHash() const;
};

}  // namespace fse::nn

#endif  // FSE_NN_CHECKPOINT_H_
