// src/nn/checkpoint.cc

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

#include "fse/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fse/error.h"

namespace fse::nn {
namespace {

constexpr char kMagic[8] = {'F', 'S', 'E', 'C', 'K', 'P', 'T', '1'};

void AppendU64(std::string* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t ReadU64(std::string_view s, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
  return v;
}

void AppendDouble(std::string* out, double d) {
  AppendU64(out, std::bit_cast<std::uint64_t>(d));
}

}  // namespace

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(std::uint64_t h) {
  static const char* kHex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[i] = kHex[h & 0xf];
  return s;
}

Checkpoint Checkpoint::FromModule(std::string kind, nlohmann::json config,
                                  const Module& m) {
  Checkpoint c;
  c.kind = std::move(kind);
  c.config = std::move(config);
  for (auto& [name, t] : m.NamedParameters())
    c.tensors.emplace_back(name, t.Detach());
  return c;
}

void Checkpoint::LoadInto(Module& m) const {
  auto params = m.NamedParameters();
  if (params.size() != tensors.size())
    throw Error(ErrorKind::kConfigMismatch,
                "checkpoint '" + kind + "' has " + std::to_string(tensors.size()) +
                    " tensors, module expects " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, src] = tensors[i];
    auto& dst = params[i].second;
    if (name != params[i].first || src.shape() != dst.shape())
      throw Error(ErrorKind::kConfigMismatch,
                  "checkpoint tensor " + name + " " + ShapeString(src.shape()) +
                      " does not match " + params[i].first + " " +
                      ShapeString(dst.shape()));
    auto out = dst.mutable_data();
    std::copy(src.data().begin(), src.data().end(), out.begin());
  }
}

std::string Checkpoint::Serialize() const {
  nlohmann::json header;
  header["kind"] = kind;
  header["config"] = config;
  header["provenance"] = provenance;
  header["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    header["tensors"].push_back(
        {{"name", name}, {"shape", t.shape()}, {"dtype", "f64"}, {"offset", offset}});
    offset += t.numel() * 8;
  }
  const std::string head = header.dump();
  std::string out(kMagic, 8);
  AppendU64(&out, head.size());
  out += head;
  out.reserve(out.size() + offset);
  for (const auto& [name, t] : tensors)
    for (double d : t.data()) AppendDouble(&out, d);
  return out;
}

Checkpoint Checkpoint::Deserialize(std::string_view bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw Error(ErrorKind::kIo, "not a checkpoint archive");
  const std::uint64_t head_len = ReadU64(bytes, 8);
  if (16 + head_len > bytes.size()) throw Error(ErrorKind::kIo, "truncated checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, head_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kIo, std::string("bad checkpoint header: ") + e.what());
  }
  Checkpoint c;
  c.kind = header.at("kind").get<std::string>();
  c.config = header.at("config");
  c.provenance = header.value("provenance", nlohmann::json::object());
  const std::size_t base = 16 + head_len;
  for (const auto& entry : header.at("tensors")) {
    if (entry.at("dtype") != "f64") throw Error(ErrorKind::kIo, "unsupported dtype");
    Shape shape = entry.at("shape").get<Shape>();
    const std::size_t n = NumElements(shape);
    const std::size_t off = base + entry.at("offset").get<std::size_t>();
    if (off + n * 8 > bytes.size()) throw Error(ErrorKind::kIo, "truncated checkpoint data");
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i)
      data[i] = std::bit_cast<double>(ReadU64(bytes, off + 8 * i));
    c.tensors.emplace_back(entry.at("name").get<std::string>(),
                           Tensor::FromData(std::move(shape), std::move(data)));
  }
  return c;
}

void Checkpoint::Save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path);
  const std::string bytes = Serialize();
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::kIo, "short write to " + path);
}

Checkpoint Checkpoint::Load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return Deserialize(ss.str());
}

std::string Checkpoint::Hash() const { return HexDigest(Fnv1a64(Serialize())); }

std::string Checkpoint::WeightsHash() const {
  std::string buf;
  for (const auto& [name, t] : tensors) {
    buf += name;
    buf += ShapeString(t.shape());
    for (double d : t.data()) AppendDouble(&buf, d);
  }
  return HexDigest(Fnv1a64(buf));
}

}  // namespace fse::nn
