// src/dsp/fft.cc

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

#include "fse/dsp/fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "fse/error.h"

namespace fse::dsp {
namespace {

enum class PlanKind { kR2C, kC2R, kC2CForward, kC2CBackward };

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per (kind, size) and shared.
class PlanCache {
 public:
  static PlanCache& Instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan Get(PlanKind kind, int n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(kind, n);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<double> re(n + 2);
    std::vector<fftw_complex> cx(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = nullptr;
    switch (kind) {
      case PlanKind::kR2C:
        p = fftw_plan_dft_r2c_1d(n, re.data(), cx.data(), flags);
        break;
      case PlanKind::kC2R:
        p = fftw_plan_dft_c2r_1d(n, cx.data(), re.data(), flags);
        break;
      case PlanKind::kC2CForward:
      case PlanKind::kC2CBackward: {
        std::vector<fftw_complex> cy(n);
        p = fftw_plan_dft_1d(n, cx.data(), cy.data(),
                             kind == PlanKind::kC2CForward ? FFTW_FORWARD
                                                           : FFTW_BACKWARD,
                             flags);
        break;
      }
    }
    if (p == nullptr) throw Error(ErrorKind::kConfigError, "fftw plan failed");
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<PlanKind, int>, fftw_plan> plans_;
};

}  // namespace

void Rfft(std::span<const double> in, std::span<std::complex<double>> out) {
  const int n = static_cast<int>(in.size());
  if (n <= 0 || out.size() != static_cast<std::size_t>(n / 2 + 1))
    throw Error(ErrorKind::kShapeMismatch, "rfft size");
  fftw_plan p = PlanCache::Instance().Get(PlanKind::kR2C, n);
  // r2c does not modify its input but the API takes a non-const pointer.
  fftw_execute_dft_r2c(p, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void Irfft(std::span<const std::complex<double>> in, std::span<double> out) {
  const int n = static_cast<int>(out.size());
  if (n <= 0 || in.size() != static_cast<std::size_t>(n / 2 + 1))
    throw Error(ErrorKind::kShapeMismatch, "irfft size");
  fftw_plan p = PlanCache::Instance().Get(PlanKind::kC2R, n);
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / n;
  for (double& v : out) v *= scale;
}

void Cfft(std::span<const std::complex<double>> in,
          std::span<std::complex<double>> out, bool inverse) {
  const int n = static_cast<int>(in.size());
  if (n <= 0 || out.size() != in.size())
    throw Error(ErrorKind::kShapeMismatch, "cfft size");
  fftw_plan p = PlanCache::Instance().Get(
      inverse ? PlanKind::kC2CBackward : PlanKind::kC2CForward, n);
  fftw_execute_dft(p,
                   reinterpret_cast<fftw_complex*>(
                       const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace fse::dsp
