// src/dsp/resample.cc

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

#include "fse/dsp/resample.h"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include "fse/error.h"

namespace fse {
namespace {

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double Kaiser(double r, double beta) {
  // r in [-1, 1]
  if (std::abs(r) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) /
         std::cyl_bessel_i(0.0, beta);
}

std::shared_ptr<const Resampler> CachedResampler(int from, int to) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const Resampler>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{from, to}];
  if (!slot) slot = std::make_shared<const Resampler>(from, to);
  return slot;
}

}  // namespace

Resampler::Resampler(int source_rate, int target_rate)
    : source_rate_(source_rate), target_rate_(target_rate) {
  if (source_rate <= 0 || target_rate <= 0)
    throw Error(ErrorKind::kInvalidRate, "resample: rates must be positive");
  const long g = std::gcd(source_rate, target_rate);
  up_ = target_rate / g;
  down_ = source_rate / g;
  // Cutoff in cycles per input sample, relative to the input Nyquist.
  const double scale =
      std::min(1.0, static_cast<double>(up_) / static_cast<double>(down_));
  const double cutoff = scale * kRolloff;
  const double half_width = kZeroCrossings / cutoff;  // in input samples
  half_taps_ = static_cast<long>(std::ceil(half_width)) + 1;
  const long width = 2 * half_taps_ + 1;
  table_.assign(up_ * width, 0.0);
  for (long phase = 0; phase < up_; ++phase) {
    const double frac = static_cast<double>(phase) / static_cast<double>(up_);
    for (long j = -half_taps_; j <= half_taps_; ++j) {
      const double tau = frac - static_cast<double>(j);
      table_[phase * width + (j + half_taps_)] =
          cutoff * Sinc(cutoff * tau) * Kaiser(tau / half_width, kKaiserBeta);
    }
  }
}

std::size_t Resampler::OutputLength(std::size_t n) const {
  // round(n * L / M) in integer arithmetic, half away from zero.
  const auto num = static_cast<unsigned long long>(n) * up_;
  return static_cast<std::size_t>((2 * num + down_) / (2 * down_));
}

std::vector<double> Resampler::Process(const std::vector<double>& x) const {
  const std::size_t n_out = OutputLength(x.size());
  std::vector<double> y(n_out, 0.0);
  const long width = 2 * half_taps_ + 1;
  const auto n_in = static_cast<long>(x.size());
  for (std::size_t i = 0; i < n_out; ++i) {
    const unsigned long long num = static_cast<unsigned long long>(i) * down_;
    const auto base = static_cast<long>(num / up_);
    const auto phase = static_cast<long>(num % up_);
    const double* taps = table_.data() + phase * width;
    const long j_lo = std::max(-half_taps_, -base);
    const long j_hi = std::min(half_taps_, n_in - 1 - base);
    double acc = 0.0;
    for (long j = j_lo; j <= j_hi; ++j)
      acc += x[base + j] * taps[j + half_taps_];
    y[i] = acc;
  }
  return y;
}

AudioBuffer Resample(const AudioBuffer& x, int target_rate) {
  if (target_rate <= 0)
    throw Error(ErrorKind::kInvalidRate, "resample: target rate must be > 0");
  if (x.sample_rate <= 0)
    throw Error(ErrorKind::kInvalidRate, "resample: source rate must be > 0");
  if (target_rate == x.sample_rate) return x;
  const auto r = CachedResampler(x.sample_rate, target_rate);
  return AudioBuffer(r->Process(x.samples), target_rate);
}

}  // namespace fse
