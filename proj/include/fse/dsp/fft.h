// include/fse/dsp/fft.h

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

#ifndef FSE_DSP_FFT_H_
#define FSE_DSP_FFT_H_

#include <complex>
#include <span>

namespace fse::dsp {

/// Forward real DFT of `in` (size N) into the N/2+1 non-negative bins of
/// `out`. X_k = sum_n x_n exp(-2 pi i k n / N).
void Rfft(std::span<const double> in, std::span<std::complex<double>> out);

/// Inverse of Rfft: x_n = (1/N) sum over the Hermitian-completed spectrum.
/// Imaginary parts of the DC and Nyquist bins are ignored.
void Irfft(std::span<const std::complex<double>> in, std::span<double> out);

/// Full complex DFT (forward when `inverse` is false; unnormalised).
void Cfft(std::span<const std::complex<double>> in,
          std::span<std::complex<double>> out, bool inverse);

}  // namespace fse::dsp

#endif  // FSE_DSP_FFT_H_
