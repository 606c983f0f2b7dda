// include/fse/nn/train.h

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

#ifndef FSE_NN_TRAIN_H_
#define FSE_NN_TRAIN_H_

#include <cstdint>
#include <string>

#include "fse/nn/checkpoint.h"
#include "fse/nn/metrics_log.h"

namespace fse::nn {

/// Weighted total plus each unweighted term, in logging order.
struct LossBreakdown {
  Tensor total;
  MetricsLog::Record terms;
  /// Errors: InvalidParameter for an unknown term.
  double Term(const std::string& name) const;
};

struct TrainOptions {
  long steps = 100;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  /// Stop once the tracked loss falls below this fraction of its first
  /// value; 0 trains for the full step budget.
  double stop_ratio = 0.0;
  double max_grad_norm = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;
  MetricsLog log;
  long steps_run = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  /// Lowest tracked loss over the run.
  double best_loss = 0.0;
};

}  // namespace fse::nn

#endif  // FSE_NN_TRAIN_H_
