// Copyright 2026 STMC Authors
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

#ifndef STMC_LOSSES_H_
#define STMC_LOSSES_H_

#include <vector>

#include "stmc/ops.h"

namespace stmc {

// smoothL1(x) = 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise.
double smooth_l1(double x);

// Where the regression scale beta enters the loss.
//   kInsideSmooth: smoothL1(beta * error) — beta moves small normalized
//     errors across the quadratic/linear switch point.
//   kOutsideSmooth: beta * smoothL1(error) — a pure multiplier.
enum class BetaMode { kInsideSmooth, kOutsideSmooth };

// Keypoint regression loss (1 / (2TK)) * sum over frames, keypoints and the
// two axes. pred: [T,K,2] on the tape; truth: [T,K,2] with entries in [0,1].
template <typename T>
Var<T> smooth_l1_regression(Var<T> pred, const NdArray<T>& truth, T beta,
                            BetaMode mode = BetaMode::kInsideSmooth);

// L = ctc_inter + alpha * sum(ctc_intra) + regression. With alpha == 0 the
// intra losses are left out of the graph entirely, so they receive no
// gradient even though callers may still log their values.
template <typename T>
Var<T> joint_loss(Var<T> ctc_inter, const std::vector<Var<T>>& ctc_intra,
                  Var<T> regression, T alpha);

}  // namespace stmc

#endif  // STMC_LOSSES_H_
