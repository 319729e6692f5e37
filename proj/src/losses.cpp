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

#include "stmc/losses.h"

#include <cmath>

namespace stmc {

double smooth_l1(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

namespace {

inline double smooth_l1_slope(double x) {
  if (x > 1.0) return 1.0;
  if (x < -1.0) return -1.0;
  return x;
}

}  // namespace

template <typename T>
Var<T> smooth_l1_regression(Var<T> pred, const NdArray<T>& truth, T beta, BetaMode mode) {
  const NdArray<T>& pv = pred.value();
  STMC_CHECK_SHAPE(pv.same_shape(truth), "smooth_l1_regression: prediction "
                                             << shape_string(pv.shape()) << " vs truth "
                                             << shape_string(truth.shape()));
  STMC_CHECK_SHAPE(pv.rank() >= 1 && pv.dim(-1) == 2,
                   "smooth_l1_regression: trailing extent must be 2 (x,y)");
  for (std::int64_t i = 0; i < truth.size(); ++i)
    STMC_CHECK(truth[i] >= T(0) && truth[i] <= T(1),
               "smooth_l1_regression: truth coordinate " << truth[i] << " outside [0,1]");
  // 1/(2TK): half the number of (x,y) pairs
  const double norm = 1.0 / static_cast<double>(pv.size());
  const double b = static_cast<double>(beta);

  double acc = 0.0;
  for (std::int64_t i = 0; i < pv.size(); ++i) {
    const double e = static_cast<double>(pv[i]) - static_cast<double>(truth[i]);
    acc += mode == BetaMode::kInsideSmooth ? smooth_l1(b * e) : b * smooth_l1(e);
  }
  NdArray<T> out({1});
  out[0] = static_cast<T>(acc * norm);

  NdArray<T> truth_copy = truth;
  auto backward = [truth_copy = std::move(truth_copy), b, norm, mode](Tape<T>& tape,
                                                                      int id) {
    auto& n = tape.node(id);
    const int p = n.parents[0];
    if (!tape.needs_grad(p)) return;
    const NdArray<T>& pv = tape.value(p);
    NdArray<T>& gin = tape.grad(p);
    const double gscale = static_cast<double>(n.grad[0]) * norm;
    for (std::int64_t i = 0; i < pv.size(); ++i) {
      const double e = static_cast<double>(pv[i]) - static_cast<double>(truth_copy[i]);
      const double slope = mode == BetaMode::kInsideSmooth
                               ? b * smooth_l1_slope(b * e)
                               : b * smooth_l1_slope(e);
      gin[i] += static_cast<T>(gscale * slope);
    }
  };
  return pred.tape->emplace(std::move(out), {pred.id}, backward, "smooth_l1_regression");
}

template <typename T>
Var<T> joint_loss(Var<T> ctc_inter, const std::vector<Var<T>>& ctc_intra,
                  Var<T> regression, T alpha) {
  STMC_CHECK(alpha >= T(0), "joint_loss: alpha must be non-negative");
  Var<T> total = add(ctc_inter, regression);
  if (alpha > T(0) && !ctc_intra.empty()) {
    Var<T> aux = ctc_intra[0];
    for (size_t i = 1; i < ctc_intra.size(); ++i) aux = add(aux, ctc_intra[i]);
    total = add(total, scale(aux, alpha));
  }
  return total;
}

#define STMC_INSTANTIATE_LOSSES(T)                                                 \
  template Var<T> smooth_l1_regression(Var<T>, const NdArray<T>&, T, BetaMode);    \
  template Var<T> joint_loss(Var<T>, const std::vector<Var<T>>&, Var<T>, T);

STMC_INSTANTIATE_LOSSES(float)
STMC_INSTANTIATE_LOSSES(double)

}  // namespace stmc
