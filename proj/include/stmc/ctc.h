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

#ifndef STMC_CTC_H_
#define STMC_CTC_H_

#include <vector>

#include "stmc/ops.h"

namespace stmc {

// Log-domain floor standing in for log(0).
constexpr double kLogZero = -1e30;

// log(exp(a) + exp(b)) without overflow.
double log_sum_exp(double a, double b);

// Collapse operator: merge adjacent duplicates, then drop blanks.
std::vector<int> ctc_collapse(const std::vector<int>& path, int blank = 0);

// Number of adjacent equal pairs in a target; the minimum path length for a
// target is len + that count.
int ctc_min_input_length(const std::vector<int>& target);

// True iff a length-t_len path collapsing to `target` exists.
bool ctc_admissible(const std::vector<int>& target, int t_len);

// Negative log likelihood -ln p(target | posteriors) via the forward-
// backward recursion over the blank-interleaved state sequence, computed in
// log space (doubles internally). posteriors: [T',|V|] row-stochastic with
// blank at column 0; target: gloss indices >= 1.
// Differentiable w.r.t. the posteriors; composed with row_softmax the logit
// gradient is the standard analytic CTC gradient.
// Inadmissible targets are rejected with an error, never NaN.
template <typename T>
Var<T> ctc_loss(Var<T> posteriors, const std::vector<int>& target);

// Loss evaluation without a tape (decode-time diagnostics, oracles).
template <typename T>
double ctc_loss_value(const NdArray<T>& posteriors, const std::vector<int>& target);

// Total path likelihood computed at every cut point t from the alpha/beta
// lattices; all entries agree up to rounding for a correct recursion.
template <typename T>
std::vector<double> ctc_cut_likelihoods(const NdArray<T>& posteriors,
                                        const std::vector<int>& target);

// Exhaustive-path oracle for p(target | posteriors): enumerates all |V|^T'
// alignment paths and sums the probability of those collapsing to target.
// Rejects instances with |V|^T' > 10^7.
template <typename T>
double ctc_brute_force(const NdArray<T>& posteriors, const std::vector<int>& target);

}  // namespace stmc

#endif  // STMC_CTC_H_
