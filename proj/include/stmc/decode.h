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

#ifndef STMC_DECODE_H_
#define STMC_DECODE_H_

#include <vector>

#include "stmc/ndarray.h"

namespace stmc {

// Collapse of the per-step argmax path; per-step ties resolve to the lowest
// index (so fully uniform rows emit blank).
template <typename T>
std::vector<int> greedy_decode(const NdArray<T>& posteriors);

// CTC prefix beam search in log space with separate blank / non-blank
// probabilities per collapsed prefix. Per frame, only the top `beam_width`
// symbols are expanded, which makes beam_width == 1 coincide with the
// greedy decoder; with beam_width >= the number of reachable prefixes the
// search is exact. Final ties break lexicographically on the index sequence.
template <typename T>
std::vector<int> beam_search_decode(const NdArray<T>& posteriors, int beam_width);

}  // namespace stmc

#endif  // STMC_DECODE_H_
