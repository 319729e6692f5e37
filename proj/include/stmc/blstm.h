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

#ifndef STMC_BLSTM_H_
#define STMC_BLSTM_H_

#include <string>

#include "stmc/ops.h"
#include "stmc/params.h"

namespace stmc {

// Bidirectional LSTM encoder with a projection to vocabulary logits.
// Standard four-gate cell (sigmoid input/forget/output gates, tanh
// candidate), zero initial states, forward and backward hidden states
// concatenated per step before the projection.
template <typename T>
class BlstmEncoder {
 public:
  // output_width is the concatenated hidden width (2x per-direction hidden).
  // share_directions reuses one cell for both directions (symmetry probes).
  BlstmEncoder(ParameterStore<T>& store, const std::string& prefix, int input_width,
               int output_width, int vocab_size, bool share_directions = false);

  // [T',C] -> [T',|V|] logits / row-stochastic posteriors.
  Var<T> logits(Tape<T>& tape, Var<T> seq) const;
  Var<T> posteriors(Tape<T>& tape, Var<T> seq) const;

  int hidden() const { return hidden_; }

 private:
  // Hidden state sequence [T',H] scanned in the given direction; rows are
  // always returned in input time order.
  Var<T> scan(Tape<T>& tape, Var<T> seq, bool reverse_time, Parameter<T>* w,
              Parameter<T>* b) const;

  int input_width_ = 0;
  int hidden_ = 0;
  Parameter<T>* w_fwd_ = nullptr;
  Parameter<T>* b_fwd_ = nullptr;
  Parameter<T>* w_bwd_ = nullptr;
  Parameter<T>* b_bwd_ = nullptr;
  Parameter<T>* w_proj_ = nullptr;
  Parameter<T>* b_proj_ = nullptr;
};

}  // namespace stmc

#endif  // STMC_BLSTM_H_
