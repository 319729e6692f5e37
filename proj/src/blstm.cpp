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

#include "stmc/blstm.h"

namespace stmc {

template <typename T>
BlstmEncoder<T>::BlstmEncoder(ParameterStore<T>& store, const std::string& prefix,
                              int input_width, int output_width, int vocab_size,
                              bool share_directions)
    : input_width_(input_width) {
  STMC_CHECK_CONFIG(output_width >= 2 && output_width % 2 == 0,
                    prefix << ": BLSTM output width must be even, got " << output_width);
  hidden_ = output_width / 2;
  const int gate_in = input_width + hidden_;
  w_fwd_ = &store.create_weight(prefix + ".fwd.w", {4 * hidden_, gate_in}, gate_in);
  b_fwd_ = &store.create_bias(prefix + ".fwd.b", {4 * hidden_});
  if (share_directions) {
    w_bwd_ = w_fwd_;
    b_bwd_ = b_fwd_;
  } else {
    w_bwd_ = &store.create_weight(prefix + ".bwd.w", {4 * hidden_, gate_in}, gate_in);
    b_bwd_ = &store.create_bias(prefix + ".bwd.b", {4 * hidden_});
  }
  w_proj_ = &store.create_weight(prefix + ".proj.w", {vocab_size, output_width},
                                 output_width);
  b_proj_ = &store.create_bias(prefix + ".proj.b", {vocab_size});
}

template <typename T>
Var<T> BlstmEncoder<T>::scan(Tape<T>& tape, Var<T> seq, bool reverse_time,
                             Parameter<T>* w, Parameter<T>* b) const {
  const int t_len = seq.value().dim(0);
  Var<T> wv = tape.leaf(*w);
  Var<T> bv = tape.leaf(*b);
  Var<T> h = tape.constant(NdArray<T>({hidden_}));  // h_0 fixed all-zero
  Var<T> c = tape.constant(NdArray<T>({hidden_}));
  std::vector<Var<T>> outputs(static_cast<size_t>(t_len));
  for (int step = 0; step < t_len; ++step) {
    const int t = reverse_time ? t_len - 1 - step : step;
    Var<T> x = take_row(seq, t);
    Var<T> gates = dense(concat_channels(std::vector<Var<T>>{x, h}), wv, bv);
    Var<T> i = sigmoid(slice_channels(gates, 0, hidden_));
    Var<T> f = sigmoid(slice_channels(gates, hidden_, hidden_));
    Var<T> g = tanh_op(slice_channels(gates, 2 * hidden_, hidden_));
    Var<T> o = sigmoid(slice_channels(gates, 3 * hidden_, hidden_));
    c = add(mul(f, c), mul(i, g));
    h = mul(o, tanh_op(c));
    outputs[static_cast<size_t>(t)] = h;
  }
  return stack_rows(outputs);
}

template <typename T>
Var<T> BlstmEncoder<T>::logits(Tape<T>& tape, Var<T> seq) const {
  const NdArray<T>& sv = seq.value();
  STMC_CHECK_SHAPE(sv.rank() == 2 && sv.dim(1) == input_width_,
                   "blstm: expected [T'," << input_width_ << "], got "
                                          << shape_string(sv.shape()));
  STMC_CHECK_SHAPE(sv.dim(0) >= 1, "blstm: empty sequence");
  Var<T> fwd = scan(tape, seq, false, w_fwd_, b_fwd_);
  Var<T> bwd = scan(tape, seq, true, w_bwd_, b_bwd_);
  Var<T> both = concat_channels(std::vector<Var<T>>{fwd, bwd});
  return dense(both, tape.leaf(*w_proj_), tape.leaf(*b_proj_));
}

template <typename T>
Var<T> BlstmEncoder<T>::posteriors(Tape<T>& tape, Var<T> seq) const {
  return row_softmax(logits(tape, seq));
}

template class BlstmEncoder<float>;
template class BlstmEncoder<double>;

}  // namespace stmc
