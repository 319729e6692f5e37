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

#ifndef STMC_TMC_H_
#define STMC_TMC_H_

#include <string>
#include <utility>
#include <vector>

#include "stmc/ops.h"
#include "stmc/params.h"

namespace stmc {

struct TmcConfig {
  int blocks = 2;
  int kernel = 5;   // odd; the cross-path projection is always point-wise
  int width = 128;  // output channels C of each path; divisible by 2 and by N
};

// Temporal multi-cue module. Each block runs an intra-cue path (one
// temporal convolution per cue, no cross-cue mixing) and an inter-cue path
// (temporal convolution over the fused stream concatenated with a
// point-wise projection of the intra output), then temporal max-pooling
// with stride 2 on both paths so they stay time-aligned.
template <typename T>
class TmcModule {
 public:
  using Segments = std::vector<std::pair<int, int>>;  // (offset,width) per cue

  TmcModule(ParameterStore<T>& store, const TmcConfig& cfg, std::vector<int> cue_widths,
            const std::string& prefix = "tmc");

  struct Sequences {
    Var<T> inter;  // o_l: [T,C_o]
    Var<T> intra;  // f_l: [T,C_f], cue-partitioned
    Segments segments;
  };

  // Both sequences start as the channel concatenation of the per-cue
  // feature sequences (each [T,C_n], one row per frame, fixed cue order).
  Sequences init_sequences(Tape<T>& tape, const std::vector<Var<T>>& cue_seqs) const;

  // Per-cue temporal conv + ReLU, re-concatenated; every output segment has
  // width C/N.
  Var<T> intra_cue_path(Tape<T>& tape, Var<T> f_prev, const Segments& segments,
                        int block) const;

  // ReLU of [temporal conv (C/2) of o_prev, point-wise conv (C/2) of f_curr].
  Var<T> inter_cue_path(Tape<T>& tape, Var<T> o_prev, Var<T> f_curr, int block) const;

  // One block: both paths, then stride-2 temporal max-pooling on each.
  Sequences block(Tape<T>& tape, const Sequences& in, int block_idx) const;

  struct Output {
    Var<T> inter;               // [T',C]
    std::vector<Var<T>> intra;  // N sequences [T',C/N]
    int out_len = 0;            // T'
  };

  Output forward(Tape<T>& tape, const std::vector<Var<T>>& cue_seqs) const;

  // T' for a length-T input (floor division by 2 per block).
  int output_length(int t_len) const;
  int min_input_length() const { return 1 << cfg_.blocks; }

  const TmcConfig& config() const { return cfg_; }
  int num_cues() const { return static_cast<int>(cue_widths_.size()); }
  int cue_channels() const { return cfg_.width / num_cues(); }

 private:
  TmcConfig cfg_;
  std::vector<int> cue_widths_;
  // per block: N intra kernels/biases + inter kernel/bias + projection
  std::vector<std::vector<Parameter<T>*>> intra_w_, intra_b_;
  std::vector<Parameter<T>*> inter_w_, inter_b_, proj_w_, proj_b_;
};

}  // namespace stmc

#endif  // STMC_TMC_H_
