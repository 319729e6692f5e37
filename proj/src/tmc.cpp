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

#include "stmc/tmc.h"

#include <numeric>

namespace stmc {

template <typename T>
TmcModule<T>::TmcModule(ParameterStore<T>& store, const TmcConfig& cfg,
                        std::vector<int> cue_widths, const std::string& prefix)
    : cfg_(cfg), cue_widths_(std::move(cue_widths)) {
  const int n = static_cast<int>(cue_widths_.size());
  STMC_CHECK_CONFIG(n >= 1, "tmc: need at least one cue");
  STMC_CHECK_CONFIG(cfg_.blocks >= 1, "tmc: need at least one block");
  STMC_CHECK_CONFIG(cfg_.kernel % 2 == 1, "tmc: kernel size must be odd, got "
                                              << cfg_.kernel);
  STMC_CHECK_CONFIG(cfg_.width % n == 0, "tmc: width " << cfg_.width
                                                       << " not divisible by " << n
                                                       << " cues");
  STMC_CHECK_CONFIG(cfg_.width % 2 == 0, "tmc: width must be even");

  const int per_cue = cfg_.width / n;
  const int fused = std::accumulate(cue_widths_.begin(), cue_widths_.end(), 0);
  intra_w_.resize(static_cast<size_t>(cfg_.blocks));
  intra_b_.resize(static_cast<size_t>(cfg_.blocks));
  for (int l = 0; l < cfg_.blocks; ++l) {
    for (int c = 0; c < n; ++c) {
      const int in_w = l == 0 ? cue_widths_[static_cast<size_t>(c)] : per_cue;
      const std::string name =
          prefix + ".block" + std::to_string(l + 1) + ".intra" + std::to_string(c + 1);
      intra_w_[static_cast<size_t>(l)].push_back(&store.create_weight(
          name + ".w", {per_cue, in_w, cfg_.kernel}, in_w * cfg_.kernel));
      intra_b_[static_cast<size_t>(l)].push_back(
          &store.create_bias(name + ".b", {per_cue}));
    }
    const int inter_in = l == 0 ? fused : cfg_.width;
    const std::string name = prefix + ".block" + std::to_string(l + 1);
    inter_w_.push_back(&store.create_weight(
        name + ".inter.w", {cfg_.width / 2, inter_in, cfg_.kernel}, inter_in * cfg_.kernel));
    inter_b_.push_back(&store.create_bias(name + ".inter.b", {cfg_.width / 2}));
    proj_w_.push_back(
        &store.create_weight(name + ".proj.w", {cfg_.width / 2, cfg_.width, 1}, cfg_.width));
    proj_b_.push_back(&store.create_bias(name + ".proj.b", {cfg_.width / 2}));
  }
}

template <typename T>
typename TmcModule<T>::Sequences TmcModule<T>::init_sequences(
    Tape<T>& tape, const std::vector<Var<T>>& cue_seqs) const {
  STMC_CHECK_SHAPE(cue_seqs.size() == cue_widths_.size(),
                   "tmc: expected " << cue_widths_.size() << " cue sequences, got "
                                    << cue_seqs.size());
  Sequences s;
  int off = 0;
  for (size_t c = 0; c < cue_seqs.size(); ++c) {
    const NdArray<T>& v = cue_seqs[c].value();
    STMC_CHECK_SHAPE(v.rank() == 2 && v.dim(1) == cue_widths_[c],
                     "tmc: cue " << c << " has width " << v.dim(1) << ", expected "
                                 << cue_widths_[c]);
    s.segments.emplace_back(off, cue_widths_[c]);
    off += cue_widths_[c];
  }
  s.intra = concat_channels(cue_seqs);
  s.inter = s.intra;  // o_1 = f_1
  return s;
}

template <typename T>
Var<T> TmcModule<T>::intra_cue_path(Tape<T>& tape, Var<T> f_prev, const Segments& segments,
                                    int block) const {
  STMC_CHECK(block >= 0 && block < cfg_.blocks, "tmc: block index out of range");
  std::vector<Var<T>> outs;
  for (size_t c = 0; c < segments.size(); ++c) {
    const auto [off, width] = segments[c];
    Var<T> seg = slice_channels(f_prev, off, width);
    outs.push_back(relu(temporal_conv1d(
        seg, tape.leaf(*intra_w_[static_cast<size_t>(block)][c]),
        tape.leaf(*intra_b_[static_cast<size_t>(block)][c]))));
  }
  return concat_channels(outs);
}

template <typename T>
Var<T> TmcModule<T>::inter_cue_path(Tape<T>& tape, Var<T> o_prev, Var<T> f_curr,
                                    int block) const {
  STMC_CHECK(block >= 0 && block < cfg_.blocks, "tmc: block index out of range");
  Var<T> own = temporal_conv1d(o_prev, tape.leaf(*inter_w_[static_cast<size_t>(block)]),
                               tape.leaf(*inter_b_[static_cast<size_t>(block)]));
  Var<T> bridged =
      temporal_conv1d(f_curr, tape.leaf(*proj_w_[static_cast<size_t>(block)]),
                      tape.leaf(*proj_b_[static_cast<size_t>(block)]));
  return relu(concat_channels(std::vector<Var<T>>{own, bridged}));
}

template <typename T>
typename TmcModule<T>::Sequences TmcModule<T>::block(Tape<T>& tape, const Sequences& in,
                                                     int block_idx) const {
  Sequences out;
  Var<T> f_next = intra_cue_path(tape, in.intra, in.segments, block_idx);
  Var<T> o_next = inter_cue_path(tape, in.inter, f_next, block_idx);
  // pool both paths so they stay aligned in time
  out.intra = temporal_maxpool(f_next);
  out.inter = temporal_maxpool(o_next);
  const int per_cue = cue_channels();
  for (int c = 0; c < num_cues(); ++c) out.segments.emplace_back(c * per_cue, per_cue);
  return out;
}

template <typename T>
typename TmcModule<T>::Output TmcModule<T>::forward(Tape<T>& tape,
                                                    const std::vector<Var<T>>& cue_seqs) const {
  Sequences s = init_sequences(tape, cue_seqs);
  const int t_len = s.intra.value().dim(0);
  STMC_CHECK_SHAPE(t_len >= min_input_length(),
                   "tmc: sequence of length " << t_len << " too short for " << cfg_.blocks
                                              << " pooling blocks (need >= "
                                              << min_input_length() << ")");
  for (int l = 0; l < cfg_.blocks; ++l) s = block(tape, s, l);
  Output out;
  out.inter = s.inter;
  out.out_len = s.inter.value().dim(0);
  for (const auto& [off, width] : s.segments)
    out.intra.push_back(slice_channels(s.intra, off, width));
  return out;
}

template <typename T>
int TmcModule<T>::output_length(int t_len) const {
  for (int l = 0; l < cfg_.blocks; ++l) t_len /= 2;
  return t_len;
}

template class TmcModule<float>;
template class TmcModule<double>;

}  // namespace stmc
