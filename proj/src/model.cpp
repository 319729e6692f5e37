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

#include "stmc/model.h"

#include <algorithm>
#include <cmath>

#include "stmc/ctc.h"

namespace stmc {

template <typename T>
StmcModel<T>::StmcModel(const ModelConfig& cfg, std::uint64_t init_seed)
    : cfg_(cfg), store_(init_seed) {
  STMC_CHECK_CONFIG(cfg_.vocab_size >= 2, "model: vocabulary needs blank plus a gloss");
  smc_ = std::make_unique<SmcModule<T>>(store_, cfg_.smc);
  tmc_ = std::make_unique<TmcModule<T>>(store_, cfg_.tmc, cfg_.smc.cue_widths());
  inter_enc_ = std::make_unique<BlstmEncoder<T>>(store_, "seq.inter", cfg_.tmc.width,
                                                 cfg_.inter_blstm, cfg_.vocab_size);
  const int per_cue = tmc_->cue_channels();
  for (size_t c = 0; c < intra_enc_.size(); ++c)
    intra_enc_[c] = std::make_unique<BlstmEncoder<T>>(
        store_, std::string("seq.intra.") + kCueNames[c], per_cue, cfg_.intra_blstm,
        cfg_.vocab_size);
}

template <typename T>
typename StmcModel<T>::Forward StmcModel<T>::run_backbone(Tape<T>& tape,
                                                          const NdArray<T>& frames) {
  Var<T> input = tape.constant(frames);
  typename SmcModule<T>::Output smc_out = smc_->forward(tape, input);
  Forward fwd;
  fwd.keypoints = smc_out.keypoints;
  std::vector<Var<T>> cues = {smc_out.cues.full, smc_out.cues.hand, smc_out.cues.face,
                              smc_out.cues.pose};
  fwd.tmc = tmc_->forward(tape, cues);
  return fwd;
}

template <typename T>
typename StmcModel<T>::LossBreakdown StmcModel<T>::training_loss(
    Tape<T>& tape, const NdArray<T>& frames, const NdArray<T>& keypoint_truth,
    const std::vector<int>& target) {
  Forward fwd = run_backbone(tape, frames);
  LossBreakdown out;

  Var<T> inter_post = inter_enc_->posteriors(tape, fwd.tmc.inter);
  Var<T> loss_inter = ctc_loss(inter_post, target);
  out.ctc_inter = static_cast<double>(loss_inter.value()[0]);

  std::vector<Var<T>> intra_losses;
  for (size_t c = 0; c < intra_enc_.size(); ++c) {
    Var<T> post = intra_enc_[c]->posteriors(tape, fwd.tmc.intra[c]);
    Var<T> loss = ctc_loss(post, target);
    out.ctc_intra[c] = static_cast<double>(loss.value()[0]);
    intra_losses.push_back(loss);
  }

  Var<T> reg = smooth_l1_regression(fwd.keypoints, keypoint_truth,
                                    static_cast<T>(cfg_.beta), cfg_.beta_mode);
  out.regression = static_cast<double>(reg.value()[0]);

  out.joint_var = joint_loss(loss_inter, intra_losses, reg, static_cast<T>(cfg_.alpha));
  out.joint = static_cast<double>(out.joint_var.value()[0]);
  return out;
}

template <typename T>
NdArray<T> StmcModel<T>::infer_posteriors(const NdArray<T>& frames) {
  Tape<T> tape;
  Forward fwd = run_backbone(tape, frames);
  return inter_enc_->posteriors(tape, fwd.tmc.inter).value();
}

template <typename T>
std::array<NdArray<T>, 4> StmcModel<T>::infer_per_cue_posteriors(const NdArray<T>& frames) {
  Tape<T> tape;
  Forward fwd = run_backbone(tape, frames);
  std::array<NdArray<T>, 4> out;
  for (size_t c = 0; c < intra_enc_.size(); ++c)
    out[c] = intra_enc_[c]->posteriors(tape, fwd.tmc.intra[c]).value();
  return out;
}

template <typename T>
NdArray<T> StmcModel<T>::infer_keypoints(const NdArray<T>& frames) {
  Tape<T> tape;
  Var<T> input = tape.constant(frames);
  typename SmcModule<T>::BackboneMaps maps = smc_->backbone_forward(tape, input);
  Var<T> heat = smc_->pose_head(tape, maps.top);
  return soft_argmax(spatial_softmax(heat)).value();
}

template <typename T>
std::vector<typename StmcModel<T>::StepTop> StmcModel<T>::top_posteriors(
    const NdArray<T>& posteriors, int k) const {
  const int t_len = posteriors.dim(0);
  const int vocab = posteriors.dim(1);
  std::vector<StepTop> out(static_cast<size_t>(t_len));
  for (int t = 0; t < t_len; ++t) {
    std::vector<int> order(static_cast<size_t>(vocab));
    for (int j = 0; j < vocab; ++j) order[static_cast<size_t>(j)] = j;
    const T* row = posteriors.data() + static_cast<std::int64_t>(t) * vocab;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return row[a] > row[b]; });
    StepTop& top = out[static_cast<size_t>(t)];
    for (int j = 0; j < std::min(k, vocab); ++j) {
      top.labels.push_back(order[static_cast<size_t>(j)]);
      top.probs.push_back(static_cast<double>(row[order[static_cast<size_t>(j)]]));
    }
  }
  return out;
}

template <typename T>
double StmcModel<T>::intra_encoder_checksum() const {
  double acc = 0.0;
  for (size_t i = 0; i < store_.size(); ++i) {
    const Parameter<T>& p = store_.at(i);
    if (p.name.rfind("seq.intra.", 0) != 0) continue;
    for (std::int64_t j = 0; j < p.value.size(); ++j)
      acc += std::abs(static_cast<double>(p.value[j]));
  }
  return acc;
}

template class StmcModel<float>;
template class StmcModel<double>;

}  // namespace stmc
