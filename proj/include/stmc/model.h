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

#ifndef STMC_MODEL_H_
#define STMC_MODEL_H_

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "stmc/blstm.h"
#include "stmc/losses.h"
#include "stmc/smc.h"
#include "stmc/tmc.h"

namespace stmc {

struct ModelConfig {
  SmcConfig smc;
  TmcConfig tmc;
  int inter_blstm = 128;  // concatenated hidden width of the fused encoder
  int intra_blstm = 32;   // same, per cue encoder
  int vocab_size = 0;     // glosses + blank; set from the dataset
  double alpha = 0.6;
  double beta = 30.0;
  BetaMode beta_mode = BetaMode::kInsideSmooth;
};

// Cue order across the whole system.
inline constexpr std::array<const char*, 4> kCueNames = {"full", "hand", "face", "pose"};

// Whole network: spatial module, temporal module, one fused-path encoder and
// one encoder per cue. Inference uses only the fused path.
template <typename T>
class StmcModel {
 public:
  StmcModel(const ModelConfig& cfg, std::uint64_t init_seed);

  struct LossBreakdown {
    double ctc_inter = 0.0;
    std::array<double, 4> ctc_intra{};  // full, hand, face, pose
    double regression = 0.0;
    double joint = 0.0;
    Var<T> joint_var;
  };

  // Builds the full training graph for one clip on the given tape.
  // frames: [T,3,S,S]; keypoint_truth: [T,K,2]; target: gloss indices.
  LossBreakdown training_loss(Tape<T>& tape, const NdArray<T>& frames,
                              const NdArray<T>& keypoint_truth,
                              const std::vector<int>& target);

  // Fused-path posteriors [T',|V|] (the only encoder used at inference).
  NdArray<T> infer_posteriors(const NdArray<T>& frames);

  // Per-cue posteriors from the intra-path encoders, cue order fixed.
  std::array<NdArray<T>, 4> infer_per_cue_posteriors(const NdArray<T>& frames);

  // Predicted normalized keypoints [T,K,2].
  NdArray<T> infer_keypoints(const NdArray<T>& frames);

  // Top posterior entries per step of the fused path (decode diagnostics).
  struct StepTop {
    std::vector<int> labels;
    std::vector<double> probs;
  };
  std::vector<StepTop> top_posteriors(const NdArray<T>& posteriors, int k) const;

  ParameterStore<T>& params() { return store_; }
  const ModelConfig& config() const { return cfg_; }
  SmcModule<T>& smc() { return *smc_; }
  TmcModule<T>& tmc() { return *tmc_; }
  BlstmEncoder<T>& inter_encoder() { return *inter_enc_; }
  BlstmEncoder<T>& intra_encoder(int cue) { return *intra_enc_[static_cast<size_t>(cue)]; }

  // Sum of |param| over the intra-path encoders (ablation probes).
  double intra_encoder_checksum() const;

 private:
  struct Forward {
    typename TmcModule<T>::Output tmc;
    Var<T> keypoints;
  };
  Forward run_backbone(Tape<T>& tape, const NdArray<T>& frames);

  ModelConfig cfg_;
  ParameterStore<T> store_;
  std::unique_ptr<SmcModule<T>> smc_;
  std::unique_ptr<TmcModule<T>> tmc_;
  std::unique_ptr<BlstmEncoder<T>> inter_enc_;
  std::array<std::unique_ptr<BlstmEncoder<T>>, 4> intra_enc_;
};

}  // namespace stmc

#endif  // STMC_MODEL_H_
