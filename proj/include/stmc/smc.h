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

#ifndef STMC_SMC_H_
#define STMC_SMC_H_

#include <string>
#include <vector>

#include "stmc/keypoints.h"
#include "stmc/ops.h"
#include "stmc/params.h"

namespace stmc {

// Spatial module configuration. The backbone is a seven-stage 3x3 conv/ReLU
// stack with stride-2 downsampling at stages 2, 3, 5 and 7, so the stage-4
// "mid" map sits at 1/4 input resolution and the stage-7 "top" map at 1/16.
struct SmcConfig {
  int input_size = 96;  // square, divisible by 16
  std::vector<int> channels = {8, 16, 32, 32, 48, 64, 64};
  int keypoints = kp::kCount;
  int crop_hand = 10;  // on the mid map
  int crop_face = 7;
  int cue_hand = 64;  // both hands together; halves share weights
  int cue_face = 32;
  int cue_pose = 32;
  int pose_deconv1 = 32;
  int pose_deconv2 = 16;

  int mid_channels() const { return channels[3]; }
  int top_channels() const { return channels[6]; }
  int mid_size() const { return input_size / 4; }
  int top_size() const { return input_size / 16; }
  int cue_full() const { return channels[6]; }
  std::vector<int> cue_widths() const { return {cue_full(), cue_hand, cue_face, cue_pose}; }
};

// Per-frame spatial multi-cue extractor: backbone, pose-estimation head with
// soft-argmax, clamped patch cropping and per-cue feature generation. All
// frames share one parameter set; frames in a batch are independent.
template <typename T>
class SmcModule {
 public:
  SmcModule(ParameterStore<T>& store, const SmcConfig& cfg,
            const std::string& prefix = "smc");

  struct BackboneMaps {
    Var<T> mid;  // [B,C4,S/4,S/4]
    Var<T> top;  // [B,C7,S/16,S/16]
  };

  struct CueFeatures {
    Var<T> full, hand, face, pose;  // [B,C_cue] each; cue order is fixed
  };

  struct Output {
    CueFeatures cues;
    Var<T> keypoints;  // [B,K,2], normalized, differentiable
    Var<T> heatmaps;   // [B,K,S/4,S/4] raw logits
  };

  // frames: [B,3,S,S] (or [3,S,S] for a single frame)
  BackboneMaps backbone_forward(Tape<T>& tape, Var<T> frames) const;

  // top map -> K heatmaps at mid resolution (two stride-2 deconvolutions
  // with ReLU, then a point-wise projection)
  Var<T> pose_head(Tape<T>& tape, Var<T> top) const;

  // Patch positions from keypoint values; gradient is stopped at the crop.
  struct Patches {
    Var<T> left_hand, right_hand, face;  // [B,C4,h,w]
  };
  Patches crop_patches(Tape<T>& tape, Var<T> mid, const NdArray<T>& keypoint_values) const;

  // Cue feature generation from the maps, the cropped patches and the
  // differentiable keypoints.
  CueFeatures cue_streams(Tape<T>& tape, const BackboneMaps& maps, const Patches& patches,
                          Var<T> keypoints) const;

  // Whole per-frame pipeline over a batch of frames.
  Output forward(Tape<T>& tape, Var<T> frames) const;

  const SmcConfig& config() const { return cfg_; }

 private:
  Var<T> conv_block(Tape<T>& tape, Var<T> x, Parameter<T>* w, Parameter<T>* b, int stride,
                    int padding) const;

  SmcConfig cfg_;
  std::vector<Parameter<T>*> stage_w_, stage_b_;
  Parameter<T>* deconv1_w_;
  Parameter<T>* deconv1_b_;
  Parameter<T>* deconv2_w_;
  Parameter<T>* deconv2_b_;
  Parameter<T>* heat_w_;
  Parameter<T>* heat_b_;
  Parameter<T>* hand_w1_;
  Parameter<T>* hand_b1_;
  Parameter<T>* hand_w2_;
  Parameter<T>* hand_b2_;
  Parameter<T>* face_w1_;
  Parameter<T>* face_b1_;
  Parameter<T>* face_w2_;
  Parameter<T>* face_b2_;
  Parameter<T>* pose_w1_;
  Parameter<T>* pose_b1_;
  Parameter<T>* pose_w2_;
  Parameter<T>* pose_b2_;
};

}  // namespace stmc

#endif  // STMC_SMC_H_
