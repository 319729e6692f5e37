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

#include "stmc/smc.h"

namespace stmc {

namespace {
// stage strides: mid map at 1/4 after stage 4, top map at 1/16 after stage 7
constexpr int kStageStride[7] = {1, 2, 2, 1, 2, 1, 2};
}  // namespace

template <typename T>
SmcModule<T>::SmcModule(ParameterStore<T>& store, const SmcConfig& cfg,
                        const std::string& prefix)
    : cfg_(cfg) {
  STMC_CHECK_CONFIG(cfg.input_size >= 16 && cfg.input_size % 16 == 0,
                    "smc: input_size must be divisible by 16, got " << cfg.input_size);
  STMC_CHECK_CONFIG(cfg.channels.size() == 7,
                    "smc: backbone needs 7 stage widths, got " << cfg.channels.size());
  STMC_CHECK_CONFIG(cfg.cue_hand % 2 == 0,
                    "smc: hand cue width must be even, got " << cfg.cue_hand);
  STMC_CHECK_CONFIG(cfg.crop_hand <= cfg.mid_size() && cfg.crop_face <= cfg.mid_size(),
                    "smc: crop sizes exceed the mid map (" << cfg.mid_size() << ")");
  STMC_CHECK_CONFIG(cfg.keypoints >= 1, "smc: need at least one keypoint");

  int in_c = 3;
  for (size_t i = 0; i < cfg.channels.size(); ++i) {
    const int out_c = cfg.channels[i];
    const std::string name = prefix + ".backbone.conv" + std::to_string(i + 1);
    stage_w_.push_back(&store.create_weight(name + ".w", {out_c, in_c, 3, 3}, in_c * 9));
    stage_b_.push_back(&store.create_bias(name + ".b", {out_c}));
    in_c = out_c;
  }

  const int c7 = cfg.top_channels();
  deconv1_w_ = &store.create_weight(prefix + ".pose.deconv1.w",
                                    {c7, cfg.pose_deconv1, 4, 4}, c7 * 16);
  deconv1_b_ = &store.create_bias(prefix + ".pose.deconv1.b", {cfg.pose_deconv1});
  deconv2_w_ = &store.create_weight(prefix + ".pose.deconv2.w",
                                    {cfg.pose_deconv1, cfg.pose_deconv2, 4, 4},
                                    cfg.pose_deconv1 * 16);
  deconv2_b_ = &store.create_bias(prefix + ".pose.deconv2.b", {cfg.pose_deconv2});
  heat_w_ = &store.create_weight(prefix + ".pose.heat.w",
                                 {cfg.keypoints, cfg.pose_deconv2, 1, 1}, cfg.pose_deconv2);
  heat_b_ = &store.create_bias(prefix + ".pose.heat.b", {cfg.keypoints});

  const int c4 = cfg.mid_channels();
  const int half_hand = cfg.cue_hand / 2;
  hand_w1_ = &store.create_weight(prefix + ".hand.conv1.w", {half_hand, c4, 3, 3}, c4 * 9);
  hand_b1_ = &store.create_bias(prefix + ".hand.conv1.b", {half_hand});
  hand_w2_ = &store.create_weight(prefix + ".hand.conv2.w", {half_hand, half_hand, 3, 3},
                                  half_hand * 9);
  hand_b2_ = &store.create_bias(prefix + ".hand.conv2.b", {half_hand});
  face_w1_ = &store.create_weight(prefix + ".face.conv1.w", {cfg.cue_face, c4, 3, 3},
                                  c4 * 9);
  face_b1_ = &store.create_bias(prefix + ".face.conv1.b", {cfg.cue_face});
  face_w2_ = &store.create_weight(prefix + ".face.conv2.w",
                                  {cfg.cue_face, cfg.cue_face, 3, 3}, cfg.cue_face * 9);
  face_b2_ = &store.create_bias(prefix + ".face.conv2.b", {cfg.cue_face});

  const int pose_in = 2 * cfg.keypoints;
  pose_w1_ = &store.create_weight(prefix + ".pose_cue.fc1.w", {cfg.cue_pose, pose_in},
                                  pose_in);
  pose_b1_ = &store.create_bias(prefix + ".pose_cue.fc1.b", {cfg.cue_pose});
  pose_w2_ = &store.create_weight(prefix + ".pose_cue.fc2.w", {cfg.cue_pose, cfg.cue_pose},
                                  cfg.cue_pose);
  pose_b2_ = &store.create_bias(prefix + ".pose_cue.fc2.b", {cfg.cue_pose});
}

template <typename T>
Var<T> SmcModule<T>::conv_block(Tape<T>& tape, Var<T> x, Parameter<T>* w, Parameter<T>* b,
                                int stride, int padding) const {
  return relu(conv2d(x, tape.leaf(*w), tape.leaf(*b), stride, padding));
}

template <typename T>
typename SmcModule<T>::BackboneMaps SmcModule<T>::backbone_forward(Tape<T>& tape,
                                                                   Var<T> frames) const {
  const NdArray<T>& fv = frames.value();
  STMC_CHECK_SHAPE(fv.rank() == 3 || fv.rank() == 4,
                   "backbone: frames must be [3,S,S] or [B,3,S,S]");
  const int h = fv.dim(-2), w = fv.dim(-1);
  STMC_CHECK_SHAPE(h % 16 == 0 && w % 16 == 0,
                   "backbone: input " << h << "x" << w << " not divisible by 16");
  Var<T> x = frames;
  BackboneMaps maps;
  for (int i = 0; i < 7; ++i) {
    x = conv_block(tape, x, stage_w_[static_cast<size_t>(i)],
                   stage_b_[static_cast<size_t>(i)], kStageStride[i], 1);
    if (i == 3) maps.mid = x;
  }
  maps.top = x;
  return maps;
}

template <typename T>
Var<T> SmcModule<T>::pose_head(Tape<T>& tape, Var<T> top) const {
  Var<T> x = relu(conv_transpose2d(top, tape.leaf(*deconv1_w_), tape.leaf(*deconv1_b_), 1));
  x = relu(conv_transpose2d(x, tape.leaf(*deconv2_w_), tape.leaf(*deconv2_b_), 1));
  return conv2d(x, tape.leaf(*heat_w_), tape.leaf(*heat_b_), 1, 0);
}

template <typename T>
typename SmcModule<T>::Patches SmcModule<T>::crop_patches(
    Tape<T>& tape, Var<T> mid, const NdArray<T>& keypoint_values) const {
  const NdArray<T>& mv = mid.value();
  STMC_CHECK_SHAPE(mv.rank() == 4, "crop_patches: mid map must be [B,C,H,W]");
  const int batch = mv.dim(0), mh = mv.dim(2), mw = mv.dim(3);
  STMC_CHECK_SHAPE(keypoint_values.rank() == 3 && keypoint_values.dim(0) == batch &&
                       keypoint_values.dim(1) == cfg_.keypoints,
                   "crop_patches: keypoints " << shape_string(keypoint_values.shape()));
  auto windows_for = [&](int key, int ch, int cw) {
    std::vector<std::pair<int, int>> wins(static_cast<size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      const double kx =
          static_cast<double>(keypoint_values[(static_cast<std::int64_t>(b) *
                                               cfg_.keypoints + key) * 2]);
      const double ky =
          static_cast<double>(keypoint_values[(static_cast<std::int64_t>(b) *
                                               cfg_.keypoints + key) * 2 + 1]);
      const auto [cr, cc] = to_map_coords(kx, ky, mh, mw);
      wins[static_cast<size_t>(b)] = crop_window(cr, cc, mh, mw, ch, cw);
    }
    return wins;
  };
  Patches p;
  p.left_hand = crop_patch(mid, windows_for(kp::kLeftWrist, cfg_.crop_hand, cfg_.crop_hand),
                           cfg_.crop_hand, cfg_.crop_hand);
  p.right_hand = crop_patch(mid,
                            windows_for(kp::kRightWrist, cfg_.crop_hand, cfg_.crop_hand),
                            cfg_.crop_hand, cfg_.crop_hand);
  p.face = crop_patch(mid, windows_for(kp::kNose, cfg_.crop_face, cfg_.crop_face),
                      cfg_.crop_face, cfg_.crop_face);
  return p;
}

template <typename T>
typename SmcModule<T>::CueFeatures SmcModule<T>::cue_streams(Tape<T>& tape,
                                                             const BackboneMaps& maps,
                                                             const Patches& patches,
                                                             Var<T> keypoints) const {
  const NdArray<T>& lh = patches.left_hand.value();
  const NdArray<T>& rh = patches.right_hand.value();
  STMC_CHECK_SHAPE(lh.same_shape(rh), "cue_streams: hand patches differ: "
                                          << shape_string(lh.shape()) << " vs "
                                          << shape_string(rh.shape()));
  CueFeatures cues;
  cues.full = global_avg_pool2d(maps.top);

  // one shared stack for both hands, left half then right half
  auto hand_stack = [&](Var<T> patch) {
    Var<T> x = conv_block(tape, patch, hand_w1_, hand_b1_, 1, 1);
    x = conv_block(tape, x, hand_w2_, hand_b2_, 2, 1);
    return global_avg_pool2d(x);
  };
  cues.hand = concat_channels(
      std::vector<Var<T>>{hand_stack(patches.left_hand), hand_stack(patches.right_hand)});

  Var<T> f = conv_block(tape, patches.face, face_w1_, face_b1_, 1, 1);
  f = conv_block(tape, f, face_w2_, face_b2_, 2, 1);
  cues.face = global_avg_pool2d(f);

  const NdArray<T>& kv = keypoints.value();
  Var<T> flat = reshape(keypoints, {kv.dim(0), 2 * cfg_.keypoints});
  Var<T> pose = relu(dense(flat, tape.leaf(*pose_w1_), tape.leaf(*pose_b1_)));
  cues.pose = relu(dense(pose, tape.leaf(*pose_w2_), tape.leaf(*pose_b2_)));
  return cues;
}

template <typename T>
typename SmcModule<T>::Output SmcModule<T>::forward(Tape<T>& tape, Var<T> frames) const {
  const NdArray<T>& fv = frames.value();
  STMC_CHECK_SHAPE(fv.rank() == 4, "smc_forward: frames must be [T,3,S,S]");
  STMC_CHECK_SHAPE(fv.dim(0) >= 1, "smc_forward: empty video");
  BackboneMaps maps = backbone_forward(tape, frames);
  Output out;
  out.heatmaps = pose_head(tape, maps.top);
  out.keypoints = soft_argmax(spatial_softmax(out.heatmaps));
  // crop centers use the keypoint values only; no gradient flows to them
  Patches patches = crop_patches(tape, maps.mid, out.keypoints.value());
  out.cues = cue_streams(tape, maps, patches, out.keypoints);
  return out;
}

template class SmcModule<float>;
template class SmcModule<double>;

}  // namespace stmc
