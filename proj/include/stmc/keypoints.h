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

#ifndef STMC_KEYPOINTS_H_
#define STMC_KEYPOINTS_H_

#include <utility>

namespace stmc {

// Upper-body keypoint layout shared by the renderer, the pose branch and
// the cropping logic. Coordinates are stored normalized to [0,1] as
// (first-axis, second-axis) = (row, column) of the image grid; the interval
// endpoints map to the first/last pixel centers.
namespace kp {
constexpr int kNose = 0;
constexpr int kLeftShoulder = 1;
constexpr int kRightShoulder = 2;
constexpr int kLeftElbow = 3;
constexpr int kRightElbow = 4;
constexpr int kLeftWrist = 5;
constexpr int kRightWrist = 6;
constexpr int kCount = 7;

// id of the left/right mirror twin, identity for the nose
constexpr int mirror(int id) {
  switch (id) {
    case kLeftShoulder: return kRightShoulder;
    case kRightShoulder: return kLeftShoulder;
    case kLeftElbow: return kRightElbow;
    case kRightElbow: return kLeftElbow;
    case kLeftWrist: return kRightWrist;
    case kRightWrist: return kLeftWrist;
    default: return id;
  }
}
}  // namespace kp

// Normalized [0,1]^2 position -> 1-based continuous position on an HxW grid.
inline std::pair<double, double> to_map_coords(double x_norm, double y_norm, int h,
                                               int w) {
  return {x_norm * (h - 1) + 1.0, y_norm * (w - 1) + 1.0};
}

}  // namespace stmc

#endif  // STMC_KEYPOINTS_H_
