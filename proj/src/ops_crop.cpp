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

#include <algorithm>
#include <cmath>

#include "stmc/ops.h"

namespace stmc {

std::pair<int, int> crop_window(double center_row, double center_col, int map_h,
                                int map_w, int crop_h, int crop_w) {
  STMC_CHECK_SHAPE(crop_h >= 1 && crop_w >= 1 && crop_h <= map_h && crop_w <= map_w,
                   "crop_window: patch " << crop_h << "x" << crop_w
                                         << " does not fit in map " << map_h << "x"
                                         << map_w);
  auto clamp_center = [](double c) {
    if (!(c > -1e9)) return -1e9;  // also catches NaN
    if (c > 1e9) return 1e9;
    return c;
  };
  // 1-based continuous center -> 0-based cell, then anchor the window.
  const long cr = std::lround(clamp_center(center_row) - 1.0);
  const long cc = std::lround(clamp_center(center_col) - 1.0);
  long r0 = cr - (crop_h - 1) / 2;
  long c0 = cc - (crop_w - 1) / 2;
  r0 = std::clamp<long>(r0, 0, map_h - crop_h);
  c0 = std::clamp<long>(c0, 0, map_w - crop_w);
  return {static_cast<int>(r0), static_cast<int>(c0)};
}

template <typename T>
Var<T> crop_patch(Var<T> x, const std::vector<std::pair<int, int>>& windows, int crop_h,
                  int crop_w) {
  const NdArray<T>& xv = x.value();
  STMC_CHECK_SHAPE(xv.rank() == 4, "crop_patch: input must be [B,C,H,W], got "
                                       << shape_string(xv.shape()));
  const int batch = xv.dim(0), c = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
  STMC_CHECK_SHAPE(crop_h <= h && crop_w <= w, "crop_patch: patch "
                                                   << crop_h << "x" << crop_w
                                                   << " larger than map " << h << "x" << w);
  STMC_CHECK_SHAPE(static_cast<int>(windows.size()) == batch,
                   "crop_patch: " << windows.size() << " windows for batch " << batch);
  for (const auto& [r0, c0] : windows)
    STMC_CHECK_SHAPE(r0 >= 0 && c0 >= 0 && r0 + crop_h <= h && c0 + crop_w <= w,
                     "crop_patch: window (" << r0 << "," << c0 << ") crosses the border");

  NdArray<T> out({batch, c, crop_h, crop_w});
  const std::int64_t in_plane = static_cast<std::int64_t>(h) * w;
  const std::int64_t out_plane = static_cast<std::int64_t>(crop_h) * crop_w;
  for (int b = 0; b < batch; ++b) {
    const auto [r0, c0] = windows[static_cast<size_t>(b)];
    for (int j = 0; j < c; ++j) {
      const T* src = xv.data() + (static_cast<std::int64_t>(b) * c + j) * in_plane;
      T* dst = out.data() + (static_cast<std::int64_t>(b) * c + j) * out_plane;
      for (int y = 0; y < crop_h; ++y)
        for (int z = 0; z < crop_w; ++z)
          dst[static_cast<std::int64_t>(y) * crop_w + z] =
              src[static_cast<std::int64_t>(r0 + y) * w + c0 + z];
    }
  }
  auto backward = [batch, c, h, w, crop_h, crop_w, windows](Tape<T>& tape, int id) {
    auto& n = tape.node(id);
    const int p = n.parents[0];
    if (!tape.needs_grad(p)) return;
    NdArray<T>& gin = tape.grad(p);
    const std::int64_t in_plane = static_cast<std::int64_t>(h) * w;
    const std::int64_t out_plane = static_cast<std::int64_t>(crop_h) * crop_w;
    for (int b = 0; b < batch; ++b) {
      const auto [r0, c0] = windows[static_cast<size_t>(b)];
      for (int j = 0; j < c; ++j) {
        T* dst = gin.data() + (static_cast<std::int64_t>(b) * c + j) * in_plane;
        const T* src = n.grad.data() + (static_cast<std::int64_t>(b) * c + j) * out_plane;
        for (int y = 0; y < crop_h; ++y)
          for (int z = 0; z < crop_w; ++z)
            dst[static_cast<std::int64_t>(r0 + y) * w + c0 + z] +=
                src[static_cast<std::int64_t>(y) * crop_w + z];
      }
    }
  };
  return x.tape->emplace(std::move(out), {x.id}, backward, "crop_patch");
}

template <typename T>
Var<T> crop_patch(Var<T> x, std::pair<int, int> window, int crop_h, int crop_w) {
  const NdArray<T>& xv = x.value();
  STMC_CHECK_SHAPE(xv.rank() == 3, "crop_patch: input must be [C,H,W], got "
                                       << shape_string(xv.shape()));
  Var<T> batched = reshape(x, {1, xv.dim(0), xv.dim(1), xv.dim(2)});
  Var<T> out = crop_patch(batched, std::vector<std::pair<int, int>>{window}, crop_h,
                          crop_w);
  return reshape(out, {xv.dim(0), crop_h, crop_w});
}

#define STMC_INSTANTIATE_CROP(T)                                                      \
  template Var<T> crop_patch(Var<T>, const std::vector<std::pair<int, int>>&, int,    \
                             int);                                                    \
  template Var<T> crop_patch(Var<T>, std::pair<int, int>, int, int);

STMC_INSTANTIATE_CROP(float)
STMC_INSTANTIATE_CROP(double)

}  // namespace stmc
