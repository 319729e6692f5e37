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

#ifndef STMC_OPS_H_
#define STMC_OPS_H_

#include <utility>
#include <vector>

#include "stmc/tape.h"

namespace stmc {

// ---------------------------------------------------------------------------
// Elementwise and structural primitives. All differentiable unless noted.
// Binary ops require identical shapes; dense broadcasts over leading dims.
// ---------------------------------------------------------------------------

template <typename T> Var<T> add(Var<T> a, Var<T> b);
template <typename T> Var<T> sub(Var<T> a, Var<T> b);
template <typename T> Var<T> mul(Var<T> a, Var<T> b);   // elementwise
template <typename T> Var<T> scale(Var<T> a, T c);
template <typename T> Var<T> sum(Var<T> a);             // -> scalar [1]
template <typename T> Var<T> relu(Var<T> a);
template <typename T> Var<T> sigmoid(Var<T> a);
template <typename T> Var<T> tanh_op(Var<T> a);
template <typename T> Var<T> reshape(Var<T> a, std::vector<int> shape);

// Concatenation along the trailing (channel) axis; all other extents must
// match. Gradient splits back into the original segments.
template <typename T> Var<T> concat_channels(const std::vector<Var<T>>& parts);

// Trailing-axis slice [offset, offset+width); inverse of concat_channels.
template <typename T> Var<T> slice_channels(Var<T> a, int offset, int width);

// First-axis row extraction / stacking, used by the recurrent encoders.
template <typename T> Var<T> take_row(Var<T> a, int row);
template <typename T> Var<T> stack_rows(const std::vector<Var<T>>& rows);

// ---------------------------------------------------------------------------
// Linear maps and convolutions.
// ---------------------------------------------------------------------------

// Affine map over the trailing axis: [..., C_in] x [C_out, C_in] -> [..., C_out].
template <typename T> Var<T> dense(Var<T> x, Var<T> weight, Var<T> bias);

// 2-D cross-correlation. x: [C_in,H,W] or [B,C_in,H,W];
// kernel: [C_out,C_in,k,k]; bias: [C_out].
template <typename T>
Var<T> conv2d(Var<T> x, Var<T> kernel, Var<T> bias, int stride, int padding);

// Transposed convolution, stride 2 only, sized for exact 2x upsampling
// (requires k == 2*padding + 2). Adjoint of conv2d(stride=2) with the same
// kernel layout [C_in, C_out is kernel dim1]: kernel [C_in,C_out,k,k].
template <typename T>
Var<T> conv_transpose2d(Var<T> x, Var<T> kernel, Var<T> bias, int padding);

// 1-D temporal convolution over [T,C_in] with odd kernel k and symmetric
// zero padding (k-1)/2, preserving length. kernel: [C_out,C_in,k].
template <typename T>
Var<T> temporal_conv1d(Var<T> x, Var<T> kernel, Var<T> bias);

// [T,C] -> [floor(T/2),C], kernel/stride 2; odd trailing frame dropped.
// Ties route gradient to the earlier index.
template <typename T> Var<T> temporal_maxpool(Var<T> x);

// [C,H,W] -> [C] or [B,C,H,W] -> [B,C]: per-channel spatial mean.
template <typename T> Var<T> global_avg_pool2d(Var<T> x);

// ---------------------------------------------------------------------------
// Softmax family.
// ---------------------------------------------------------------------------

// Softmax over the trailing axis, max-subtracted for stability.
template <typename T> Var<T> row_softmax(Var<T> x);

// Softmax jointly over the last two (spatial) axes: each map sums to 1.
template <typename T> Var<T> spatial_softmax(Var<T> x);

// Expected coordinates under probability maps. [...,K,H,W] -> [...,K,2];
// output k holds (sum p*(i-1)/(H-1), sum p*(j-1)/(W-1)) with 1-based i over
// the first spatial axis. Fully differentiable w.r.t. the maps.
template <typename T> Var<T> soft_argmax(Var<T> maps);

// ---------------------------------------------------------------------------
// Patch cropping (hard crop; no gradient to the window position).
// ---------------------------------------------------------------------------

// Rounds a 1-based continuous center to a grid cell and clamps the h x w
// window fully inside an H x W map. Returns the 0-based window origin.
std::pair<int, int> crop_window(double center_row, double center_col, int map_h,
                                int map_w, int crop_h, int crop_w);

// x: [B,C,H,W], windows: B 0-based (row0,col0) origins -> [B,C,h,w].
// Gradient is identity on the cropped region of x; the window positions are
// plain integers and receive none.
template <typename T>
Var<T> crop_patch(Var<T> x, const std::vector<std::pair<int, int>>& windows,
                  int crop_h, int crop_w);

// Single-map convenience: x [C,H,W] -> [C,h,w].
template <typename T>
Var<T> crop_patch(Var<T> x, std::pair<int, int> window, int crop_h, int crop_w);

}  // namespace stmc

#endif  // STMC_OPS_H_
