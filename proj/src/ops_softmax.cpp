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

namespace {

// Softmax over contiguous groups of `width` elements, max-subtracted.
template <typename T>
NdArray<T> grouped_softmax(const NdArray<T>& x, std::int64_t width) {
  NdArray<T> out(x.shape());
  const std::int64_t groups = x.size() / width;
  for (std::int64_t g = 0; g < groups; ++g) {
    const T* src = x.data() + g * width;
    T* dst = out.data() + g * width;
    T mx = src[0];
    for (std::int64_t i = 1; i < width; ++i) mx = std::max(mx, src[i]);
    T total = T(0);
    for (std::int64_t i = 0; i < width; ++i) {
      dst[i] = std::exp(src[i] - mx);
      total += dst[i];
    }
    const T inv = T(1) / total;
    for (std::int64_t i = 0; i < width; ++i) dst[i] *= inv;
  }
  return out;
}

// dL/dx = y * (g - <g,y>) within each group.
template <typename T>
void grouped_softmax_backward(const NdArray<T>& y, const NdArray<T>& gout,
                              std::int64_t width, NdArray<T>* gin) {
  const std::int64_t groups = y.size() / width;
  for (std::int64_t g = 0; g < groups; ++g) {
    const T* yrow = y.data() + g * width;
    const T* grow = gout.data() + g * width;
    T* dst = gin->data() + g * width;
    T dot = T(0);
    for (std::int64_t i = 0; i < width; ++i) dot += grow[i] * yrow[i];
    for (std::int64_t i = 0; i < width; ++i) dst[i] += yrow[i] * (grow[i] - dot);
  }
}

}  // namespace

template <typename T>
Var<T> row_softmax(Var<T> x) {
  const NdArray<T>& xv = x.value();
  STMC_CHECK_SHAPE(xv.rank() >= 1, "row_softmax: need rank >= 1");
  const std::int64_t width = xv.dim(-1);
  NdArray<T> out = grouped_softmax(xv, width);
  return x.tape->emplace(
      std::move(out), {x.id},
      [width](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        const int p = n.parents[0];
        if (!tape.needs_grad(p)) return;
        grouped_softmax_backward(n.value, n.grad, width, &tape.grad(p));
      },
      "row_softmax");
}

template <typename T>
Var<T> spatial_softmax(Var<T> x) {
  const NdArray<T>& xv = x.value();
  STMC_CHECK_SHAPE(xv.rank() >= 2, "spatial_softmax: need rank >= 2");
  const std::int64_t width =
      static_cast<std::int64_t>(xv.dim(-1)) * xv.dim(-2);
  NdArray<T> out = grouped_softmax(xv, width);
  return x.tape->emplace(
      std::move(out), {x.id},
      [width](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        const int p = n.parents[0];
        if (!tape.needs_grad(p)) return;
        grouped_softmax_backward(n.value, n.grad, width, &tape.grad(p));
      },
      "spatial_softmax");
}

template <typename T>
Var<T> soft_argmax(Var<T> maps) {
  const NdArray<T>& mv = maps.value();
  STMC_CHECK_SHAPE(mv.rank() >= 2, "soft_argmax: need rank >= 2");
  const int h = mv.dim(-2), w = mv.dim(-1);
  STMC_CHECK_SHAPE(h >= 2 && w >= 2, "soft_argmax: maps must be at least 2x2, got "
                                         << shape_string(mv.shape()));
  const std::int64_t plane = static_cast<std::int64_t>(h) * w;
  const std::int64_t count = mv.size() / plane;
  std::vector<int> out_shape(mv.shape().begin(), mv.shape().end() - 2);
  out_shape.push_back(2);
  NdArray<T> out(out_shape);
  const T inv_h = T(1) / static_cast<T>(h - 1);
  const T inv_w = T(1) / static_cast<T>(w - 1);
  for (std::int64_t m = 0; m < count; ++m) {
    const T* src = mv.data() + m * plane;
    T ex = T(0), ey = T(0);
    for (int i = 0; i < h; ++i) {
      const T* row = src + static_cast<std::int64_t>(i) * w;
      T row_sum = T(0), row_dot = T(0);
      for (int j = 0; j < w; ++j) {
        row_sum += row[j];
        row_dot += row[j] * static_cast<T>(j);
      }
      ex += row_sum * static_cast<T>(i);
      ey += row_dot;
    }
    out[m * 2] = ex * inv_h;
    out[m * 2 + 1] = ey * inv_w;
  }
  auto backward = [count, plane, h, w, inv_h, inv_w](Tape<T>& tape, int id) {
    auto& n = tape.node(id);
    const int p = n.parents[0];
    if (!tape.needs_grad(p)) return;
    NdArray<T>& gin = tape.grad(p);
    for (std::int64_t m = 0; m < count; ++m) {
      const T gx = n.grad[m * 2] * inv_h;
      const T gy = n.grad[m * 2 + 1] * inv_w;
      T* dst = gin.data() + m * plane;
      for (int i = 0; i < h; ++i) {
        T* row = dst + static_cast<std::int64_t>(i) * w;
        const T base = gx * static_cast<T>(i);
        for (int j = 0; j < w; ++j) row[j] += base + gy * static_cast<T>(j);
      }
    }
  };
  return maps.tape->emplace(std::move(out), {maps.id}, backward, "soft_argmax");
}

#define STMC_INSTANTIATE_SOFTMAX(T)        \
  template Var<T> row_softmax(Var<T>);     \
  template Var<T> spatial_softmax(Var<T>); \
  template Var<T> soft_argmax(Var<T>);

STMC_INSTANTIATE_SOFTMAX(float)
STMC_INSTANTIATE_SOFTMAX(double)

}  // namespace stmc
