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

#include "stmc/ops.h"
#include "stmc/threadpool.h"

namespace stmc {

template <typename T>
Var<T> dense(Var<T> x, Var<T> weight, Var<T> bias) {
  const NdArray<T>& xv = x.value();
  const NdArray<T>& wv = weight.value();
  const NdArray<T>& bv = bias.value();
  STMC_CHECK_SHAPE(wv.rank() == 2, "dense: weight must be [C_out,C_in], got "
                                       << shape_string(wv.shape()));
  const int cin = wv.dim(1), cout = wv.dim(0);
  STMC_CHECK_SHAPE(xv.rank() >= 1 && xv.dim(-1) == cin,
                   "dense: trailing extent of " << shape_string(xv.shape())
                                                << " does not match C_in " << cin);
  STMC_CHECK_SHAPE(bv.rank() == 1 && bv.dim(0) == cout, "dense: bad bias shape");
  const std::int64_t rows = xv.size() / cin;

  std::vector<int> out_shape = xv.shape();
  out_shape.back() = cout;
  NdArray<T> out(out_shape);
  const T* xp = xv.data();
  const T* wp = wv.data();
  const T* bp = bv.data();
  T* op = out.data();
  parallel_for(rows, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t r = lo; r < hi; ++r) {
      const T* xrow = xp + r * cin;
      T* orow = op + r * cout;
      for (int o = 0; o < cout; ++o) {
        const T* wrow = wp + static_cast<std::int64_t>(o) * cin;
        T acc = bp[o];
        for (int i = 0; i < cin; ++i) acc += xrow[i] * wrow[i];
        orow[o] = acc;
      }
    }
  });

  auto backward = [rows, cin, cout](Tape<T>& tape, int id) {
    auto& n = tape.node(id);
    const int px = n.parents[0], pw = n.parents[1], pb = n.parents[2];
    const NdArray<T>& gout = n.grad;
    const T* gop = gout.data();
    if (tape.needs_grad(px)) {
      const NdArray<T>& wv = tape.value(pw);
      const T* wp = wv.data();
      NdArray<T>& gin = tape.grad(px);
      T* gip = gin.data();
      parallel_for(rows, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t r = lo; r < hi; ++r) {
          const T* grow = gop + r * cout;
          T* gxrow = gip + r * cin;
          for (int o = 0; o < cout; ++o) {
            const T go = grow[o];
            if (go == T(0)) continue;
            const T* wrow = wp + static_cast<std::int64_t>(o) * cin;
            for (int i = 0; i < cin; ++i) gxrow[i] += go * wrow[i];
          }
        }
      });
    }
    if (tape.needs_grad(pw)) {
      const NdArray<T>& xv = tape.value(px);
      const T* xp = xv.data();
      NdArray<T>& gw = tape.grad(pw);
      T* gwp = gw.data();
      parallel_for(cout, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t o = lo; o < hi; ++o) {
          T* gwrow = gwp + o * cin;
          for (std::int64_t r = 0; r < rows; ++r) {
            const T go = gop[r * cout + o];
            if (go == T(0)) continue;
            const T* xrow = xp + r * cin;
            for (int i = 0; i < cin; ++i) gwrow[i] += go * xrow[i];
          }
        }
      });
    }
    if (tape.needs_grad(pb)) {
      NdArray<T>& gb = tape.grad(pb);
      for (std::int64_t r = 0; r < rows; ++r)
        for (int o = 0; o < cout; ++o) gb[o] += gop[r * cout + o];
    }
  };

  return x.tape->emplace(std::move(out), {x.id, weight.id, bias.id}, backward, "dense");
}

template <typename T>
Var<T> temporal_maxpool(Var<T> x) {
  const NdArray<T>& xv = x.value();
  STMC_CHECK_SHAPE(xv.rank() == 2, "temporal_maxpool: input must be [T,C], got "
                                       << shape_string(xv.shape()));
  const int len = xv.dim(0), c = xv.dim(1);
  STMC_CHECK_SHAPE(len >= 2, "temporal_maxpool: need T >= 2, got " << len);
  const int out_len = len / 2;
  NdArray<T> out({out_len, c});
  // argmax per window; ties go to the earlier frame
  std::vector<std::uint8_t> pick_second(static_cast<size_t>(out_len) * c);
  for (int t = 0; t < out_len; ++t) {
    const T* a = xv.data() + static_cast<std::int64_t>(2 * t) * c;
    const T* b = a + c;
    T* orow = out.data() + static_cast<std::int64_t>(t) * c;
    for (int j = 0; j < c; ++j) {
      if (b[j] > a[j]) {
        orow[j] = b[j];
        pick_second[static_cast<size_t>(t) * c + j] = 1;
      } else {
        orow[j] = a[j];
      }
    }
  }
  auto backward = [out_len, c, pick_second = std::move(pick_second)](Tape<T>& tape,
                                                                     int id) {
    auto& n = tape.node(id);
    const int p = n.parents[0];
    if (!tape.needs_grad(p)) return;
    NdArray<T>& gin = tape.grad(p);
    for (int t = 0; t < out_len; ++t)
      for (int j = 0; j < c; ++j) {
        const int src_t = 2 * t + (pick_second[static_cast<size_t>(t) * c + j] ? 1 : 0);
        gin[static_cast<std::int64_t>(src_t) * c + j] +=
            n.grad[static_cast<std::int64_t>(t) * c + j];
      }
  };
  return x.tape->emplace(std::move(out), {x.id}, backward, "temporal_maxpool");
}

template <typename T>
Var<T> global_avg_pool2d(Var<T> x) {
  const NdArray<T>& xv = x.value();
  STMC_CHECK_SHAPE(xv.rank() == 3 || xv.rank() == 4,
                   "global_avg_pool2d: input must be [C,H,W] or [B,C,H,W]");
  const bool batched = xv.rank() == 4;
  const int batch = batched ? xv.dim(0) : 1;
  const int c = xv.dim(batched ? 1 : 0);
  const int h = xv.dim(batched ? 2 : 1);
  const int w = xv.dim(batched ? 3 : 2);
  const std::int64_t plane = static_cast<std::int64_t>(h) * w;
  NdArray<T> out(batched ? std::vector<int>{batch, c} : std::vector<int>{c});
  const T inv = T(1) / static_cast<T>(plane);
  for (int b = 0; b < batch; ++b)
    for (int j = 0; j < c; ++j) {
      const T* src = xv.data() + (static_cast<std::int64_t>(b) * c + j) * plane;
      T acc = T(0);
      for (std::int64_t i = 0; i < plane; ++i) acc += src[i];
      out[static_cast<std::int64_t>(b) * c + j] = acc * inv;
    }
  auto backward = [batch, c, plane, inv](Tape<T>& tape, int id) {
    auto& n = tape.node(id);
    const int p = n.parents[0];
    if (!tape.needs_grad(p)) return;
    NdArray<T>& gin = tape.grad(p);
    for (int b = 0; b < batch; ++b)
      for (int j = 0; j < c; ++j) {
        const T g = n.grad[static_cast<std::int64_t>(b) * c + j] * inv;
        T* dst = gin.data() + (static_cast<std::int64_t>(b) * c + j) * plane;
        for (std::int64_t i = 0; i < plane; ++i) dst[i] += g;
      }
  };
  return x.tape->emplace(std::move(out), {x.id}, backward, "global_avg_pool2d");
}

#define STMC_INSTANTIATE_LINEAR(T)                       \
  template Var<T> dense(Var<T>, Var<T>, Var<T>);         \
  template Var<T> temporal_maxpool(Var<T>);              \
  template Var<T> global_avg_pool2d(Var<T>);

STMC_INSTANTIATE_LINEAR(float)
STMC_INSTANTIATE_LINEAR(double)

}  // namespace stmc
