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

#include "stmc/ops.h"
#include "stmc/threadpool.h"

namespace stmc {

namespace {

// Valid output range [lo,hi) so that o*stride + k_off - padding stays inside
// [0, in_extent).
void valid_out_range(int out_extent, int in_extent, int stride, int k_off, int padding,
                     int* lo, int* hi) {
  int shift = k_off - padding;  // i = o*stride + shift
  int l = 0;
  if (shift < 0) l = (-shift + stride - 1) / stride;
  int h = out_extent;
  // largest o with o*stride + shift <= in_extent - 1
  int top = in_extent - 1 - shift;
  if (top < 0)
    h = 0;
  else
    h = std::min(out_extent, top / stride + 1);
  *lo = std::min(l, out_extent);
  *hi = std::max(*lo, h);
}

struct ConvDims {
  int batch, cin, h, w, cout, k, oh, ow;
  bool batched;
};

template <typename T>
ConvDims conv_dims(const NdArray<T>& x, const NdArray<T>& kernel, const NdArray<T>& bias,
                   int stride, int padding) {
  STMC_CHECK_SHAPE(x.rank() == 3 || x.rank() == 4,
                   "conv2d: input must be [C,H,W] or [B,C,H,W], got "
                       << shape_string(x.shape()));
  STMC_CHECK_SHAPE(kernel.rank() == 4 && kernel.dim(2) == kernel.dim(3),
                   "conv2d: kernel must be [C_out,C_in,k,k], got "
                       << shape_string(kernel.shape()));
  ConvDims d;
  d.batched = x.rank() == 4;
  d.batch = d.batched ? x.dim(0) : 1;
  d.cin = x.dim(d.batched ? 1 : 0);
  d.h = x.dim(d.batched ? 2 : 1);
  d.w = x.dim(d.batched ? 3 : 2);
  d.cout = kernel.dim(0);
  d.k = kernel.dim(2);
  STMC_CHECK_SHAPE(kernel.dim(1) == d.cin,
                   "conv2d: input has " << d.cin << " channels but kernel "
                                        << shape_string(kernel.shape()) << " expects "
                                        << kernel.dim(1));
  STMC_CHECK_SHAPE(bias.rank() == 1 && bias.dim(0) == d.cout,
                   "conv2d: bias " << shape_string(bias.shape()) << " vs C_out "
                                   << d.cout);
  STMC_CHECK(stride >= 1, "conv2d: stride must be >= 1, got " << stride);
  STMC_CHECK(padding >= 0, "conv2d: negative padding");
  STMC_CHECK_SHAPE(d.k <= d.h + 2 * padding && d.k <= d.w + 2 * padding,
                   "conv2d: kernel " << d.k << " exceeds padded input " << d.h + 2 * padding
                                     << "x" << d.w + 2 * padding);
  d.oh = (d.h + 2 * padding - d.k) / stride + 1;
  d.ow = (d.w + 2 * padding - d.k) / stride + 1;
  return d;
}

}  // namespace

template <typename T>
Var<T> conv2d(Var<T> x, Var<T> kernel, Var<T> bias, int stride, int padding) {
  const NdArray<T>& xv = x.value();
  const NdArray<T>& kv = kernel.value();
  const NdArray<T>& bv = bias.value();
  ConvDims d = conv_dims(xv, kv, bv, stride, padding);

  std::vector<int> out_shape =
      d.batched ? std::vector<int>{d.batch, d.cout, d.oh, d.ow}
                : std::vector<int>{d.cout, d.oh, d.ow};
  NdArray<T> out(out_shape);

  const T* kp = kv.data();
  const T* bp = bv.data();
  const T* xp = xv.data();
  T* op = out.data();
  const std::int64_t in_plane = static_cast<std::int64_t>(d.h) * d.w;
  const std::int64_t out_plane = static_cast<std::int64_t>(d.oh) * d.ow;

  parallel_for(static_cast<std::int64_t>(d.batch) * d.cout, [&](std::int64_t lo,
                                                                std::int64_t hi) {
    for (std::int64_t job = lo; job < hi; ++job) {
      const int b = static_cast<int>(job / d.cout);
      const int co = static_cast<int>(job % d.cout);
      T* dst = op + (static_cast<std::int64_t>(b) * d.cout + co) * out_plane;
      for (std::int64_t i = 0; i < out_plane; ++i) dst[i] = bp[co];
      for (int ci = 0; ci < d.cin; ++ci) {
        const T* src = xp + (static_cast<std::int64_t>(b) * d.cin + ci) * in_plane;
        const T* kslice =
            kp + (static_cast<std::int64_t>(co) * d.cin + ci) * d.k * d.k;
        for (int kh = 0; kh < d.k; ++kh) {
          int ylo, yhi;
          valid_out_range(d.oh, d.h, stride, kh, padding, &ylo, &yhi);
          for (int kw = 0; kw < d.k; ++kw) {
            const T wgt = kslice[kh * d.k + kw];
            if (wgt == T(0)) continue;
            int xlo, xhi;
            valid_out_range(d.ow, d.w, stride, kw, padding, &xlo, &xhi);
            for (int oy = ylo; oy < yhi; ++oy) {
              const int iy = oy * stride + kh - padding;
              const T* srow = src + static_cast<std::int64_t>(iy) * d.w + kw - padding;
              T* drow = dst + static_cast<std::int64_t>(oy) * d.ow;
              if (stride == 1) {
                for (int ox = xlo; ox < xhi; ++ox) drow[ox] += wgt * srow[ox];
              } else {
                for (int ox = xlo; ox < xhi; ++ox)
                  drow[ox] += wgt * srow[static_cast<std::int64_t>(ox) * stride];
              }
            }
          }
        }
      }
    }
  });

  auto backward = [d, stride, padding](Tape<T>& tape, int id) {
    auto& n = tape.node(id);
    const int px = n.parents[0], pk = n.parents[1], pb = n.parents[2];
    const NdArray<T>& gout = n.grad;
    const NdArray<T>& xv = tape.value(px);
    const NdArray<T>& kv = tape.value(pk);
    const std::int64_t in_plane = static_cast<std::int64_t>(d.h) * d.w;
    const std::int64_t out_plane = static_cast<std::int64_t>(d.oh) * d.ow;
    const T* gop = gout.data();
    const T* kp = kv.data();
    const T* xp = xv.data();

    if (tape.needs_grad(px)) {
      NdArray<T>& gin = tape.grad(px);
      T* gip = gin.data();
      parallel_for(d.batch, [&](std::int64_t blo, std::int64_t bhi) {
        for (std::int64_t b = blo; b < bhi; ++b) {
          for (int co = 0; co < d.cout; ++co) {
            const T* gsrc = gop + (b * d.cout + co) * out_plane;
            for (int ci = 0; ci < d.cin; ++ci) {
              T* gdst = gip + (b * d.cin + ci) * in_plane;
              const T* kslice =
                  kp + (static_cast<std::int64_t>(co) * d.cin + ci) * d.k * d.k;
              for (int kh = 0; kh < d.k; ++kh) {
                int ylo, yhi;
                valid_out_range(d.oh, d.h, stride, kh, padding, &ylo, &yhi);
                for (int kw = 0; kw < d.k; ++kw) {
                  const T wgt = kslice[kh * d.k + kw];
                  if (wgt == T(0)) continue;
                  int xlo, xhi;
                  valid_out_range(d.ow, d.w, stride, kw, padding, &xlo, &xhi);
                  for (int oy = ylo; oy < yhi; ++oy) {
                    const int iy = oy * stride + kh - padding;
                    T* grow = gdst + static_cast<std::int64_t>(iy) * d.w + kw - padding;
                    const T* srow = gsrc + static_cast<std::int64_t>(oy) * d.ow;
                    if (stride == 1) {
                      for (int ox = xlo; ox < xhi; ++ox) grow[ox] += wgt * srow[ox];
                    } else {
                      for (int ox = xlo; ox < xhi; ++ox)
                        grow[static_cast<std::int64_t>(ox) * stride] += wgt * srow[ox];
                    }
                  }
                }
              }
            }
          }
        }
      });
    }

    const bool want_k = tape.needs_grad(pk);
    const bool want_b = tape.needs_grad(pb);
    if (want_k || want_b) {
      NdArray<T>* gk = want_k ? &tape.grad(pk) : nullptr;
      NdArray<T>* gb = want_b ? &tape.grad(pb) : nullptr;
      parallel_for(d.cout, [&](std::int64_t clo, std::int64_t chi) {
        for (std::int64_t co = clo; co < chi; ++co) {
          T bias_acc = T(0);
          for (int b = 0; b < d.batch; ++b) {
            const T* gsrc = gop + (static_cast<std::int64_t>(b) * d.cout + co) * out_plane;
            if (want_b)
              for (std::int64_t i = 0; i < out_plane; ++i) bias_acc += gsrc[i];
            if (!want_k) continue;
            for (int ci = 0; ci < d.cin; ++ci) {
              const T* src = xp + (static_cast<std::int64_t>(b) * d.cin + ci) * in_plane;
              T* kslice =
                  gk->data() + (co * d.cin + ci) * d.k * d.k;
              for (int kh = 0; kh < d.k; ++kh) {
                int ylo, yhi;
                valid_out_range(d.oh, d.h, stride, kh, padding, &ylo, &yhi);
                for (int kw = 0; kw < d.k; ++kw) {
                  int xlo, xhi;
                  valid_out_range(d.ow, d.w, stride, kw, padding, &xlo, &xhi);
                  T acc = T(0);
                  for (int oy = ylo; oy < yhi; ++oy) {
                    const int iy = oy * stride + kh - padding;
                    const T* srow =
                        src + static_cast<std::int64_t>(iy) * d.w + kw - padding;
                    const T* grow = gsrc + static_cast<std::int64_t>(oy) * d.ow;
                    if (stride == 1) {
                      for (int ox = xlo; ox < xhi; ++ox) acc += srow[ox] * grow[ox];
                    } else {
                      for (int ox = xlo; ox < xhi; ++ox)
                        acc += srow[static_cast<std::int64_t>(ox) * stride] * grow[ox];
                    }
                  }
                  kslice[kh * d.k + kw] += acc;
                }
              }
            }
          }
          if (want_b) gb->data()[co] += bias_acc;
        }
      });
    }
  };

  return x.tape->emplace(std::move(out), {x.id, kernel.id, bias.id}, backward, "conv2d");
}

template <typename T>
Var<T> conv_transpose2d(Var<T> x, Var<T> kernel, Var<T> bias, int padding) {
  const NdArray<T>& xv = x.value();
  const NdArray<T>& kv = kernel.value();
  const NdArray<T>& bv = bias.value();
  STMC_CHECK_SHAPE(xv.rank() == 3 || xv.rank() == 4,
                   "conv_transpose2d: input must be [C,H,W] or [B,C,H,W]");
  STMC_CHECK_SHAPE(kv.rank() == 4 && kv.dim(2) == kv.dim(3),
                   "conv_transpose2d: kernel must be [C_in,C_out,k,k], got "
                       << shape_string(kv.shape()));
  const bool batched = xv.rank() == 4;
  const int batch = batched ? xv.dim(0) : 1;
  const int cin = xv.dim(batched ? 1 : 0);
  const int hi = xv.dim(batched ? 2 : 1);
  const int wi = xv.dim(batched ? 3 : 2);
  const int cout = kv.dim(1);
  const int k = kv.dim(2);
  STMC_CHECK_SHAPE(kv.dim(0) == cin, "conv_transpose2d: input has "
                                         << cin << " channels but kernel "
                                         << shape_string(kv.shape()) << " expects "
                                         << kv.dim(0));
  STMC_CHECK_SHAPE(bv.rank() == 1 && bv.dim(0) == cout,
                   "conv_transpose2d: bias " << shape_string(bv.shape()) << " vs C_out "
                                             << cout);
  // (H-1)*2 - 2p + k == 2H requires k == 2p + 2.
  STMC_CHECK(k == 2 * padding + 2,
             "conv_transpose2d: kernel " << k << " with padding " << padding
                                         << " cannot produce exact 2x upsampling");
  const int ho = 2 * hi, wo = 2 * wi;
  std::vector<int> out_shape = batched ? std::vector<int>{batch, cout, ho, wo}
                                       : std::vector<int>{cout, ho, wo};
  NdArray<T> out(out_shape);
  const std::int64_t in_plane = static_cast<std::int64_t>(hi) * wi;
  const std::int64_t out_plane = static_cast<std::int64_t>(ho) * wo;
  const T* xp = xv.data();
  const T* kp = kv.data();
  const T* bp = bv.data();
  T* op = out.data();

  parallel_for(static_cast<std::int64_t>(batch) * cout, [&](std::int64_t lo,
                                                            std::int64_t hi_job) {
    for (std::int64_t job = lo; job < hi_job; ++job) {
      const int b = static_cast<int>(job / cout);
      const int co = static_cast<int>(job % cout);
      T* dst = op + (static_cast<std::int64_t>(b) * cout + co) * out_plane;
      for (std::int64_t i = 0; i < out_plane; ++i) dst[i] = bp[co];
      for (int ci = 0; ci < cin; ++ci) {
        const T* src = xp + (static_cast<std::int64_t>(b) * cin + ci) * in_plane;
        const T* kslice = kp + (static_cast<std::int64_t>(ci) * cout + co) * k * k;
        for (int iy = 0; iy < hi; ++iy) {
          for (int ix = 0; ix < wi; ++ix) {
            const T v = src[static_cast<std::int64_t>(iy) * wi + ix];
            if (v == T(0)) continue;
            for (int kh = 0; kh < k; ++kh) {
              const int oy = 2 * iy - padding + kh;
              if (oy < 0 || oy >= ho) continue;
              for (int kw = 0; kw < k; ++kw) {
                const int ox = 2 * ix - padding + kw;
                if (ox < 0 || ox >= wo) continue;
                dst[static_cast<std::int64_t>(oy) * wo + ox] += v * kslice[kh * k + kw];
              }
            }
          }
        }
      }
    }
  });

  auto backward = [batch, cin, cout, hi, wi, ho, wo, k, padding](Tape<T>& tape, int id) {
    auto& n = tape.node(id);
    const int px = n.parents[0], pk = n.parents[1], pb = n.parents[2];
    const NdArray<T>& gout = n.grad;
    const NdArray<T>& xv = tape.value(px);
    const NdArray<T>& kv = tape.value(pk);
    const std::int64_t in_plane = static_cast<std::int64_t>(hi) * wi;
    const std::int64_t out_plane = static_cast<std::int64_t>(ho) * wo;
    const T* gop = gout.data();
    const T* kp = kv.data();
    const T* xp = xv.data();

    if (tape.needs_grad(px)) {
      NdArray<T>& gin = tape.grad(px);
      T* gip = gin.data();
      parallel_for(batch, [&](std::int64_t blo, std::int64_t bhi) {
        for (std::int64_t b = blo; b < bhi; ++b) {
          for (int ci = 0; ci < cin; ++ci) {
            T* gdst = gip + (b * cin + ci) * in_plane;
            for (int co = 0; co < cout; ++co) {
              const T* gsrc = gop + (b * cout + co) * out_plane;
              const T* kslice = kp + (static_cast<std::int64_t>(ci) * cout + co) * k * k;
              for (int iy = 0; iy < hi; ++iy) {
                for (int ix = 0; ix < wi; ++ix) {
                  T acc = T(0);
                  for (int kh = 0; kh < k; ++kh) {
                    const int oy = 2 * iy - padding + kh;
                    if (oy < 0 || oy >= ho) continue;
                    for (int kw = 0; kw < k; ++kw) {
                      const int ox = 2 * ix - padding + kw;
                      if (ox < 0 || ox >= wo) continue;
                      acc += gsrc[static_cast<std::int64_t>(oy) * wo + ox] *
                             kslice[kh * k + kw];
                    }
                  }
                  gdst[static_cast<std::int64_t>(iy) * wi + ix] += acc;
                }
              }
            }
          }
        }
      });
    }

    if (tape.needs_grad(pk)) {
      NdArray<T>& gk = tape.grad(pk);
      T* gkp = gk.data();
      parallel_for(cin, [&](std::int64_t clo, std::int64_t chi) {
        for (std::int64_t ci = clo; ci < chi; ++ci) {
          for (int co = 0; co < cout; ++co) {
            T* kslice = gkp + (ci * cout + co) * k * k;
            for (int b = 0; b < batch; ++b) {
              const T* src = xp + (static_cast<std::int64_t>(b) * cin + ci) * in_plane;
              const T* gsrc =
                  gop + (static_cast<std::int64_t>(b) * cout + co) * out_plane;
              for (int iy = 0; iy < hi; ++iy) {
                for (int ix = 0; ix < wi; ++ix) {
                  const T v = src[static_cast<std::int64_t>(iy) * wi + ix];
                  if (v == T(0)) continue;
                  for (int kh = 0; kh < k; ++kh) {
                    const int oy = 2 * iy - padding + kh;
                    if (oy < 0 || oy >= ho) continue;
                    for (int kw = 0; kw < k; ++kw) {
                      const int ox = 2 * ix - padding + kw;
                      if (ox < 0 || ox >= wo) continue;
                      kslice[kh * k + kw] +=
                          v * gsrc[static_cast<std::int64_t>(oy) * wo + ox];
                    }
                  }
                }
              }
            }
          }
        }
      });
    }

    if (tape.needs_grad(pb)) {
      NdArray<T>& gb = tape.grad(pb);
      for (int b = 0; b < batch; ++b)
        for (int co = 0; co < cout; ++co) {
          const T* gsrc = gop + (static_cast<std::int64_t>(b) * cout + co) * out_plane;
          T acc = T(0);
          for (std::int64_t i = 0; i < out_plane; ++i) acc += gsrc[i];
          gb[co] += acc;
        }
    }
  };

  return x.tape->emplace(std::move(out), {x.id, kernel.id, bias.id}, backward,
                         "conv_transpose2d");
}

template <typename T>
Var<T> temporal_conv1d(Var<T> x, Var<T> kernel, Var<T> bias) {
  const NdArray<T>& xv = x.value();
  const NdArray<T>& kv = kernel.value();
  const NdArray<T>& bv = bias.value();
  STMC_CHECK_SHAPE(xv.rank() == 2, "temporal_conv1d: input must be [T,C_in], got "
                                       << shape_string(xv.shape()));
  STMC_CHECK_SHAPE(kv.rank() == 3, "temporal_conv1d: kernel must be [C_out,C_in,k]");
  const int len = xv.dim(0), cin = xv.dim(1);
  const int cout = kv.dim(0), k = kv.dim(2);
  STMC_CHECK(k % 2 == 1, "temporal_conv1d: kernel size must be odd, got " << k);
  STMC_CHECK_SHAPE(kv.dim(1) == cin, "temporal_conv1d: input has "
                                         << cin << " channels but kernel expects "
                                         << kv.dim(1));
  STMC_CHECK_SHAPE(bv.rank() == 1 && bv.dim(0) == cout, "temporal_conv1d: bad bias shape");
  const int pad = (k - 1) / 2;

  NdArray<T> out({len, cout});
  for (int t = 0; t < len; ++t) {
    for (int co = 0; co < cout; ++co) {
      T acc = bv[co];
      for (int d = 0; d < k; ++d) {
        const int ti = t + d - pad;
        if (ti < 0 || ti >= len) continue;
        const T* xrow = xv.data() + static_cast<std::int64_t>(ti) * cin;
        const T* krow = kv.data() + (static_cast<std::int64_t>(co) * cin) * k + d;
        for (int ci = 0; ci < cin; ++ci) acc += xrow[ci] * krow[static_cast<std::int64_t>(ci) * k];
      }
      out[static_cast<std::int64_t>(t) * cout + co] = acc;
    }
  }

  auto backward = [len, cin, cout, k, pad](Tape<T>& tape, int id) {
    auto& n = tape.node(id);
    const int px = n.parents[0], pk = n.parents[1], pb = n.parents[2];
    const NdArray<T>& gout = n.grad;
    const NdArray<T>& xv = tape.value(px);
    const NdArray<T>& kv = tape.value(pk);
    if (tape.needs_grad(px)) {
      NdArray<T>& gin = tape.grad(px);
      for (int t = 0; t < len; ++t)
        for (int co = 0; co < cout; ++co) {
          const T go = gout[static_cast<std::int64_t>(t) * cout + co];
          if (go == T(0)) continue;
          for (int d = 0; d < k; ++d) {
            const int ti = t + d - pad;
            if (ti < 0 || ti >= len) continue;
            T* grow = gin.data() + static_cast<std::int64_t>(ti) * cin;
            const T* krow = kv.data() + (static_cast<std::int64_t>(co) * cin) * k + d;
            for (int ci = 0; ci < cin; ++ci)
              grow[ci] += go * krow[static_cast<std::int64_t>(ci) * k];
          }
        }
    }
    if (tape.needs_grad(pk)) {
      NdArray<T>& gk = tape.grad(pk);
      for (int t = 0; t < len; ++t)
        for (int co = 0; co < cout; ++co) {
          const T go = gout[static_cast<std::int64_t>(t) * cout + co];
          if (go == T(0)) continue;
          for (int d = 0; d < k; ++d) {
            const int ti = t + d - pad;
            if (ti < 0 || ti >= len) continue;
            const T* xrow = xv.data() + static_cast<std::int64_t>(ti) * cin;
            T* krow = gk.data() + (static_cast<std::int64_t>(co) * cin) * k + d;
            for (int ci = 0; ci < cin; ++ci)
              krow[static_cast<std::int64_t>(ci) * k] += go * xrow[ci];
          }
        }
    }
    if (tape.needs_grad(pb)) {
      NdArray<T>& gb = tape.grad(pb);
      for (int t = 0; t < len; ++t)
        for (int co = 0; co < cout; ++co)
          gb[co] += gout[static_cast<std::int64_t>(t) * cout + co];
    }
  };

  return x.tape->emplace(std::move(out), {x.id, kernel.id, bias.id}, backward,
                         "temporal_conv1d");
}

#define STMC_INSTANTIATE_CONV(T)                                       \
  template Var<T> conv2d(Var<T>, Var<T>, Var<T>, int, int);            \
  template Var<T> conv_transpose2d(Var<T>, Var<T>, Var<T>, int);       \
  template Var<T> temporal_conv1d(Var<T>, Var<T>, Var<T>);

STMC_INSTANTIATE_CONV(float)
STMC_INSTANTIATE_CONV(double)

}  // namespace stmc
