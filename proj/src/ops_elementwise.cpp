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

#include <cmath>

#include "stmc/ops.h"

namespace stmc {

namespace {

template <typename T>
void check_same_tape(Var<T> a, Var<T> b, const char* op) {
  STMC_CHECK(a.valid() && b.valid() && a.tape == b.tape,
             op << ": operands must live on one tape");
}

}  // namespace

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  check_same_tape(a, b, "add");
  const NdArray<T>& av = a.value();
  const NdArray<T>& bv = b.value();
  STMC_CHECK_SHAPE(av.same_shape(bv), "add: shape mismatch " << shape_string(av.shape())
                                                             << " vs "
                                                             << shape_string(bv.shape()));
  NdArray<T> out(av.shape());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return a.tape->emplace(
      std::move(out), {a.id, b.id},
      [](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        for (int p : n.parents) {
          if (!tape.needs_grad(p)) continue;
          tape.grad(p).add_inplace(n.grad);
        }
      },
      "add");
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
  check_same_tape(a, b, "sub");
  const NdArray<T>& av = a.value();
  const NdArray<T>& bv = b.value();
  STMC_CHECK_SHAPE(av.same_shape(bv), "sub: shape mismatch " << shape_string(av.shape())
                                                             << " vs "
                                                             << shape_string(bv.shape()));
  NdArray<T> out(av.shape());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return a.tape->emplace(
      std::move(out), {a.id, b.id},
      [](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        if (tape.needs_grad(n.parents[0])) tape.grad(n.parents[0]).add_inplace(n.grad);
        if (tape.needs_grad(n.parents[1])) {
          NdArray<T>& g = tape.grad(n.parents[1]);
          for (std::int64_t i = 0; i < g.size(); ++i) g[i] -= n.grad[i];
        }
      },
      "sub");
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  check_same_tape(a, b, "mul");
  const NdArray<T>& av = a.value();
  const NdArray<T>& bv = b.value();
  STMC_CHECK_SHAPE(av.same_shape(bv), "mul: shape mismatch " << shape_string(av.shape())
                                                             << " vs "
                                                             << shape_string(bv.shape()));
  NdArray<T> out(av.shape());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return a.tape->emplace(
      std::move(out), {a.id, b.id},
      [](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        int pa = n.parents[0], pb = n.parents[1];
        const NdArray<T>& av = tape.value(pa);
        const NdArray<T>& bv = tape.value(pb);
        if (tape.needs_grad(pa)) {
          NdArray<T>& g = tape.grad(pa);
          for (std::int64_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * bv[i];
        }
        if (tape.needs_grad(pb)) {
          NdArray<T>& g = tape.grad(pb);
          for (std::int64_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * av[i];
        }
      },
      "mul");
}

template <typename T>
Var<T> scale(Var<T> a, T c) {
  const NdArray<T>& av = a.value();
  NdArray<T> out(av.shape());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] * c;
  return a.tape->emplace(
      std::move(out), {a.id},
      [c](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        if (!tape.needs_grad(n.parents[0])) return;
        NdArray<T>& g = tape.grad(n.parents[0]);
        for (std::int64_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * c;
      },
      "scale");
}

template <typename T>
Var<T> sum(Var<T> a) {
  const NdArray<T>& av = a.value();
  T acc = T(0);
  for (std::int64_t i = 0; i < av.size(); ++i) acc += av[i];
  NdArray<T> out({1});
  out[0] = acc;
  return a.tape->emplace(
      std::move(out), {a.id},
      [](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        if (!tape.needs_grad(n.parents[0])) return;
        NdArray<T>& g = tape.grad(n.parents[0]);
        T go = n.grad[0];
        for (std::int64_t i = 0; i < g.size(); ++i) g[i] += go;
      },
      "sum");
}

template <typename T>
Var<T> relu(Var<T> a) {
  const NdArray<T>& av = a.value();
  NdArray<T> out(av.shape());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] > T(0) ? av[i] : T(0);
  return a.tape->emplace(
      std::move(out), {a.id},
      [](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        int p = n.parents[0];
        if (!tape.needs_grad(p)) return;
        const NdArray<T>& x = tape.value(p);
        NdArray<T>& g = tape.grad(p);
        // subgradient 0 at x == 0
        for (std::int64_t i = 0; i < g.size(); ++i)
          if (x[i] > T(0)) g[i] += n.grad[i];
      },
      "relu");
}

template <typename T>
Var<T> sigmoid(Var<T> a) {
  const NdArray<T>& av = a.value();
  NdArray<T> out(av.shape());
  for (std::int64_t i = 0; i < out.size(); ++i)
    out[i] = T(1) / (T(1) + std::exp(-av[i]));
  return a.tape->emplace(
      std::move(out), {a.id},
      [](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        int p = n.parents[0];
        if (!tape.needs_grad(p)) return;
        NdArray<T>& g = tape.grad(p);
        const NdArray<T>& y = n.value;
        for (std::int64_t i = 0; i < g.size(); ++i)
          g[i] += n.grad[i] * y[i] * (T(1) - y[i]);
      },
      "sigmoid");
}

template <typename T>
Var<T> tanh_op(Var<T> a) {
  const NdArray<T>& av = a.value();
  NdArray<T> out(av.shape());
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = std::tanh(av[i]);
  return a.tape->emplace(
      std::move(out), {a.id},
      [](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        int p = n.parents[0];
        if (!tape.needs_grad(p)) return;
        NdArray<T>& g = tape.grad(p);
        const NdArray<T>& y = n.value;
        for (std::int64_t i = 0; i < g.size(); ++i)
          g[i] += n.grad[i] * (T(1) - y[i] * y[i]);
      },
      "tanh");
}

template <typename T>
Var<T> reshape(Var<T> a, std::vector<int> shape) {
  const NdArray<T>& av = a.value();
  STMC_CHECK_SHAPE(NdArray<T>::count(shape) == av.size(),
                   "reshape: cannot view " << shape_string(av.shape()) << " as "
                                           << shape_string(shape));
  NdArray<T> out(std::move(shape), av.vec());
  return a.tape->emplace(
      std::move(out), {a.id},
      [](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        int p = n.parents[0];
        if (!tape.needs_grad(p)) return;
        NdArray<T>& g = tape.grad(p);
        for (std::int64_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
      },
      "reshape");
}

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& parts) {
  STMC_CHECK_SHAPE(!parts.empty(), "concat_channels: no parts");
  Tape<T>* tape = parts[0].tape;
  const NdArray<T>& first = parts[0].value();
  int rank = first.rank();
  std::vector<int> lead(first.shape().begin(), first.shape().end() - 1);
  int total_c = 0;
  std::vector<int> ids;
  for (const Var<T>& p : parts) {
    STMC_CHECK(p.tape == tape, "concat_channels: operands must live on one tape");
    const NdArray<T>& v = p.value();
    STMC_CHECK_SHAPE(v.rank() == rank, "concat_channels: rank mismatch");
    for (int ax = 0; ax + 1 < rank; ++ax)
      STMC_CHECK_SHAPE(v.dim(ax) == lead[static_cast<size_t>(ax)],
                       "concat_channels: extent mismatch on axis "
                           << ax << ": " << shape_string(v.shape()) << " vs "
                           << shape_string(first.shape()));
    total_c += v.dim(rank - 1);
    ids.push_back(p.id);
  }
  std::int64_t outer = 1;
  for (int d : lead) outer *= d;
  std::vector<int> out_shape = lead;
  out_shape.push_back(total_c);
  NdArray<T> out(out_shape);
  int off = 0;
  for (const Var<T>& p : parts) {
    const NdArray<T>& v = p.value();
    int c = v.dim(rank - 1);
    for (std::int64_t r = 0; r < outer; ++r)
      for (int j = 0; j < c; ++j) out[r * total_c + off + j] = v[r * c + j];
    off += c;
  }
  return tape->emplace(
      std::move(out), std::move(ids),
      [outer, total_c](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        int off = 0;
        for (int p : n.parents) {
          const NdArray<T>& v = tape.value(p);
          int c = v.dim(-1);
          if (tape.needs_grad(p)) {
            NdArray<T>& g = tape.grad(p);
            for (std::int64_t r = 0; r < outer; ++r)
              for (int j = 0; j < c; ++j) g[r * c + j] += n.grad[r * total_c + off + j];
          }
          off += c;
        }
      },
      "concat_channels");
}

template <typename T>
Var<T> slice_channels(Var<T> a, int offset, int width) {
  const NdArray<T>& av = a.value();
  int c = av.dim(-1);
  STMC_CHECK_SHAPE(offset >= 0 && width >= 1 && offset + width <= c,
                   "slice_channels: [" << offset << "," << offset + width
                                       << ") out of range for width " << c);
  std::vector<int> out_shape = av.shape();
  out_shape.back() = width;
  std::int64_t outer = av.size() / c;
  NdArray<T> out(out_shape);
  for (std::int64_t r = 0; r < outer; ++r)
    for (int j = 0; j < width; ++j) out[r * width + j] = av[r * c + offset + j];
  return a.tape->emplace(
      std::move(out), {a.id},
      [offset, width, c, outer](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        int p = n.parents[0];
        if (!tape.needs_grad(p)) return;
        NdArray<T>& g = tape.grad(p);
        for (std::int64_t r = 0; r < outer; ++r)
          for (int j = 0; j < width; ++j) g[r * c + offset + j] += n.grad[r * width + j];
      },
      "slice_channels");
}

template <typename T>
Var<T> take_row(Var<T> a, int row) {
  const NdArray<T>& av = a.value();
  STMC_CHECK_SHAPE(av.rank() >= 2, "take_row: need rank >= 2");
  int rows = av.dim(0);
  STMC_CHECK_SHAPE(row >= 0 && row < rows, "take_row: row " << row << " of " << rows);
  std::vector<int> out_shape(av.shape().begin() + 1, av.shape().end());
  std::int64_t stride = av.size() / rows;
  NdArray<T> out(out_shape);
  for (std::int64_t i = 0; i < stride; ++i) out[i] = av[row * stride + i];
  return a.tape->emplace(
      std::move(out), {a.id},
      [row, stride](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        int p = n.parents[0];
        if (!tape.needs_grad(p)) return;
        NdArray<T>& g = tape.grad(p);
        for (std::int64_t i = 0; i < stride; ++i) g[row * stride + i] += n.grad[i];
      },
      "take_row");
}

template <typename T>
Var<T> stack_rows(const std::vector<Var<T>>& rows) {
  STMC_CHECK_SHAPE(!rows.empty(), "stack_rows: no rows");
  Tape<T>* tape = rows[0].tape;
  const NdArray<T>& first = rows[0].value();
  std::int64_t stride = first.size();
  std::vector<int> ids;
  for (const Var<T>& r : rows) {
    STMC_CHECK(r.tape == tape, "stack_rows: operands must live on one tape");
    STMC_CHECK_SHAPE(r.value().same_shape(first), "stack_rows: row shape mismatch");
    ids.push_back(r.id);
  }
  std::vector<int> out_shape;
  out_shape.push_back(static_cast<int>(rows.size()));
  for (int d : first.shape()) out_shape.push_back(d);
  NdArray<T> out(out_shape);
  for (size_t r = 0; r < rows.size(); ++r) {
    const NdArray<T>& v = rows[r].value();
    for (std::int64_t i = 0; i < stride; ++i)
      out[static_cast<std::int64_t>(r) * stride + i] = v[i];
  }
  return tape->emplace(
      std::move(out), std::move(ids),
      [stride](Tape<T>& tape, int id) {
        auto& n = tape.node(id);
        for (size_t r = 0; r < n.parents.size(); ++r) {
          int p = n.parents[r];
          if (!tape.needs_grad(p)) continue;
          NdArray<T>& g = tape.grad(p);
          for (std::int64_t i = 0; i < stride; ++i)
            g[i] += n.grad[static_cast<std::int64_t>(r) * stride + i];
        }
      },
      "stack_rows");
}

#define STMC_INSTANTIATE_ELEMENTWISE(T)                                     \
  template Var<T> add(Var<T>, Var<T>);                                     \
  template Var<T> sub(Var<T>, Var<T>);                                     \
  template Var<T> mul(Var<T>, Var<T>);                                     \
  template Var<T> scale(Var<T>, T);                                        \
  template Var<T> sum(Var<T>);                                             \
  template Var<T> relu(Var<T>);                                            \
  template Var<T> sigmoid(Var<T>);                                         \
  template Var<T> tanh_op(Var<T>);                                         \
  template Var<T> reshape(Var<T>, std::vector<int>);                       \
  template Var<T> concat_channels(const std::vector<Var<T>>&);             \
  template Var<T> slice_channels(Var<T>, int, int);                        \
  template Var<T> take_row(Var<T>, int);                                   \
  template Var<T> stack_rows(const std::vector<Var<T>>&);

STMC_INSTANTIATE_ELEMENTWISE(float)
STMC_INSTANTIATE_ELEMENTWISE(double)

}  // namespace stmc
