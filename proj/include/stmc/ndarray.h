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

#ifndef STMC_NDARRAY_H_
#define STMC_NDARRAY_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "stmc/common.h"

namespace stmc {

// Dense row-major array of real values. The single value type flowing
// through the whole network; autograd lives in Tape, not here.
template <typename T>
class NdArray {
 public:
  NdArray() = default;

  explicit NdArray(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<size_t>(count(shape_)), T(0));
  }

  NdArray(std::vector<int> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    STMC_CHECK_SHAPE(static_cast<std::int64_t>(data_.size()) == count(shape_),
                     "data length " << data_.size() << " does not match shape "
                                    << shape_string(shape_));
  }

  static NdArray full(std::vector<int> shape, T value) {
    NdArray a(std::move(shape));
    for (auto& v : a.data_) v = value;
    return a;
  }

  static std::int64_t count(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) {
      STMC_CHECK_SHAPE(d > 0, "non-positive extent in shape " << shape_string(shape));
      n *= d;
    }
    return n;
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int axis) const {
    if (axis < 0) axis += rank();
    STMC_CHECK_SHAPE(axis >= 0 && axis < rank(),
                     "axis " << axis << " out of range for " << shape_string(shape_));
    return shape_[static_cast<size_t>(axis)];
  }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& vec() { return data_; }
  const std::vector<T>& vec() const { return data_; }

  T& operator[](std::int64_t i) { return data_[static_cast<size_t>(i)]; }
  const T& operator[](std::int64_t i) const { return data_[static_cast<size_t>(i)]; }

  T& at(std::initializer_list<int> idx) { return data_[static_cast<size_t>(offset(idx))]; }
  const T& at(std::initializer_list<int> idx) const {
    return data_[static_cast<size_t>(offset(idx))];
  }

  std::int64_t offset(std::initializer_list<int> idx) const {
    STMC_CHECK_SHAPE(static_cast<int>(idx.size()) == rank(),
                     "index rank " << idx.size() << " vs shape " << shape_string(shape_));
    std::int64_t off = 0;
    int axis = 0;
    for (int i : idx) {
      STMC_CHECK_SHAPE(i >= 0 && i < shape_[static_cast<size_t>(axis)],
                       "index " << i << " out of bounds on axis " << axis << " of "
                                << shape_string(shape_));
      off = off * shape_[static_cast<size_t>(axis)] + i;
      ++axis;
    }
    return off;
  }

  void fill(T value) {
    for (auto& v : data_) v = value;
  }

  void zero() { fill(T(0)); }

  bool same_shape(const NdArray& other) const { return shape_ == other.shape_; }

  bool all_finite() const {
    for (const T& v : data_) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }

  // Accumulate other into this, elementwise.
  void add_inplace(const NdArray& other) {
    STMC_CHECK_SHAPE(same_shape(other), "add_inplace shape mismatch: "
                                            << shape_string(shape_) << " vs "
                                            << shape_string(other.shape_));
    const T* src = other.data();
    T* dst = data();
    for (std::int64_t i = 0; i < size(); ++i) dst[i] += src[i];
  }

  template <typename U>
  NdArray<U> cast() const {
    NdArray<U> out(shape_);
    for (std::int64_t i = 0; i < size(); ++i)
      out[i] = static_cast<U>(data_[static_cast<size_t>(i)]);
    return out;
  }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

}  // namespace stmc

#endif  // STMC_NDARRAY_H_
