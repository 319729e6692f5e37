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

#ifndef STMC_OPTIMIZER_H_
#define STMC_OPTIMIZER_H_

#include <cmath>
#include <vector>

#include "stmc/params.h"

namespace stmc {

template <typename T>
struct AdamConfig {
  T lr = T(1e-3);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

// Adam with bias correction. Deterministic given parameters and gradients;
// callers zero gradients between steps.
template <typename T>
class AdamOptimizer {
 public:
  AdamOptimizer(ParameterStore<T>& store, AdamConfig<T> cfg)
      : store_(&store), cfg_(cfg) {
    m_.reserve(store.size());
    v_.reserve(store.size());
    for (size_t i = 0; i < store.size(); ++i) {
      m_.emplace_back(store.at(i).value.shape());
      v_.emplace_back(store.at(i).value.shape());
    }
  }

  void step() {
    ++step_count_;
    const T bc1 = T(1) - std::pow(cfg_.beta1, static_cast<T>(step_count_));
    const T bc2 = T(1) - std::pow(cfg_.beta2, static_cast<T>(step_count_));
    for (size_t i = 0; i < store_->size(); ++i) {
      Parameter<T>& p = store_->at(i);
      NdArray<T>& m = m_[i];
      NdArray<T>& v = v_[i];
      for (std::int64_t j = 0; j < p.value.size(); ++j) {
        const T g = p.grad[j];
        m[j] = cfg_.beta1 * m[j] + (T(1) - cfg_.beta1) * g;
        v[j] = cfg_.beta2 * v[j] + (T(1) - cfg_.beta2) * g * g;
        const T mhat = m[j] / bc1;
        const T vhat = v[j] / bc2;
        p.value[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

  long step_count() const { return step_count_; }
  const AdamConfig<T>& config() const { return cfg_; }

  // Moment buffers in store order, exposed for training-state serialization.
  std::vector<NdArray<T>>& first_moments() { return m_; }
  std::vector<NdArray<T>>& second_moments() { return v_; }
  void set_step_count(long n) { step_count_ = n; }

 private:
  ParameterStore<T>* store_;
  AdamConfig<T> cfg_;
  std::vector<NdArray<T>> m_, v_;
  long step_count_ = 0;
};

}  // namespace stmc

#endif  // STMC_OPTIMIZER_H_
