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

#ifndef STMC_PARAMS_H_
#define STMC_PARAMS_H_

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "stmc/rng.h"
#include "stmc/tape.h"

namespace stmc {

// Registry of model parameters in creation order. Creation order is the
// serialization order, so checkpoints are stable across runs.
template <typename T>
class ParameterStore {
 public:
  explicit ParameterStore(std::uint64_t init_seed) : init_seed_(init_seed) {}

  // Fan-in scaled uniform init, U(-sqrt(3/fan_in), +sqrt(3/fan_in)).
  // The init stream is derived from (seed, creation index) only, so the
  // same architecture and seed always produce the same weights.
  Parameter<T>& create_weight(const std::string& name, std::vector<int> shape,
                              std::int64_t fan_in) {
    Parameter<T>& p = create_raw(name, std::move(shape));
    Rng rng(Rng::derive(init_seed_, 0x57u, static_cast<std::uint64_t>(params_.size())));
    double bound = std::sqrt(3.0 / static_cast<double>(fan_in));
    for (std::int64_t i = 0; i < p.value.size(); ++i)
      p.value[i] = static_cast<T>(rng.uniform(-bound, bound));
    return p;
  }

  Parameter<T>& create_bias(const std::string& name, std::vector<int> shape) {
    return create_raw(name, std::move(shape));  // zero init
  }

  Parameter<T>& create_raw(const std::string& name, std::vector<int> shape) {
    STMC_CHECK(index_.find(name) == index_.end(), "duplicate parameter name: " << name);
    params_.emplace_back();
    Parameter<T>& p = params_.back();
    p.name = name;
    p.value = NdArray<T>(std::move(shape));
    p.grad = NdArray<T>(p.value.shape());
    index_[name] = params_.size() - 1;
    return p;
  }

  Parameter<T>* find(const std::string& name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &params_[it->second];
  }

  size_t size() const { return params_.size(); }
  Parameter<T>& at(size_t i) { return params_[i]; }
  const Parameter<T>& at(size_t i) const { return params_[i]; }

  std::vector<Parameter<T>*> all() {
    std::vector<Parameter<T>*> out;
    out.reserve(params_.size());
    for (auto& p : params_) out.push_back(&p);
    return out;
  }

  void zero_grads() {
    for (auto& p : params_) p.zero_grad();
  }

  std::int64_t total_count() const {
    std::int64_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

 private:
  std::uint64_t init_seed_;
  std::deque<Parameter<T>> params_;
  std::map<std::string, size_t> index_;
};

}  // namespace stmc

#endif  // STMC_PARAMS_H_
