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

#include "stmc/ctc.h"

#include <algorithm>
#include <cmath>

namespace stmc {

double log_sum_exp(double a, double b) {
  if (a <= kLogZero) return b;
  if (b <= kLogZero) return a;
  const double mx = std::max(a, b);
  return mx + std::log1p(std::exp(std::min(a, b) - mx));
}

std::vector<int> ctc_collapse(const std::vector<int>& path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int s : path) {
    if (s != prev && s != blank) out.push_back(s);
    prev = s;
  }
  return out;
}

int ctc_min_input_length(const std::vector<int>& target) {
  int dups = 0;
  for (size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++dups;
  return static_cast<int>(target.size()) + dups;
}

bool ctc_admissible(const std::vector<int>& target, int t_len) {
  return t_len >= ctc_min_input_length(target);
}

namespace {

// Blank-interleaved state sequence (-, l1, -, l2, ..., -) of length 2L+1.
struct CtcLattice {
  int t_len = 0;
  int states = 0;
  std::vector<int> label;        // per state
  std::vector<double> log_y;     // [T, S]: log posterior of each state's label
  std::vector<double> alpha;     // [T, S], emission included
  std::vector<double> beta;      // [T, S], emission included
  double log_p = kLogZero;
};

template <typename T>
CtcLattice run_forward_backward(const NdArray<T>& posteriors,
                                const std::vector<int>& target) {
  STMC_CHECK_SHAPE(posteriors.rank() == 2, "ctc_loss: posteriors must be [T',|V|], got "
                                               << shape_string(posteriors.shape()));
  const int t_len = posteriors.dim(0);
  const int vocab = posteriors.dim(1);
  for (int g : target)
    STMC_CHECK(g >= 1 && g < vocab, "ctc_loss: target label " << g
                                                              << " outside vocabulary of "
                                                              << vocab);
  STMC_CHECK(ctc_admissible(target, t_len),
             "ctc_loss: target longer than representable: needs at least "
                 << ctc_min_input_length(target) << " steps, got " << t_len);

  CtcLattice lat;
  lat.t_len = t_len;
  const int len = static_cast<int>(target.size());
  lat.states = 2 * len + 1;
  const int s_count = lat.states;
  lat.label.resize(static_cast<size_t>(s_count));
  for (int s = 0; s < s_count; ++s)
    lat.label[static_cast<size_t>(s)] = (s % 2 == 1) ? target[static_cast<size_t>(s / 2)] : 0;

  lat.log_y.assign(static_cast<size_t>(t_len) * s_count, kLogZero);
  for (int t = 0; t < t_len; ++t)
    for (int s = 0; s < s_count; ++s) {
      const double y =
          static_cast<double>(posteriors[static_cast<std::int64_t>(t) * vocab +
                                         lat.label[static_cast<size_t>(s)]]);
      lat.log_y[static_cast<size_t>(t) * s_count + s] =
          y > 0.0 ? std::log(y) : kLogZero;
    }

  auto ly = [&](int t, int s) { return lat.log_y[static_cast<size_t>(t) * s_count + s]; };
  auto skip_ok = [&](int s) {
    // s-2 -> s allowed for non-blank states with a different previous label
    return s >= 2 && s % 2 == 1 &&
           lat.label[static_cast<size_t>(s)] != lat.label[static_cast<size_t>(s - 2)];
  };

  lat.alpha.assign(static_cast<size_t>(t_len) * s_count, kLogZero);
  lat.alpha[0] = ly(0, 0);
  if (s_count > 1) lat.alpha[1] = ly(0, 1);
  for (int t = 1; t < t_len; ++t)
    for (int s = 0; s < s_count; ++s) {
      double acc = lat.alpha[static_cast<size_t>(t - 1) * s_count + s];
      if (s >= 1)
        acc = log_sum_exp(acc, lat.alpha[static_cast<size_t>(t - 1) * s_count + s - 1]);
      if (skip_ok(s))
        acc = log_sum_exp(acc, lat.alpha[static_cast<size_t>(t - 1) * s_count + s - 2]);
      if (acc > kLogZero)
        lat.alpha[static_cast<size_t>(t) * s_count + s] = acc + ly(t, s);
    }

  lat.beta.assign(static_cast<size_t>(t_len) * s_count, kLogZero);
  lat.beta[static_cast<size_t>(t_len - 1) * s_count + s_count - 1] = ly(t_len - 1, s_count - 1);
  if (s_count > 1)
    lat.beta[static_cast<size_t>(t_len - 1) * s_count + s_count - 2] =
        ly(t_len - 1, s_count - 2);
  for (int t = t_len - 2; t >= 0; --t)
    for (int s = s_count - 1; s >= 0; --s) {
      double acc = lat.beta[static_cast<size_t>(t + 1) * s_count + s];
      if (s + 1 < s_count)
        acc = log_sum_exp(acc, lat.beta[static_cast<size_t>(t + 1) * s_count + s + 1]);
      if (s + 2 < s_count && skip_ok(s + 2))
        acc = log_sum_exp(acc, lat.beta[static_cast<size_t>(t + 1) * s_count + s + 2]);
      if (acc > kLogZero)
        lat.beta[static_cast<size_t>(t) * s_count + s] = acc + ly(t, s);
    }

  lat.log_p = lat.alpha[static_cast<size_t>(t_len - 1) * s_count + s_count - 1];
  if (s_count > 1)
    lat.log_p = log_sum_exp(
        lat.log_p, lat.alpha[static_cast<size_t>(t_len - 1) * s_count + s_count - 2]);
  return lat;
}

}  // namespace

template <typename T>
Var<T> ctc_loss(Var<T> posteriors, const std::vector<int>& target) {
  const NdArray<T>& pv = posteriors.value();
  CtcLattice lat = run_forward_backward(pv, target);
  const int vocab = pv.dim(1);

  NdArray<T> out({1});
  out[0] = static_cast<T>(-lat.log_p);

  auto backward = [lat = std::move(lat), vocab](Tape<T>& tape, int id) {
    auto& n = tape.node(id);
    const int p = n.parents[0];
    if (!tape.needs_grad(p)) return;
    NdArray<T>& gin = tape.grad(p);
    const double gscale = static_cast<double>(n.grad[0]);
    const int s_count = lat.states;
    // dL/dy[t,j] = -exp(LSE_{s: label(s)=j}(alpha+beta) - log_p - 2*log_y)
    for (int t = 0; t < lat.t_len; ++t) {
      // group states by label; labels repeat so accumulate in log space per state
      for (int s = 0; s < s_count; ++s) {
        const size_t ts = static_cast<size_t>(t) * s_count + s;
        if (lat.alpha[ts] <= kLogZero || lat.beta[ts] <= kLogZero) continue;
        const double ly = lat.log_y[ts];
        if (ly <= kLogZero) continue;
        const double contrib = lat.alpha[ts] + lat.beta[ts] - lat.log_p - 2.0 * ly;
        const int j = lat.label[static_cast<size_t>(s)];
        gin[static_cast<std::int64_t>(t) * vocab + j] -=
            static_cast<T>(gscale * std::exp(contrib));
      }
    }
  };

  return posteriors.tape->emplace(std::move(out), {posteriors.id}, backward, "ctc_loss");
}

template <typename T>
double ctc_loss_value(const NdArray<T>& posteriors, const std::vector<int>& target) {
  return -run_forward_backward(posteriors, target).log_p;
}

template <typename T>
std::vector<double> ctc_cut_likelihoods(const NdArray<T>& posteriors,
                                        const std::vector<int>& target) {
  CtcLattice lat = run_forward_backward(posteriors, target);
  std::vector<double> cuts(static_cast<size_t>(lat.t_len), kLogZero);
  for (int t = 0; t < lat.t_len; ++t) {
    double acc = kLogZero;
    for (int s = 0; s < lat.states; ++s) {
      const size_t ts = static_cast<size_t>(t) * lat.states + s;
      if (lat.alpha[ts] <= kLogZero || lat.beta[ts] <= kLogZero) continue;
      // alpha and beta both include the emission at t; divide one out
      acc = log_sum_exp(acc, lat.alpha[ts] + lat.beta[ts] - lat.log_y[ts]);
    }
    cuts[static_cast<size_t>(t)] = acc;
  }
  return cuts;
}

template <typename T>
double ctc_brute_force(const NdArray<T>& posteriors, const std::vector<int>& target) {
  STMC_CHECK_SHAPE(posteriors.rank() == 2, "ctc_brute_force: posteriors must be [T',|V|]");
  const int t_len = posteriors.dim(0);
  const int vocab = posteriors.dim(1);
  double paths = 1.0;
  for (int t = 0; t < t_len; ++t) {
    paths *= vocab;
    STMC_CHECK(paths <= 1e7, "ctc_brute_force: instance too large: |V|^T' = " << vocab
                                                                              << "^" << t_len);
  }
  // depth-first enumeration of every alignment path with a running product
  std::vector<int> next_sym(static_cast<size_t>(t_len), 0);
  std::vector<int> chosen(static_cast<size_t>(t_len), 0);
  std::vector<double> prefix(static_cast<size_t>(t_len) + 1, 1.0);
  double total = 0.0;
  int t = 0;
  while (t >= 0) {
    if (t == t_len) {
      if (ctc_collapse(chosen) == target) total += prefix[static_cast<size_t>(t_len)];
      --t;
      continue;
    }
    if (next_sym[static_cast<size_t>(t)] == vocab) {
      next_sym[static_cast<size_t>(t)] = 0;
      --t;
      continue;
    }
    const int sym = next_sym[static_cast<size_t>(t)]++;
    chosen[static_cast<size_t>(t)] = sym;
    prefix[static_cast<size_t>(t) + 1] =
        prefix[static_cast<size_t>(t)] *
        static_cast<double>(posteriors[static_cast<std::int64_t>(t) * vocab + sym]);
    ++t;
  }
  return total;
}

#define STMC_INSTANTIATE_CTC(T)                                                     \
  template Var<T> ctc_loss(Var<T>, const std::vector<int>&);                        \
  template double ctc_loss_value(const NdArray<T>&, const std::vector<int>&);       \
  template std::vector<double> ctc_cut_likelihoods(const NdArray<T>&,               \
                                                   const std::vector<int>&);        \
  template double ctc_brute_force(const NdArray<T>&, const std::vector<int>&);

STMC_INSTANTIATE_CTC(float)
STMC_INSTANTIATE_CTC(double)

}  // namespace stmc
