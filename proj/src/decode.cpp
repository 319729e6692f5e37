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

#include "stmc/decode.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "stmc/ctc.h"

namespace stmc {

template <typename T>
std::vector<int> greedy_decode(const NdArray<T>& posteriors) {
  STMC_CHECK_SHAPE(posteriors.rank() == 2, "greedy_decode: posteriors must be [T',|V|]");
  const int t_len = posteriors.dim(0);
  const int vocab = posteriors.dim(1);
  std::vector<int> path(static_cast<size_t>(t_len));
  for (int t = 0; t < t_len; ++t) {
    const T* row = posteriors.data() + static_cast<std::int64_t>(t) * vocab;
    int best = 0;
    for (int j = 1; j < vocab; ++j)
      if (row[j] > row[best]) best = j;
    path[static_cast<size_t>(t)] = best;
  }
  return ctc_collapse(path);
}

namespace {

struct PrefixScore {
  double blank = kLogZero;      // paths ending in blank
  double non_blank = kLogZero;  // paths ending in the prefix's last symbol

  double total() const { return log_sum_exp(blank, non_blank); }
};

}  // namespace

template <typename T>
std::vector<int> beam_search_decode(const NdArray<T>& posteriors, int beam_width) {
  STMC_CHECK_SHAPE(posteriors.rank() == 2, "beam_search_decode: posteriors must be [T',|V|]");
  STMC_CHECK(beam_width >= 1, "beam_search_decode: beam width must be >= 1");
  const int t_len = posteriors.dim(0);
  const int vocab = posteriors.dim(1);

  std::map<std::vector<int>, PrefixScore> beams;
  beams[{}] = PrefixScore{0.0, kLogZero};

  std::vector<int> order(static_cast<size_t>(vocab));
  for (int t = 0; t < t_len; ++t) {
    const T* row = posteriors.data() + static_cast<std::int64_t>(t) * vocab;
    // per-frame candidate symbols: top beam_width by probability, ties to
    // the lower index (stable sort on descending probability)
    for (int j = 0; j < vocab; ++j) order[static_cast<size_t>(j)] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return row[a] > row[b]; });
    const int cands = std::min(beam_width, vocab);

    std::map<std::vector<int>, PrefixScore> next;
    for (const auto& [prefix, score] : beams) {
      const double total = score.total();
      for (int c = 0; c < cands; ++c) {
        const int sym = order[static_cast<size_t>(c)];
        const double y = static_cast<double>(row[sym]);
        const double ly = y > 0.0 ? std::log(y) : kLogZero;
        if (sym == 0) {
          PrefixScore& s = next[prefix];
          s.blank = log_sum_exp(s.blank, total + ly);
        } else if (!prefix.empty() && prefix.back() == sym) {
          // same symbol again: merges into the prefix unless a blank
          // separated it, in which case the prefix grows
          PrefixScore& stay = next[prefix];
          stay.non_blank = log_sum_exp(stay.non_blank, score.non_blank + ly);
          std::vector<int> grown = prefix;
          grown.push_back(sym);
          PrefixScore& s = next[grown];
          s.non_blank = log_sum_exp(s.non_blank, score.blank + ly);
        } else {
          std::vector<int> grown = prefix;
          grown.push_back(sym);
          PrefixScore& s = next[grown];
          s.non_blank = log_sum_exp(s.non_blank, total + ly);
        }
      }
    }

    if (static_cast<int>(next.size()) > beam_width) {
      std::vector<std::pair<const std::vector<int>*, double>> ranked;
      ranked.reserve(next.size());
      for (const auto& [prefix, score] : next) ranked.emplace_back(&prefix, score.total());
      // score descending; equal scores keep the lexicographically smaller
      // prefix (map iteration is already lexicographic, sort is stable)
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
      std::map<std::vector<int>, PrefixScore> pruned;
      for (int i = 0; i < beam_width; ++i) pruned[*ranked[static_cast<size_t>(i)].first] =
          next[*ranked[static_cast<size_t>(i)].first];
      next.swap(pruned);
    }
    beams.swap(next);
  }

  const std::vector<int>* best = nullptr;
  double best_score = kLogZero - 1.0;
  for (const auto& [prefix, score] : beams) {
    const double s = score.total();
    if (best == nullptr || s > best_score) {  // ties keep the lex-smaller prefix
      best = &prefix;
      best_score = s;
    }
  }
  return best ? *best : std::vector<int>{};
}

#define STMC_INSTANTIATE_DECODE(T)                              \
  template std::vector<int> greedy_decode(const NdArray<T>&);   \
  template std::vector<int> beam_search_decode(const NdArray<T>&, int);

STMC_INSTANTIATE_DECODE(float)
STMC_INSTANTIATE_DECODE(double)

}  // namespace stmc
