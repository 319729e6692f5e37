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

#include "stmc/wer.h"

#include <algorithm>
#include <cstdlib>

namespace stmc {

namespace {

struct Cell {
  int cost = 0, sub = 0, del = 0, ins = 0;

  bool operator<(const Cell& o) const {
    if (cost != o.cost) return cost < o.cost;
    if (sub != o.sub) return sub < o.sub;
    if (del != o.del) return del < o.del;
    return ins < o.ins;
  }
  Cell plus(int dc, int ds, int dd, int di) const {
    return Cell{cost + dc, sub + ds, del + dd, ins + di};
  }
};

}  // namespace

EditCounts wer_counts(const std::vector<int>& reference,
                      const std::vector<int>& hypothesis) {
  STMC_CHECK(!reference.empty(), "wer: empty reference has no defined rate");
  const int rl = static_cast<int>(reference.size());
  const int hl = static_cast<int>(hypothesis.size());
  // alignment-cost tuples are translation invariant, so the lexicographic
  // minimum over (cost, sub, del, ins) admits the usual DP
  std::vector<Cell> prev(static_cast<size_t>(hl) + 1), cur(static_cast<size_t>(hl) + 1);
  for (int j = 0; j <= hl; ++j) prev[static_cast<size_t>(j)] = Cell{j, 0, 0, j};
  for (int i = 1; i <= rl; ++i) {
    cur[0] = Cell{i, 0, i, 0};
    for (int j = 1; j <= hl; ++j) {
      const bool match =
          reference[static_cast<size_t>(i - 1)] == hypothesis[static_cast<size_t>(j - 1)];
      Cell best = prev[static_cast<size_t>(j - 1)].plus(match ? 0 : 1, match ? 0 : 1, 0, 0);
      best = std::min(best, prev[static_cast<size_t>(j)].plus(1, 0, 1, 0));
      best = std::min(best, cur[static_cast<size_t>(j - 1)].plus(1, 0, 0, 1));
      cur[static_cast<size_t>(j)] = best;
    }
    std::swap(prev, cur);
  }
  const Cell& c = prev[static_cast<size_t>(hl)];
  return EditCounts{c.sub, c.del, c.ins, rl};
}

namespace {

void enumerate_scripts(const std::vector<int>& ref, const std::vector<int>& hyp, size_t i,
                       size_t j, Cell acc, Cell* best, bool* found) {
  const int remaining =
      std::abs(static_cast<int>(ref.size() - i) - static_cast<int>(hyp.size() - j));
  if (*found && acc.cost + remaining > best->cost) return;  // cannot beat the bound
  if (i == ref.size() && j == hyp.size()) {
    if (!*found || acc < *best) {
      *best = acc;
      *found = true;
    }
    return;
  }
  if (i < ref.size() && j < hyp.size()) {
    const bool match = ref[i] == hyp[j];
    enumerate_scripts(ref, hyp, i + 1, j + 1,
                      acc.plus(match ? 0 : 1, match ? 0 : 1, 0, 0), best, found);
  }
  if (i < ref.size()) enumerate_scripts(ref, hyp, i + 1, j, acc.plus(1, 0, 1, 0), best, found);
  if (j < hyp.size()) enumerate_scripts(ref, hyp, i, j + 1, acc.plus(1, 0, 0, 1), best, found);
}

}  // namespace

EditCounts wer_counts_brute_force(const std::vector<int>& reference,
                                  const std::vector<int>& hypothesis) {
  STMC_CHECK(!reference.empty(), "wer: empty reference has no defined rate");
  Cell best;
  bool found = false;
  enumerate_scripts(reference, hypothesis, 0, 0, Cell{}, &best, &found);
  return EditCounts{best.sub, best.del, best.ins, static_cast<int>(reference.size())};
}

}  // namespace stmc
