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

#ifndef STMC_WER_H_
#define STMC_WER_H_

#include <vector>

#include "stmc/common.h"

namespace stmc {

// Minimum-edit alignment counts. WER = (sub+del+ins)/ref_len, which may
// exceed 1. Among equal-cost alignments the lexicographically smallest
// (total, sub, del, ins) is reported, so counts are canonical.
struct EditCounts {
  int sub = 0;
  int del = 0;
  int ins = 0;
  int ref_len = 0;

  int errors() const { return sub + del + ins; }
  double wer() const { return static_cast<double>(errors()) / ref_len; }

  bool operator==(const EditCounts& o) const {
    return sub == o.sub && del == o.del && ins == o.ins && ref_len == o.ref_len;
  }
};

// Dynamic-programming edit distance with unit costs; rejects empty references.
EditCounts wer_counts(const std::vector<int>& reference, const std::vector<int>& hypothesis);

// Exhaustive branch-and-bound over all edit scripts; test oracle.
EditCounts wer_counts_brute_force(const std::vector<int>& reference,
                                  const std::vector<int>& hypothesis);

}  // namespace stmc

#endif  // STMC_WER_H_
