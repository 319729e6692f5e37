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

#ifndef STMC_VOCAB_H_
#define STMC_VOCAB_H_

#include <string>
#include <vector>

#include "stmc/common.h"

namespace stmc {

// Gloss inventory extended with the blank label at index 0. Gloss indices
// run 1..num_glosses(); targets never contain blank.
class Vocabulary {
 public:
  static constexpr int kBlank = 0;

  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> glosses) : glosses_(std::move(glosses)) {
    for (size_t i = 0; i < glosses_.size(); ++i)
      for (size_t j = i + 1; j < glosses_.size(); ++j)
        STMC_CHECK_DATA(glosses_[i] != glosses_[j],
                        "duplicate gloss in vocabulary: " << glosses_[i]);
  }

  int size() const { return static_cast<int>(glosses_.size()) + 1; }  // |V|
  int num_glosses() const { return static_cast<int>(glosses_.size()); }

  const std::string& gloss(int index) const {
    STMC_CHECK_DATA(index >= 1 && index <= num_glosses(),
                    "gloss index " << index << " out of range");
    return glosses_[static_cast<size_t>(index - 1)];
  }

  int index_of(const std::string& name) const {
    for (size_t i = 0; i < glosses_.size(); ++i)
      if (glosses_[i] == name) return static_cast<int>(i) + 1;
    STMC_CHECK_DATA(false, "unknown gloss: " << name);
    return -1;
  }

  const std::vector<std::string>& glosses() const { return glosses_; }

  std::string render(const std::vector<int>& seq) const {
    std::string out;
    for (size_t i = 0; i < seq.size(); ++i) {
      if (i) out += ' ';
      out += gloss(seq[i]);
    }
    return out;
  }

 private:
  std::vector<std::string> glosses_;
};

}  // namespace stmc

#endif  // STMC_VOCAB_H_
