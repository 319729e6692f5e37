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

#ifndef STMC_COMMON_H_
#define STMC_COMMON_H_

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stmc {

// Error taxonomy, mapped to distinct process exit codes by the CLI.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent configuration (unknown key, bad value).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Tensor shape violations (mismatched extents, bad ranks).
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Corrupt or missing datasets, checkpoints, clip files.
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

// Non-finite losses, failed gradient checks.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

namespace detail {
template <typename E>
[[noreturn]] inline void throw_error(const std::ostringstream& oss) {
  throw E(oss.str());
}
}  // namespace detail

#define STMC_CHECK_IMPL(cond, etype, msg)          \
  do {                                             \
    if (!(cond)) {                                 \
      std::ostringstream oss_;                     \
      oss_ << msg;                                 \
      ::stmc::detail::throw_error<etype>(oss_);    \
    }                                              \
  } while (0)

#define STMC_CHECK(cond, msg) STMC_CHECK_IMPL(cond, ::stmc::Error, msg)
#define STMC_CHECK_SHAPE(cond, msg) STMC_CHECK_IMPL(cond, ::stmc::ShapeError, msg)
#define STMC_CHECK_CONFIG(cond, msg) STMC_CHECK_IMPL(cond, ::stmc::ConfigError, msg)
#define STMC_CHECK_DATA(cond, msg) STMC_CHECK_IMPL(cond, ::stmc::DataError, msg)

inline std::string shape_string(const std::vector<int>& shape) {
  std::ostringstream oss;
  oss << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) oss << ",";
    oss << shape[i];
  }
  oss << "]";
  return oss.str();
}

}  // namespace stmc

#endif  // STMC_COMMON_H_
