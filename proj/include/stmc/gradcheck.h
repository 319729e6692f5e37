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

#ifndef STMC_GRADCHECK_H_
#define STMC_GRADCHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "stmc/params.h"

namespace stmc {

struct GradCheckOptions {
  double eps = 1e-5;
  double tolerance = 1e-4;
  // Relative slope difference of the two one-sided differences above which a
  // coordinate is treated as sitting on a nondifferentiable point (ReLU kink,
  // max-pool switch, crop-window rounding) and excluded from the comparison.
  double kink_threshold = 1e-3;
  // Check at most this many coordinates per parameter (0 = all), sampled
  // deterministically.
  int max_coords_per_param = 0;
  std::uint64_t sample_seed = 1;
};

struct GradCheckIssue {
  std::string param;
  std::int64_t coord = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  bool pass = false;
  double max_rel_error = 0.0;
  std::int64_t checked = 0;
  std::int64_t excluded = 0;  // nondifferentiable coordinates skipped
  std::vector<GradCheckIssue> failures;
  GradCheckIssue worst;
};

// Central-difference verification of reverse-mode gradients.
//
// `loss` evaluates the objective as a pure deterministic function of the
// current parameter values. Analytic gradients must already be accumulated
// in each Parameter::grad (one forward+backward at the unperturbed point).
// Non-finite loss values are reported as failures, never skipped.
GradCheckReport check_gradients(const std::function<double()>& loss,
                                std::vector<Parameter<double>*> params,
                                const GradCheckOptions& options);

// Relative error of a against b with an absolute floor for tiny values.
double gradcheck_rel_error(double a, double b);

// Result row of the per-primitive suite.
struct OpCheckResult {
  std::string op;
  GradCheckReport report;
};

// Finite-difference sweep over every differentiable primitive on small
// random instances. `corrupt_fixture` adds a deliberately broken backward
// rule so the harness can prove it reports failures.
std::vector<OpCheckResult> run_primitive_gradient_suite(std::uint64_t seed,
                                                        bool corrupt_fixture = false);

}  // namespace stmc

#endif  // STMC_GRADCHECK_H_
