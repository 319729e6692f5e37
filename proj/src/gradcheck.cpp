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

#include "stmc/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "stmc/ctc.h"
#include "stmc/losses.h"
#include "stmc/ops.h"
#include "stmc/rng.h"

namespace stmc {

double gradcheck_rel_error(double a, double b) {
  const double mag = std::max(std::abs(a), std::abs(b));
  if (mag < 1e-8) return 0.0;  // both vanish; central differences are pure noise here
  return std::abs(a - b) / std::max(mag, 1e-6);
}

GradCheckReport check_gradients(const std::function<double()>& loss,
                                std::vector<Parameter<double>*> params,
                                const GradCheckOptions& options) {
  GradCheckReport report;
  const double f0 = loss();
  if (!std::isfinite(f0)) {
    report.failures.push_back({"<base>", 0, 0.0, f0, 1e30});
    return report;
  }
  Rng sampler(options.sample_seed);
  for (Parameter<double>* p : params) {
    std::vector<std::int64_t> coords;
    const std::int64_t n = p->value.size();
    if (options.max_coords_per_param > 0 && n > options.max_coords_per_param) {
      for (int i = 0; i < options.max_coords_per_param; ++i)
        coords.push_back(static_cast<std::int64_t>(sampler.next_u64() %
                                                   static_cast<std::uint64_t>(n)));
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    } else {
      coords.resize(static_cast<size_t>(n));
      for (std::int64_t i = 0; i < n; ++i) coords[static_cast<size_t>(i)] = i;
    }
    for (std::int64_t i : coords) {
      const double orig = p->value[i];
      p->value[i] = orig + options.eps;
      const double fp = loss();
      p->value[i] = orig - options.eps;
      const double fm = loss();
      p->value[i] = orig;
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        report.failures.push_back({p->name, i, p->grad[i],
                                   std::isfinite(fp) ? fm : fp, 1e30});
        continue;
      }
      // one-sided slopes disagree at kinks and crop-window jumps; those
      // coordinates are excluded, not compared
      const double s_plus = (fp - f0) / options.eps;
      const double s_minus = (f0 - fm) / options.eps;
      const double slope_mag = std::max({std::abs(s_plus), std::abs(s_minus), 1.0});
      if (std::abs(s_plus - s_minus) > options.kink_threshold * slope_mag) {
        ++report.excluded;
        continue;
      }
      const double numeric = (fp - fm) / (2.0 * options.eps);
      const double analytic = p->grad[i];
      const double rel = gradcheck_rel_error(analytic, numeric);
      ++report.checked;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst = {p->name, i, analytic, numeric, rel};
      }
      if (rel > options.tolerance)
        report.failures.push_back({p->name, i, analytic, numeric, rel});
    }
  }
  report.pass = report.failures.empty();
  return report;
}

namespace {

using DVar = Var<double>;
using Builder = std::function<DVar(Tape<double>&, const std::vector<DVar>&)>;

struct SuiteCase {
  std::string name;
  std::vector<NdArray<double>> inputs;
  Builder build;
};

NdArray<double> random_array(std::vector<int> shape, Rng* rng, double lo = -1.0,
                             double hi = 1.0) {
  NdArray<double> a(std::move(shape));
  for (std::int64_t i = 0; i < a.size(); ++i) a[i] = rng->uniform(lo, hi);
  return a;
}

// Keep values away from 0 so ReLU / max-pool kinks cannot fall inside the
// finite-difference step.
NdArray<double> random_array_off_kink(std::vector<int> shape, Rng* rng) {
  NdArray<double> a(std::move(shape));
  for (std::int64_t i = 0; i < a.size(); ++i) {
    double v = rng->uniform(0.05, 1.0);
    a[i] = rng->bernoulli(0.5) ? v : -v;
  }
  return a;
}

GradCheckReport run_case(const SuiteCase& sc, std::uint64_t seed) {
  // Independent projection so every output coordinate gets a distinct weight.
  Rng proj_rng(Rng::derive(seed, 0x9a, 7));
  NdArray<double> projection;

  std::vector<Parameter<double>> params(sc.inputs.size());
  std::vector<Parameter<double>*> param_ptrs;
  for (size_t i = 0; i < sc.inputs.size(); ++i) {
    params[i].name = sc.name + ".in" + std::to_string(i);
    params[i].value = sc.inputs[i];
    params[i].grad = NdArray<double>(sc.inputs[i].shape());
    param_ptrs.push_back(&params[i]);
  }

  auto eval = [&](bool with_grad) {
    Tape<double> tape;
    std::vector<DVar> leaves;
    leaves.reserve(params.size());
    for (auto& p : params) leaves.push_back(tape.leaf(p));
    DVar out = sc.build(tape, leaves);
    if (projection.empty()) {
      projection = random_array(out.value().shape(), &proj_rng, 0.1, 1.0);
    }
    DVar loss = sum(mul(out, tape.constant(projection)));
    if (with_grad) tape.backward(loss);
    return loss.value()[0];
  };

  eval(true);  // analytic gradients into params
  GradCheckOptions opts;
  return check_gradients([&] { return eval(false); }, param_ptrs, opts);
}

}  // namespace

std::vector<OpCheckResult> run_primitive_gradient_suite(std::uint64_t seed,
                                                        bool corrupt_fixture) {
  Rng rng(seed);
  std::vector<SuiteCase> cases;

  cases.push_back({"add",
                   {random_array({3, 4}, &rng), random_array({3, 4}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return add(in[0], in[1]);
                   }});
  cases.push_back({"sub",
                   {random_array({3, 4}, &rng), random_array({3, 4}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return sub(in[0], in[1]);
                   }});
  cases.push_back({"mul",
                   {random_array({3, 4}, &rng), random_array({3, 4}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return mul(in[0], in[1]);
                   }});
  cases.push_back({"scale",
                   {random_array({5}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return scale(in[0], 0.37);
                   }});
  cases.push_back({"sum",
                   {random_array({4, 3}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) { return sum(in[0]); }});
  cases.push_back({"relu",
                   {random_array_off_kink({4, 5}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) { return relu(in[0]); }});
  cases.push_back({"sigmoid",
                   {random_array({4, 5}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return sigmoid(in[0]);
                   }});
  cases.push_back({"tanh",
                   {random_array({4, 5}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return tanh_op(in[0]);
                   }});
  cases.push_back({"reshape",
                   {random_array({2, 6}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return reshape(in[0], {3, 4});
                   }});
  cases.push_back({"concat_channels",
                   {random_array({3, 2}, &rng), random_array({3, 3}, &rng),
                    random_array({3, 1}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return concat_channels(std::vector<DVar>{in[0], in[1], in[2]});
                   }});
  cases.push_back({"slice_channels",
                   {random_array({3, 6}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return slice_channels(in[0], 2, 3);
                   }});
  cases.push_back({"take_row",
                   {random_array({4, 3}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return take_row(in[0], 2);
                   }});
  cases.push_back({"stack_rows",
                   {random_array({3}, &rng), random_array({3}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return stack_rows(std::vector<DVar>{in[0], in[1]});
                   }});
  cases.push_back({"dense",
                   {random_array({2, 3, 4}, &rng), random_array({5, 4}, &rng),
                    random_array({5}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return dense(in[0], in[1], in[2]);
                   }});
  cases.push_back({"conv2d",
                   {random_array({2, 2, 5, 6}, &rng), random_array({3, 2, 3, 3}, &rng),
                    random_array({3}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return conv2d(in[0], in[1], in[2], 1, 1);
                   }});
  cases.push_back({"conv2d_strided",
                   {random_array({2, 6, 6}, &rng), random_array({3, 2, 3, 3}, &rng),
                    random_array({3}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return conv2d(in[0], in[1], in[2], 2, 1);
                   }});
  cases.push_back({"conv_transpose2d",
                   {random_array({2, 3, 3}, &rng), random_array({2, 3, 4, 4}, &rng),
                    random_array({3}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return conv_transpose2d(in[0], in[1], in[2], 1);
                   }});
  cases.push_back({"temporal_conv1d",
                   {random_array({7, 3}, &rng), random_array({4, 3, 5}, &rng),
                    random_array({4}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return temporal_conv1d(in[0], in[1], in[2]);
                   }});
  cases.push_back({"temporal_maxpool",
                   {random_array({9, 4}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return temporal_maxpool(in[0]);
                   }});
  cases.push_back({"global_avg_pool2d",
                   {random_array({2, 3, 4, 4}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return global_avg_pool2d(in[0]);
                   }});
  cases.push_back({"row_softmax",
                   {random_array({3, 5}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return row_softmax(in[0]);
                   }});
  cases.push_back({"spatial_softmax",
                   {random_array({2, 4, 5}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return spatial_softmax(in[0]);
                   }});
  cases.push_back({"soft_argmax",
                   {random_array({2, 4, 5}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return soft_argmax(spatial_softmax(in[0]));
                   }});
  cases.push_back({"crop_patch",
                   {random_array({2, 3, 6, 6}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return crop_patch(in[0], {{1, 2}, {3, 0}}, 3, 4);
                   }});
  cases.push_back({"ctc_loss",
                   {random_array({5, 4}, &rng)},
                   [](Tape<double>&, const std::vector<DVar>& in) {
                     return ctc_loss(row_softmax(in[0]), std::vector<int>{2, 1});
                   }});
  {
    NdArray<double> truth = random_array({3, 2, 2}, &rng, 0.0, 1.0);
    cases.push_back({"smooth_l1_regression",
                     {random_array({3, 2, 2}, &rng, 0.0, 1.0)},
                     [truth](Tape<double>&, const std::vector<DVar>& in) {
                       return smooth_l1_regression(in[0], truth, 30.0);
                     }});
  }
  if (corrupt_fixture) {
    // doubles the input in forward but claims a factor 3 in backward; the
    // checker must flag it
    cases.push_back({"corrupted_scale",
                     {random_array({4}, &rng)},
                     [](Tape<double>& tape, const std::vector<DVar>& in) {
                       const NdArray<double>& xv = in[0].value();
                       NdArray<double> out(xv.shape());
                       for (std::int64_t i = 0; i < out.size(); ++i) out[i] = 2.0 * xv[i];
                       return tape.emplace(
                           std::move(out), {in[0].id},
                           [](Tape<double>& t, int id) {
                             auto& n = t.node(id);
                             NdArray<double>& g = t.grad(n.parents[0]);
                             for (std::int64_t i = 0; i < g.size(); ++i)
                               g[i] += 3.0 * n.grad[i];
                           },
                           "corrupted_scale");
                     }});
  }

  std::vector<OpCheckResult> results;
  for (const auto& sc : cases) {
    OpCheckResult r;
    r.op = sc.name;
    r.report = run_case(sc, seed);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace stmc
