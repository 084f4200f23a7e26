#include "motion/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "motion/numerics/rng.hpp"

namespace motion::nn {
namespace {

double project(const Tensor64& out, const Tensor64& r) {
  double acc = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) acc += out[i] * r[i];
  return acc;
}

void require_finite(const Tensor64& t, const std::string& what) {
  if (!all_finite(t)) throw NumericalError("grad_check: non-finite values in " + what);
}

}  // namespace

double grad_check(const DifferentiableOp& op, std::vector<Tensor64> inputs,
                  const GradCheckOptions& options) {
  for (const auto& in : inputs) require_finite(in, op.name + " input");

  const Tensor64 out = op.forward(inputs);
  require_finite(out, op.name + " output");

  Rng rng(options.projection_seed);
  Tensor64 r(out.shape());
  for (double& v : r.data()) v = rng.uniform(-1.0, 1.0);

  const std::vector<Tensor64> analytic = op.backward(inputs, r);
  if (analytic.size() != inputs.size()) {
    throw ShapeError("grad_check: " + op.name + " returned " + std::to_string(analytic.size()) +
                     " gradients for " + std::to_string(inputs.size()) + " inputs");
  }

  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (std::find(options.skip_inputs.begin(), options.skip_inputs.end(), k) !=
        options.skip_inputs.end()) {
      continue;
    }
    expect_shape(analytic[k], inputs[k].shape(), "grad_check gradient");
    require_finite(analytic[k], op.name + " analytic gradient");
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double saved = inputs[k][i];
      inputs[k][i] = saved + options.eps;
      const double plus = project(op.forward(inputs), r);
      inputs[k][i] = saved - options.eps;
      const double minus = project(op.forward(inputs), r);
      inputs[k][i] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw NumericalError("grad_check: non-finite perturbed output in " + op.name);
      }
      const double numeric = (plus - minus) / (2.0 * options.eps);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace motion::nn
