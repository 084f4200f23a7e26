#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "motion/numerics/tensor.hpp"

namespace motion::nn {

/// A differentiable function of several tensors, described by its forward map
/// and a vector-Jacobian product.
struct DifferentiableOp {
  std::string name;
  std::function<Tensor64(std::span<const Tensor64>)> forward;
  /// Returns one gradient per input, given the gradient of the output.
  std::function<std::vector<Tensor64>(std::span<const Tensor64>, const Tensor64&)> backward;
};

struct GradCheckOptions {
  double eps = 1e-5;
  /// Seed of the fixed random projection that turns the output into a scalar.
  std::uint64_t projection_seed = 0x6D6F74696F6Eull;
  /// Inputs whose gradient is not checked (e.g. integer-valued masks).
  std::vector<std::size_t> skip_inputs;
};

/// Compares analytic gradients against central differences of
/// L(x) = sum(forward(x) * R) for a fixed random R. Returns the maximum over all
/// checked elements of |a - n| / max(|a|, |n|, 1e-8).
/// Throws NumericalError if any value involved is not finite.
double grad_check(const DifferentiableOp& op, std::vector<Tensor64> inputs,
                  const GradCheckOptions& options = {});

}  // namespace motion::nn
