#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "motion/numerics/grad_check.hpp"

namespace motion::model {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
};

/// Every differentiable op of the pipeline, wrapped for grad_check in 64-bit,
/// including a small end-to-end backbone + head + loss.
struct GradCheckCase {
  nn::DifferentiableOp op;
  std::vector<nn::Tensor64> inputs;
  nn::GradCheckOptions options;
};

std::vector<GradCheckCase> gradient_cases(std::uint64_t seed = 7);

std::vector<GradCheckEntry> run_gradient_suite(std::uint64_t seed = 7, double eps = 1e-5);

}  // namespace motion::model
