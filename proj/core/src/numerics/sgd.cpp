#include "motion/numerics/sgd.hpp"

#include <cmath>
#include <string>

namespace motion::nn {

void SgdConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("sgd: learning_rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("sgd: momentum must be in [0,1)");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("sgd: weight_decay must be non-negative");
  }
}

template <typename T>
void sgd_step(std::span<BasicParameter<T>* const> params, const SgdConfig& cfg) {
  const T lr = static_cast<T>(cfg.learning_rate);
  const T mu = static_cast<T>(cfg.momentum);
  const T wd = static_cast<T>(cfg.weight_decay);
  for (BasicParameter<T>* p : params) {
    auto value = p->value.data();
    auto grad = p->grad.data();
    auto buf = p->momentum_buffer.data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const T g = grad[i] + wd * value[i];
      buf[i] = mu * buf[i] + g;
      value[i] -= lr * buf[i];
    }
  }
}

template void sgd_step<float>(std::span<BasicParameter<float>* const>, const SgdConfig&);
template void sgd_step<double>(std::span<BasicParameter<double>* const>, const SgdConfig&);

}  // namespace motion::nn
