#include "motion/model/gradient_suite.hpp"

#include <cmath>

#include "motion/model/network.hpp"
#include "motion/numerics/ops.hpp"
#include "motion/numerics/rng.hpp"

namespace motion::model {

using nn::Shape;
using nn::Tensor64;
using Inputs = std::span<const Tensor64>;

namespace {

Tensor64 random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  Tensor64 t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-scale, scale);
  return t;
}

// Keeps values at least `gap` away from zero so ReLU kinks do not sit inside
// the finite-difference stencil.
Tensor64 away_from_zero(Shape shape, Rng& rng, double gap = 0.05) {
  Tensor64 t(std::move(shape));
  for (double& v : t.data()) {
    const double m = rng.uniform(gap, 1.0);
    v = rng.bernoulli(0.5) ? m : -m;
  }
  return t;
}

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.segments = 3;
  cfg.input_size = 8;
  cfg.input_channels = 1;
  cfg.block_widths = {4, 8};
  cfg.feature_dim = 8;
  cfg.shift_fraction = 0.25;
  cfg.head_widths = {6};
  cfg.num_classes = 5;
  return cfg;
}

// Parameters are passed as op inputs (after the data input) so they are
// perturbed by the checker too.
BasicModelParams<double> params_from(Inputs in, std::size_t offset, const ModelConfig& cfg) {
  BasicModelParams<double> p;
  std::size_t k = offset;
  for (std::size_t b = 0; b < cfg.num_blocks(); ++b) {
    p.conv_weight.emplace_back(in[k++]);
    p.conv_bias.emplace_back(in[k++]);
  }
  for (std::size_t i = 0; i <= cfg.head_widths.size(); ++i) {
    p.head_weight.emplace_back(in[k++]);
    p.head_bias.emplace_back(in[k++]);
  }
  return p;
}

std::vector<Tensor64> param_grads(BasicModelParams<double>& p) {
  std::vector<Tensor64> out;
  for (std::size_t b = 0; b < p.conv_weight.size(); ++b) {
    out.push_back(p.conv_weight[b].grad);
    out.push_back(p.conv_bias[b].grad);
  }
  for (std::size_t i = 0; i < p.head_weight.size(); ++i) {
    out.push_back(p.head_weight[i].grad);
    out.push_back(p.head_bias[i].grad);
  }
  return out;
}

std::vector<Tensor64> param_inputs(const ModelConfig& cfg, std::uint64_t seed) {
  const BasicModelParams<double> p = init_params(cfg, seed).cast<double>();
  Rng rng(seed ^ 0xB1A5);
  std::vector<Tensor64> out;
  // Non-zero biases so the check also covers their effect on ReLU patterns.
  for (std::size_t b = 0; b < p.conv_weight.size(); ++b) {
    out.push_back(p.conv_weight[b].value);
    out.push_back(random_tensor(p.conv_bias[b].value.shape(), rng, 0.1));
  }
  for (std::size_t i = 0; i < p.head_weight.size(); ++i) {
    out.push_back(p.head_weight[i].value);
    out.push_back(random_tensor(p.head_bias[i].value.shape(), rng, 0.1));
  }
  return out;
}

GradCheckCase conv_case(std::size_t stride, std::size_t pad, Rng& rng) {
  GradCheckCase c;
  c.op.name = "conv2d(stride=" + std::to_string(stride) + ",pad=" + std::to_string(pad) + ")";
  c.op.forward = [=](Inputs in) { return nn::conv2d(in[0], in[1], in[2], stride, pad); };
  c.op.backward = [=](Inputs in, const Tensor64& g) {
    auto r = nn::conv2d_backward(in[0], in[1], g, stride, pad);
    return std::vector<Tensor64>{r.input, r.weight, r.bias};
  };
  c.inputs = {random_tensor({2, 7, 7}, rng), random_tensor({3, 2, 3, 3}, rng), random_tensor({3}, rng)};
  return c;
}

}  // namespace

std::vector<GradCheckCase> gradient_cases(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradCheckCase> cases;

  cases.push_back(conv_case(1, 1, rng));
  cases.push_back(conv_case(2, 1, rng));
  cases.push_back(conv_case(2, 0, rng));

  {
    GradCheckCase c;
    c.op.name = "relu";
    c.op.forward = [](Inputs in) { return nn::relu(in[0]); };
    c.op.backward = [](Inputs in, const Tensor64& g) { return std::vector<Tensor64>{nn::relu_backward(in[0], g)}; };
    c.inputs = {away_from_zero({4, 5}, rng)};
    cases.push_back(std::move(c));
  }
  {
    GradCheckCase c;
    c.op.name = "linear";
    c.op.forward = [](Inputs in) { return nn::linear(in[0], in[1], in[2]); };
    c.op.backward = [](Inputs in, const Tensor64& g) {
      auto r = nn::linear_backward(in[0], in[1], g);
      return std::vector<Tensor64>{r.input, r.weight, r.bias};
    };
    c.inputs = {random_tensor({6}, rng), random_tensor({4, 6}, rng), random_tensor({4}, rng)};
    cases.push_back(std::move(c));
  }
  {
    GradCheckCase c;
    c.op.name = "global_avg_pool";
    c.op.forward = [](Inputs in) { return nn::global_avg_pool(in[0]); };
    c.op.backward = [](Inputs in, const Tensor64& g) {
      return std::vector<Tensor64>{nn::global_avg_pool_backward(in[0].shape(), g)};
    };
    c.inputs = {random_tensor({3, 4, 5}, rng)};
    cases.push_back(std::move(c));
  }
  {
    // Reseeding per call fixes the mask, making dropout a deterministic map.
    const std::uint64_t mask_seed = rng.next_u64();
    GradCheckCase c;
    c.op.name = "dropout(p=0.2)";
    c.op.forward = [=](Inputs in) {
      Rng r(mask_seed);
      return nn::dropout(in[0], 0.2, r, true).output;
    };
    c.op.backward = [=](Inputs in, const Tensor64& g) {
      Rng r(mask_seed);
      const auto mask = nn::dropout(in[0], 0.2, r, true).mask;
      return std::vector<Tensor64>{nn::dropout_backward(mask, g)};
    };
    c.inputs = {random_tensor({32}, rng)};
    cases.push_back(std::move(c));
  }
  {
    GradCheckCase c;
    c.op.name = "softmax_cross_entropy";
    c.op.forward = [](Inputs in) {
      return Tensor64({1}, std::vector<double>{nn::softmax_cross_entropy(in[0], 2).loss});
    };
    c.op.backward = [](Inputs in, const Tensor64& g) {
      Tensor64 d = nn::softmax_cross_entropy_backward(nn::softmax_cross_entropy(in[0], 2).probs, 2);
      for (double& v : d.data()) v *= g[0];
      return std::vector<Tensor64>{d};
    };
    c.inputs = {random_tensor({5}, rng, 2.0)};
    cases.push_back(std::move(c));
  }
  {
    GradCheckCase c;
    c.op.name = "temporal_shift";
    c.op.forward = [](Inputs in) { return temporal_shift(in[0], 0.25); };
    c.op.backward = [](Inputs, const Tensor64& g) {
      return std::vector<Tensor64>{temporal_shift_backward(g, 0.25)};
    };
    c.inputs = {random_tensor({3, 8, 2, 2}, rng)};
    cases.push_back(std::move(c));
  }
  {
    GradCheckCase c;
    c.op.name = "consensus";
    c.op.forward = [](Inputs in) { return consensus(in[0]); };
    c.op.backward = [](Inputs in, const Tensor64& g) {
      return std::vector<Tensor64>{consensus_backward(g, in[0].dim(0))};
    };
    c.inputs = {random_tensor({3, 6}, rng)};
    cases.push_back(std::move(c));
  }

  const ModelConfig cfg = tiny_config();
  const std::uint64_t param_seed = rng.next_u64();
  {
    GradCheckCase c;
    c.op.name = "backbone";
    c.op.forward = [cfg](Inputs in) { return backbone_forward(in[0], params_from(in, 1, cfg), cfg); };
    c.op.backward = [cfg](Inputs in, const Tensor64& g) {
      auto p = params_from(in, 1, cfg);
      BackboneCache<double> cache;
      backbone_forward(in[0], p, cfg, &cache);
      p.zero_grad();
      std::vector<Tensor64> out{backbone_backward(g, cache, p, cfg, true)};
      for (auto& t : param_grads(p)) out.push_back(std::move(t));
      return out;
    };
    c.inputs = {random_tensor({cfg.segments, 1, cfg.input_size, cfg.input_size}, rng)};
    for (auto& t : param_inputs(cfg, param_seed)) c.inputs.push_back(std::move(t));
    cases.push_back(std::move(c));
  }
  {
    GradCheckCase c;
    c.op.name = "head";
    c.op.forward = [cfg](Inputs in) { return head_forward(in[0], params_from(in, 1, cfg)); };
    c.op.backward = [cfg](Inputs in, const Tensor64& g) {
      auto p = params_from(in, 1, cfg);
      HeadCache<double> cache;
      head_forward(in[0], p, &cache);
      p.zero_grad();
      std::vector<Tensor64> out{head_backward(g, cache, p)};
      for (auto& t : param_grads(p)) out.push_back(std::move(t));
      return out;
    };
    c.inputs = {random_tensor({cfg.feature_dim}, rng)};
    for (auto& t : param_inputs(cfg, param_seed)) c.inputs.push_back(std::move(t));
    cases.push_back(std::move(c));
  }
  {
    GradCheckCase c;
    c.op.name = "model_loss";
    auto loss = [cfg](Inputs in, BasicModelParams<double>& p, BackboneCache<double>* bc, HeadCache<double>* hc) {
      const Tensor64 feats = backbone_forward(in[0], p, cfg, bc);
      return nn::softmax_cross_entropy(head_forward(consensus(feats), p, hc), 3);
    };
    c.op.forward = [cfg, loss](Inputs in) {
      auto p = params_from(in, 1, cfg);
      return Tensor64({1}, std::vector<double>{loss(in, p, nullptr, nullptr).loss});
    };
    c.op.backward = [cfg, loss](Inputs in, const Tensor64& g) {
      auto p = params_from(in, 1, cfg);
      BackboneCache<double> bc;
      HeadCache<double> hc;
      const auto ce = loss(in, p, &bc, &hc);
      p.zero_grad();
      Tensor64 dlogits = nn::softmax_cross_entropy_backward(ce.probs, 3);
      for (double& v : dlogits.data()) v *= g[0];
      const Tensor64 dfeat = head_backward(dlogits, hc, p);
      std::vector<Tensor64> out{backbone_backward(consensus_backward(dfeat, cfg.segments), bc, p, cfg, true)};
      for (auto& t : param_grads(p)) out.push_back(std::move(t));
      return out;
    };
    c.inputs = {random_tensor({cfg.segments, 1, cfg.input_size, cfg.input_size}, rng)};
    for (auto& t : param_inputs(cfg, param_seed)) c.inputs.push_back(std::move(t));
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<GradCheckEntry> run_gradient_suite(std::uint64_t seed, double eps) {
  std::vector<GradCheckEntry> out;
  for (auto& c : gradient_cases(seed)) {
    c.options.eps = eps;
    out.push_back({c.op.name, nn::grad_check(c.op, std::move(c.inputs), c.options)});
  }
  return out;
}

}  // namespace motion::model
