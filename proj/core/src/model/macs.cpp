#include "motion/model/macs.hpp"

namespace motion::model {

MacReport count_macs(const ModelConfig& cfg) {
  cfg.validate();
  MacReport r;
  for (std::size_t b = 0; b < cfg.num_blocks(); ++b) {
    LayerMacs l;
    l.name = "backbone.conv" + std::to_string(b);
    l.in_features = cfg.block_in_channels(b);
    l.out_features = cfg.block_widths[b];
    l.kernel = cfg.kernel;
    l.out_height = l.out_width = cfg.spatial_size(b + 1);
    l.per_segment = true;
    l.macs_once = static_cast<std::uint64_t>(l.out_features) * l.in_features * l.kernel * l.kernel *
                  l.out_height * l.out_width;
    l.macs_total = l.macs_once * cfg.segments;
    r.backbone += l.macs_total;
    r.layers.push_back(l);
  }
  std::vector<std::size_t> dims = {cfg.feature_dim};
  dims.insert(dims.end(), cfg.head_widths.begin(), cfg.head_widths.end());
  dims.push_back(cfg.num_classes);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    LayerMacs l;
    l.name = "head.fc" + std::to_string(i);
    l.in_features = dims[i];
    l.out_features = dims[i + 1];
    l.per_segment = false;
    l.macs_once = l.macs_total = static_cast<std::uint64_t>(dims[i]) * dims[i + 1];
    r.head += l.macs_total;
    r.layers.push_back(l);
  }
  r.total = r.backbone + r.head;
  return r;
}

}  // namespace motion::model
