#include "decode/decode_kernels.hpp"
#include "distwatch/reference.hpp"

namespace distwatch::reference {

std::vector<Detection> decode_layer(const RawLayerOutput& raw, const AnchorSet& anchors, const DecodeConfig& cfg) {
  validate_layer(raw, anchors, cfg);
  const AnchorLayer& layer = anchors.layers[static_cast<std::size_t>(raw.layer_index)];
  std::vector<Detection> out;
  for (int a = 0; a < raw.num_anchors; ++a) {
    for (int gy = 0; gy < raw.grid_h; ++gy) {
      for (int gx = 0; gx < raw.grid_w; ++gx) {
        detail::decode_cell(raw, layer.anchors[static_cast<std::size_t>(a)], cfg, a, gy, gx, out);
      }
    }
  }
  return out;
}

}  // namespace distwatch::reference
