#pragma once

// Per-cell decode shared by the parallel and reference decode_layer.

#include <cmath>
#include <vector>

#include "distwatch/decode.hpp"

namespace distwatch::detail {

inline void decode_cell(const RawLayerOutput& raw, const AnchorSize& anchor, const DecodeConfig& cfg, int a,
                        int gy, int gx, std::vector<Detection>& out) {
  const float* v = raw.values.data() + raw.offset(a, gy, gx);
  const double objectness = sigmoid(v[4]);
  // sigmoid(class) <= 1, so no class can pass when objectness alone does not.
  if (objectness < cfg.confidence_threshold) return;

  const double s = raw.stride;
  const double cx = (2.0 * sigmoid(v[0]) - 0.5 + gx) * s;
  const double cy = (2.0 * sigmoid(v[1]) - 0.5 + gy) * s;
  const double tw = 2.0 * sigmoid(v[2]);
  const double th = 2.0 * sigmoid(v[3]);
  const double w = tw * tw * anchor.width;
  const double h = th * th * anchor.height;
  const Box box{cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0};

  const int nc = raw.num_classes();
  if (cfg.multi_label) {
    for (int c = 0; c < nc; ++c) {
      const double score = objectness * sigmoid(v[5 + c]);
      if (score >= cfg.confidence_threshold) out.push_back({c, score, box});
    }
    return;
  }
  int best = 0;
  for (int c = 1; c < nc; ++c) {
    if (v[5 + c] > v[5 + best]) best = c;
  }
  const double score = objectness * sigmoid(v[5 + best]);
  if (score >= cfg.confidence_threshold) out.push_back({best, score, box});
}

}  // namespace distwatch::detail
