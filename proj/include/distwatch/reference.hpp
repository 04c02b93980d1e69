#pragma once

// Single-threaded reference versions of the parallel kernels. The parallel
// paths must produce identical output; tests and bench/ compare the two.

#include <optional>
#include <span>
#include <vector>

#include "distwatch/decode.hpp"
#include "distwatch/geometry.hpp"
#include "distwatch/image.hpp"
#include "distwatch/preprocess.hpp"

namespace distwatch::reference {

std::vector<DistanceRecord> pairwise(std::span<const Centroid> persons, const Thresholds& t,
                                     const std::optional<CalibrationProfile>& cal);

std::vector<Detection> decode_layer(const RawLayerOutput& raw, const AnchorSet& anchors,
                                    const DecodeConfig& cfg);

std::pair<Image, LetterboxTransform> letterbox(const Image& frame, const LetterboxOptions& options = {});

}  // namespace distwatch::reference
