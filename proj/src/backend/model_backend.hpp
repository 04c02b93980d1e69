#pragma once

#include <filesystem>
#include <memory>

#include "distwatch/backend.hpp"

namespace distwatch::detail {

std::unique_ptr<Backend> open_model_backend(const std::filesystem::path& path, const DecodeConfig& cfg,
                                            const AnchorSet& anchors);

}  // namespace distwatch::detail
