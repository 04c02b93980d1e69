#include "backend/model_backend.hpp"
#include "distwatch/errors.hpp"

namespace distwatch {

bool model_backend_available() noexcept { return false; }

namespace detail {

std::unique_ptr<Backend> open_model_backend(const std::filesystem::path& path, const DecodeConfig&, const AnchorSet&) {
  throw ConfigError("model backend not built (configure with OpenCV DNN) for " + path.string());
}

}  // namespace detail
}  // namespace distwatch
