#include "distwatch/reference.hpp"
#include "preprocess/resize_kernels.hpp"

namespace distwatch::reference {

std::pair<Image, LetterboxTransform> letterbox(const Image& frame, const LetterboxOptions& options) {
  const LetterboxTransform t = letterbox_transform(frame.width(), frame.height(), options.target_size);
  Image out(options.target_size, options.target_size);
  for (int dy = 0; dy < options.target_size; ++dy) {
    detail::letterbox_row(frame, out, t, options.resample, options.pad_value, dy);
  }
  return {std::move(out), t};
}

}  // namespace distwatch::reference
