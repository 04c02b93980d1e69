#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include <mutex>
#include <string>

#include "backend/model_backend.hpp"
#include "distwatch/errors.hpp"

namespace distwatch {

bool model_backend_available() noexcept { return true; }

namespace detail {

namespace {

TensorShape shape_of(const cv::Mat& m) {
  TensorShape s;
  for (int d = 0; d < m.dims; ++d) s.push_back(m.size[d]);
  return s;
}

/// ONNX graph run through OpenCV DNN; one forward pass in flight per handle.
class OnnxModelBackend final : public Backend {
 public:
  OnnxModelBackend(const std::filesystem::path& path, DecodeConfig cfg, AnchorSet anchors)
      : cfg_(std::move(cfg)), anchors_(std::move(anchors)) {
    try {
      net_ = cv::dnn::readNetFromONNX(path.string());
    } catch (const cv::Exception& e) {
      throw FormatError("cannot load model " + path.string() + ": " + e.what());
    }
    if (net_.empty()) throw FormatError("cannot load model " + path.string());
    output_names_ = net_.getUnconnectedOutLayersNames();

    // Shapes are taken from a probe pass on a blank input of the target size.
    const Image blank(cfg_.target_size, cfg_.target_size, Rgb{kLetterboxPadValue, kLetterboxPadValue, kLetterboxPadValue});
    std::vector<cv::Mat> outs;
    try {
      outs = forward(blank);
    } catch (const cv::Exception& e) {
      throw FormatError("model rejected a 1x3x" + std::to_string(cfg_.target_size) + "x" +
                        std::to_string(cfg_.target_size) + " input: " + e.what());
    }
    std::vector<TensorShape> shapes;
    for (const cv::Mat& m : outs) shapes.push_back(shape_of(m));
    validate_model_io({1, 3, cfg_.target_size, cfg_.target_size}, shapes, anchors_, cfg_);
  }

  BackendKind kind() const noexcept override { return BackendKind::Model; }

  std::vector<Detection> detections_for(const FrameInfo& frame, const Image* pixels) override {
    if (pixels == nullptr || pixels->empty()) {
      throw FormatError("model backend needs pixel data for frame " + std::to_string(frame.index));
    }
    const auto [input, transform] = letterbox(*pixels, {cfg_.target_size});
    std::vector<cv::Mat> outs;
    {
      std::lock_guard lock(mutex_);
      outs = forward(input);
    }
    std::vector<RawLayerOutput> layers;
    for (const cv::Mat& m : outs) {
      const TensorShape s = shape_of(m);
      RawLayerOutput raw;
      raw.num_anchors = static_cast<int>(s[1]);
      raw.grid_h = static_cast<int>(s[2]);
      raw.grid_w = static_cast<int>(s[3]);
      raw.channels = static_cast<int>(s[4]);
      raw.stride = cfg_.target_size / raw.grid_h;
      for (std::size_t l = 0; l < anchors_.layers.size(); ++l) {
        if (anchors_.layers[l].stride == raw.stride) raw.layer_index = static_cast<int>(l);
      }
      const float* data = m.ptr<float>();
      raw.values.assign(data, data + raw.expected_size());
      layers.push_back(std::move(raw));
    }
    return decode_frame(layers, anchors_, cfg_, transform, pixels->width(), pixels->height());
  }

 private:
  std::vector<cv::Mat> forward(const Image& input) {
    const int t = cfg_.target_size;
    // NCHW float in [0,1], RGB order.
    const int dims[4] = {1, 3, t, t};
    cv::Mat blob(4, dims, CV_32F);
    float* dst = blob.ptr<float>();
    const std::size_t plane = static_cast<std::size_t>(t) * t;
    const auto px = input.pixels();
    for (std::size_t i = 0; i < plane; ++i) {
      for (std::size_t c = 0; c < 3; ++c) dst[c * plane + i] = px[i * 3 + c] / 255.0f;
    }
    net_.setInput(blob);
    std::vector<cv::Mat> outs;
    net_.forward(outs, output_names_);
    return outs;
  }

  DecodeConfig cfg_;
  AnchorSet anchors_;
  cv::dnn::Net net_;
  std::vector<std::string> output_names_;
  std::mutex mutex_;
};

}  // namespace

std::unique_ptr<Backend> open_model_backend(const std::filesystem::path& path, const DecodeConfig& cfg,
                                            const AnchorSet& anchors) {
  return std::make_unique<OnnxModelBackend>(path, cfg, anchors);
}

}  // namespace detail
}  // namespace distwatch
