#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "common/text.hpp"
#include "distwatch/decode.hpp"
#include "distwatch/errors.hpp"

namespace distwatch {

ModelMetadata parse_model_metadata(std::istream& in, const std::filesystem::path& origin) {
  ModelMetadata meta;
  std::optional<int> declared_classes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = text::trim(line);
    if (s.empty() || s.front() == '#') continue;

    if (text::starts_with(s, "classes=")) {
      declared_classes = text::parse_number<int>(s.substr(8));
      if (!declared_classes || *declared_classes <= 0) throw ParseError(origin, line_no, "bad classes= value");
      continue;
    }
    if (text::starts_with(s, "names=")) {
      for (auto name : text::split(s.substr(6), ',')) {
        const auto trimmed = text::trim(name);
        if (trimmed.empty()) throw ParseError(origin, line_no, "empty class name");
        meta.class_names.emplace_back(trimmed);
      }
      continue;
    }

    const auto colon = s.find(':');
    if (colon == std::string_view::npos) throw ParseError(origin, line_no, "expected 'stride: w,h ...'");
    const auto stride = text::parse_number<int>(s.substr(0, colon));
    if (!stride) throw ParseError(origin, line_no, "stride is not an integer");
    AnchorLayer layer;
    layer.stride = *stride;
    for (auto pair : text::split_ws(s.substr(colon + 1))) {
      const auto wh = text::split(pair, ',');
      if (wh.size() != 2) throw ParseError(origin, line_no, "anchor '" + std::string(pair) + "' is not w,h");
      const auto w = text::parse_number<double>(wh[0]);
      const auto h = text::parse_number<double>(wh[1]);
      if (!w || !h) throw ParseError(origin, line_no, "anchor '" + std::string(pair) + "' is not numeric");
      layer.anchors.push_back({*w, *h});
    }
    meta.anchors.layers.push_back(std::move(layer));
  }

  if (declared_classes && !meta.class_names.empty() &&
      static_cast<std::size_t>(*declared_classes) != meta.class_names.size()) {
    throw ParseError(origin, line_no, "classes=" + std::to_string(*declared_classes) + " but " +
                                          std::to_string(meta.class_names.size()) + " names listed");
  }
  if (declared_classes && meta.class_names.empty()) {
    for (int i = 0; i < *declared_classes; ++i) meta.class_names.push_back("class" + std::to_string(i));
  }
  try {
    meta.anchors.validate();
  } catch (const FormatError& e) {
    throw FormatError(origin.string() + ": " + e.what());
  }
  return meta;
}

ModelMetadata read_model_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open anchor file " + path.string());
  return parse_model_metadata(in, path);
}

AnchorSet read_anchor_file(const std::filesystem::path& path) { return read_model_metadata(path).anchors; }

void write_model_metadata(std::ostream& out, const ModelMetadata& meta) {
  for (const AnchorLayer& layer : meta.anchors.layers) {
    out << layer.stride << ':';
    for (const AnchorSize& a : layer.anchors) out << ' ' << text::shortest(a.width) << ',' << text::shortest(a.height);
    out << '\n';
  }
  if (!meta.class_names.empty()) {
    out << "classes=" << meta.class_names.size() << "\nnames=";
    for (std::size_t i = 0; i < meta.class_names.size(); ++i) out << (i ? "," : "") << meta.class_names[i];
    out << '\n';
  }
}

}  // namespace distwatch
