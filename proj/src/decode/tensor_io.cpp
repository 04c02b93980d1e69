#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "common/text.hpp"
#include "distwatch/decode.hpp"
#include "distwatch/errors.hpp"

namespace distwatch {

namespace {

static_assert(sizeof(float) == 4);

void to_host_order(std::vector<float>& values) {
  if constexpr (std::endian::native == std::endian::big) {
    for (float& f : values) {
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      u = __builtin_bswap32(u);
      std::memcpy(&f, &u, 4);
    }
  }
}

}  // namespace

std::vector<RawLayerOutput> parse_tensor_stream(std::istream& in, const std::filesystem::path& origin) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(origin, 1, "empty tensor file");
  const auto header = text::split_ws(line);
  if (header.size() != 2 || header[0] != "TENSV1") throw ParseError(origin, 1, "expected 'TENSV1 <n_layers>'");
  const auto n_layers = text::parse_number<int>(header[1]);
  if (!n_layers || *n_layers < 0) throw ParseError(origin, 1, "bad layer count");

  std::vector<RawLayerOutput> layers;
  for (int l = 0; l < *n_layers; ++l) {
    const std::size_t line_no = static_cast<std::size_t>(l) + 2;
    if (!std::getline(in, line)) throw ParseError(origin, line_no, "missing layer header");
    const auto f = text::split_ws(line);
    if (f.size() != 6) throw ParseError(origin, line_no, "expected 6 layer header fields");
    int v[6];
    for (int k = 0; k < 6; ++k) {
      const auto parsed = text::parse_number<int>(f[static_cast<std::size_t>(k)]);
      if (!parsed || *parsed < 0) throw ParseError(origin, line_no, "layer header field is not a non-negative integer");
      v[k] = *parsed;
    }
    RawLayerOutput raw;
    raw.layer_index = v[0];
    raw.stride = v[1];
    raw.num_anchors = v[2];
    raw.grid_h = v[3];
    raw.grid_w = v[4];
    raw.channels = v[5];
    if (raw.stride <= 0 || raw.channels < 6) throw ParseError(origin, line_no, "bad stride or channel count");
    raw.values.resize(raw.expected_size());
    in.read(reinterpret_cast<char*>(raw.values.data()), static_cast<std::streamsize>(raw.values.size() * 4));
    if (!in) throw ParseError(origin, line_no, "truncated float payload for layer " + std::to_string(l));
    to_host_order(raw.values);
    layers.push_back(std::move(raw));
  }
  return layers;
}

std::vector<RawLayerOutput> read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open tensor file " + path.string());
  return parse_tensor_stream(in, path);
}

void write_tensor_file(const std::filesystem::path& path, std::span<const RawLayerOutput> layers) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write tensor file " + path.string());
  out << "TENSV1 " << layers.size() << '\n';
  for (const RawLayerOutput& raw : layers) {
    if (raw.values.size() != raw.expected_size()) throw FormatError("tensor value count does not match its header");
    out << raw.layer_index << ' ' << raw.stride << ' ' << raw.num_anchors << ' ' << raw.grid_h << ' ' << raw.grid_w
        << ' ' << raw.channels << '\n';
    std::vector<float> le = raw.values;
    to_host_order(le);
    out.write(reinterpret_cast<const char*>(le.data()), static_cast<std::streamsize>(le.size() * 4));
  }
}

}  // namespace distwatch
