#include <doctest.h>

#include <fstream>
#include <random>

#include "distwatch/errors.hpp"
#include "distwatch/image.hpp"
#include "distwatch/preprocess.hpp"
#include "distwatch/reference.hpp"
#include "support/fixtures.hpp"

using namespace distwatch;

namespace {

Image gradient(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.set(x, y, {static_cast<std::uint8_t>(x * 7), static_cast<std::uint8_t>(y * 5),
                     static_cast<std::uint8_t>(x + y)});
    }
  }
  return img;
}

}  // namespace

TEST_CASE("letterbox transform: landscape, square and portrait") {
  const auto land = letterbox_transform(1280, 720, 640);
  CHECK(land.scale == 0.5);
  CHECK(land.content_width == 640);
  CHECK(land.content_height == 360);
  CHECK(land.pad_top == 140);
  CHECK(land.pad_left == 0);

  const auto square = letterbox_transform(640, 640, 640);
  CHECK(square.scale == 1.0);
  CHECK(square.pad_top == 0);
  CHECK(square.pad_left == 0);

  const auto portrait = letterbox_transform(720, 1280, 640);
  CHECK(portrait.scale == 0.5);
  CHECK(portrait.content_width == 360);
  CHECK(portrait.content_height == 640);
  CHECK(portrait.pad_left == 140);
  CHECK(portrait.pad_top == 0);
}

TEST_CASE("letterbox transform: odd remainder goes bottom/right") {
  // 640x361 -> content 640x361, remainder 279: 139 on top, 140 below.
  const auto t = letterbox_transform(640, 361, 640);
  CHECK(t.content_height == 361);
  CHECK(t.pad_top == 139);
  CHECK(640 - t.pad_top - t.content_height == 140);
}

TEST_CASE("letterbox transform rejects bad sizes") {
  CHECK_THROWS_AS(letterbox_transform(100, 100, 0), ConfigError);
  CHECK_THROWS_AS(letterbox_transform(0, 100, 640), FormatError);
}

TEST_CASE("letterbox raster: size, padding value and identity") {
  const Image src = gradient(32, 18);
  auto [out, t] = letterbox(src, {64});
  CHECK(out.width() == 64);
  CHECK(out.height() == 64);
  CHECK(t.pad_top == 14);
  const Rgb gray{114, 114, 114};
  CHECK(out.at(0, 0) == gray);
  CHECK(out.at(63, 13) == gray);
  CHECK(out.at(10, 14 + 36) == gray);
  // Exact 2x upscale: each source pixel covers a 2x2 block.
  CHECK(out.at(0, 14) == src.at(0, 0));
  CHECK(out.at(5, 14 + 7) == src.at(2, 3));

  const Image sq = gradient(64, 64);
  auto [same, ident] = letterbox(sq, {64});
  CHECK(same == sq);
  CHECK(ident.scale == 1.0);
}

TEST_CASE("letterbox raster: custom pad value and bilinear") {
  const Image src(10, 5, {200, 10, 30});
  LetterboxOptions opt;
  opt.target_size = 20;
  opt.pad_value = 0;
  opt.resample = Resample::Bilinear;
  auto [out, t] = letterbox(src, opt);
  CHECK(out.at(0, 0) == Rgb{0, 0, 0});
  // A flat image stays flat under bilinear resampling.
  CHECK(out.at(7, t.pad_top + 3) == Rgb{200, 10, 30});
}

TEST_CASE("letterbox matches the serial reference") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = std::uniform_int_distribution<int>(1, 90)(rng);
    const int h = std::uniform_int_distribution<int>(1, 90)(rng);
    const Image src = gradient(w, h);
    for (Resample mode : {Resample::Nearest, Resample::Bilinear}) {
      fixtures::ScopedThreads cap(trial % 2 ? 4 : 1);
      LetterboxOptions opt{48, kLetterboxPadValue, mode};
      const auto par = letterbox(src, opt);
      const auto ser = reference::letterbox(src, opt);
      CHECK(par.first == ser.first);
      CHECK(par.second == ser.second);
    }
  }
}

TEST_CASE("unmap_box examples") {
  const auto t = letterbox_transform(1280, 720, 640);
  CHECK(unmap_box({320, 320, 340, 340}, t, 1280, 720) == Box{640, 360, 680, 400});

  const auto ident = letterbox_transform(640, 640, 640);
  CHECK(unmap_box({12.5, 30, 100, 200.25}, ident, 640, 640) == Box{12.5, 30, 100, 200.25});

  // Entirely inside the top padding band (y < 140).
  const Box b = unmap_box({100, 10, 200, 100}, t, 1280, 720);
  CHECK(b.y1 == 0.0);
  CHECK(b.y2 == 0.0);
  CHECK(b.height() == 0.0);
  CHECK(b.x1 == 200.0);
  CHECK(b.x2 == 400.0);
}

TEST_CASE("map then unmap is the identity within half a pixel") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const int w = std::uniform_int_distribution<int>(16, 4000)(rng);
    const int h = std::uniform_int_distribution<int>(16, 4000)(rng);
    const auto t = letterbox_transform(w, h, 640);
    std::uniform_real_distribution<double> ux(0, w), uy(0, h);
    double x1 = ux(rng), x2 = ux(rng), y1 = uy(rng), y2 = uy(rng);
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    const Box box{x1, y1, x2, y2};
    const Box back = unmap_box(map_box(box, t), t, w, h);
    CHECK(std::abs(back.x1 - box.x1) <= 0.5);
    CHECK(std::abs(back.y2 - box.y2) <= 0.5);
    CHECK(t.content_width + 2 * t.pad_left <= 640);
    CHECK(640 - t.content_width - 2 * t.pad_left <= 1);
    // Content aspect ratio within one pixel of rounding.
    CHECK(std::abs(t.content_width - w * t.scale) <= 1.0);
    CHECK(std::abs(t.content_height - h * t.scale) <= 1.0);
  }
}

TEST_CASE("PPM encode/decode round trip, P3 and errors") {
  const Image img = gradient(5, 3);
  const auto bytes = encode_ppm(img);
  CHECK(decode_ppm(bytes) == img);

  const std::string p3 = "P3\n# comment\n2 1\n255\n1 2 3  4 5 6\n";
  const Image ascii = decode_ppm({reinterpret_cast<const std::uint8_t*>(p3.data()), p3.size()});
  CHECK(ascii.at(1, 0) == Rgb{4, 5, 6});

  const std::string bad = "P6\n2 2\n65535\n";
  CHECK_THROWS_AS(decode_ppm({reinterpret_cast<const std::uint8_t*>(bad.data()), bad.size()}), FormatError);
  const std::string truncated = "P6\n2 2\n255\nabc";
  CHECK_THROWS_AS(decode_ppm({reinterpret_cast<const std::uint8_t*>(truncated.data()), truncated.size()}),
                  FormatError);
}

TEST_CASE("ingest: directory order, empty directory, unreadable files") {
  fixtures::TempDir dir("ingest");
  write_ppm(dir / "f0002.ppm", Image(3, 2, {2, 2, 2}));
  write_ppm(dir / "f0001.ppm", Image(3, 2, {1, 1, 1}));
  std::ofstream(dir / "f0001b.ppm") << "not an image";

  const IngestResult r = ingest_frames(dir.path());
  REQUIRE(r.frames.size() == 2);
  CHECK(r.frames[0].index == 0);
  CHECK(r.frames[0].image.at(0, 0) == Rgb{1, 1, 1});
  CHECK(r.frames[1].index == 1);
  CHECK(r.frames[1].image.at(0, 0) == Rgb{2, 2, 2});
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].source.find("f0001b.ppm") != std::string::npos);

  fixtures::TempDir empty("ingest_empty");
  const IngestResult none = ingest_frames(empty.path());
  CHECK(none.frames.empty());
  CHECK(none.errors.empty());

  CHECK_THROWS_AS(ingest_frames(dir / "missing"), FormatError);
}

TEST_CASE("ingest: expected dimensions are enforced per frame") {
  fixtures::TempDir dir("ingest_dims");
  write_ppm(dir / "a.ppm", Image(4, 4));
  write_ppm(dir / "b.ppm", Image(5, 4));
  const IngestResult r = ingest_frames(dir.path(), FrameDims{4, 4});
  CHECK(r.frames.size() == 1);
  CHECK(r.errors.size() == 1);
}

TEST_CASE("raw stream: whole frames only") {
  fixtures::TempDir dir("raw");
  {
    std::ofstream out(dir / "two.raw", std::ios::binary);
    out << "RAWV1 4 4 3\n";
    for (int i = 0; i < 96; ++i) out.put(static_cast<char>(i));
  }
  const IngestResult r = ingest_frames(dir / "two.raw");
  REQUIRE(r.frames.size() == 2);
  CHECK(r.frames[1].index == 1);
  CHECK(r.frames[1].image.pixels()[0] == 48);

  {
    std::ofstream out(dir / "short.raw", std::ios::binary);
    out << "RAWV1 4 4 3\n";
    for (int i = 0; i < 95; ++i) out.put('x');
  }
  CHECK_THROWS_AS(ingest_frames(dir / "short.raw"), FormatError);
  CHECK_THROWS_AS(ingest_frames(dir / "two.raw", FrameDims{8, 2}), FormatError);

  write_raw_stream(dir / "w.raw", {gradient(6, 2), gradient(6, 2), gradient(6, 2)});
  const IngestResult w = ingest_frames(dir / "w.raw");
  REQUIRE(w.frames.size() == 3);
  CHECK(w.frames[2].image == gradient(6, 2));
}
