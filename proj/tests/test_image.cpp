#include "ciiq/image.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "ciiq/errors.hpp"
#include "testutil.hpp"

using namespace ciiq;

namespace {

LabImage lab_of_pixel(unsigned char r, unsigned char g, unsigned char b) {
  return srgb_to_lab(testutil::constant_image(kMinImageDim, kMinImageDim, r, g, b));
}

// Inverse conversion, used only to check the gray round trip.
unsigned char lab_gray_to_srgb(double L) {
  const double fy = (L + 16.0) / 116.0;
  const double eps = 6.0 / 29.0;
  const double y = fy > eps ? fy * fy * fy : 3.0 * eps * eps * (fy - 4.0 / 29.0);
  const double c = y <= 0.0031308 ? 12.92 * y
                                  : 1.055 * std::pow(y, 1.0 / 2.4) - 0.055;
  return static_cast<unsigned char>(std::clamp(c * 255.0, 0.0, 255.0) + 0.5);
}

}  // namespace

TEST_CASE("black maps to L=a=b=0") {
  const LabImage lab = lab_of_pixel(0, 0, 0);
  CHECK(lab.L(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lab.a(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lab.b(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("white maps to the reference white") {
  const LabImage lab = lab_of_pixel(255, 255, 255);
  CHECK(lab.L(0, 0) == doctest::Approx(100.0).epsilon(1e-4));
  CHECK(std::abs(lab.a(0, 0)) < 0.01);
  CHECK(std::abs(lab.b(0, 0)) < 0.01);
}

TEST_CASE("mid gray 119 hits the precomputed lightness") {
  const LabImage lab = lab_of_pixel(119, 119, 119);
  // closed-form sRGB->XYZ->Lab evaluated independently beforehand
  CHECK(lab.L(0, 0) == doctest::Approx(50.0344409937).epsilon(1e-8));
  CHECK(std::abs(lab.a(0, 0)) < 1e-4);
  CHECK(std::abs(lab.b(0, 0)) < 1e-4);
}

TEST_CASE("lightness is monotone over grays") {
  double prev = -1.0;
  for (int g = 0; g < 256; ++g) {
    const LabImage lab = srgb_to_lab(testutil::constant_image(
        1, 1, static_cast<unsigned char>(g), static_cast<unsigned char>(g),
        static_cast<unsigned char>(g)));
    CHECK(lab.L(0, 0) > prev);
    CHECK(std::abs(lab.a(0, 0)) < 1e-4);
    prev = lab.L(0, 0);
  }
}

TEST_CASE("conversion is a pure per-pixel map") {
  const int n = 32;
  ciiq::RgbImage img = testutil::natural_color_image(n, n, 77);
  const LabImage lab = srgb_to_lab(img);

  // transpose the pixels and check the outputs transpose with them
  ciiq::RgbImage timg;
  timg.r = img.r.transpose();
  timg.g = img.g.transpose();
  timg.b = img.b.transpose();
  const LabImage tlab = srgb_to_lab(timg);
  CHECK((tlab.L - lab.L.transpose()).abs().maxCoeff() == 0.0);
  CHECK((tlab.a - lab.a.transpose()).abs().maxCoeff() == 0.0);
  CHECK((tlab.b - lab.b.transpose()).abs().maxCoeff() == 0.0);
}

TEST_CASE("gray values survive the Lab round trip within one step") {
  for (int g = 0; g < 256; g += 3) {
    const LabImage lab = srgb_to_lab(testutil::constant_image(
        1, 1, static_cast<unsigned char>(g), static_cast<unsigned char>(g),
        static_cast<unsigned char>(g)));
    const int back = lab_gray_to_srgb(lab.L(0, 0));
    CHECK(std::abs(back - g) <= 1);
  }
}

TEST_CASE("png round trip preserves pixels") {
  const auto dir = testutil::scratch_dir("image_png");
  const ciiq::RgbImage img = testutil::natural_color_image(512, 512, 3);
  const std::string path = (dir / "rt.png").string();
  save_png(path, img);
  const ciiq::RgbImage back = load_image(path);
  REQUIRE(back.width() == 512);
  REQUIRE(back.height() == 512);
  CHECK((back.r.cast<int>() - img.r.cast<int>()).abs().maxCoeff() == 0);
  CHECK((back.g.cast<int>() - img.g.cast<int>()).abs().maxCoeff() == 0);
  CHECK((back.b.cast<int>() - img.b.cast<int>()).abs().maxCoeff() == 0);
}

TEST_CASE("undersized image is rejected") {
  const auto dir = testutil::scratch_dir("image_small");
  const std::string path = (dir / "small.png").string();
  save_png(path, testutil::constant_image(64, 64, 10, 20, 30));
  CHECK_THROWS_AS(load_image(path), DimensionError);
}

TEST_CASE("missing and truncated files raise io errors") {
  CHECK_THROWS_AS(load_image("/nonexistent/nope.png"), IoError);

  const auto dir = testutil::scratch_dir("image_trunc");
  const ciiq::RgbImage img = testutil::constant_image(128, 128, 1, 2, 3);
  const std::string full = (dir / "full.png").string();
  save_png(full, img);
  std::ifstream in(full, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const std::string trunc = (dir / "trunc.png").string();
  std::ofstream out(trunc, std::ios::binary);
  out.write(bytes.data(), static_cast<long>(bytes.size() / 3));
  out.close();
  CHECK_THROWS_AS(load_image(trunc), IoError);

  const std::string junk = (dir / "junk.dat").string();
  std::ofstream j(junk, std::ios::binary);
  j << "this is not an image at all";
  j.close();
  CHECK_THROWS_AS(load_image(junk), IoError);
}

TEST_CASE("16-bit png is rejected") {
  static const unsigned char bytes[] = {
      0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d,
      0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01,
      0x10, 0x00, 0x00, 0x00, 0x00, 0x6a, 0xee, 0x47, 0x16, 0x00, 0x00, 0x00,
      0x0b, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x98, 0xe3, 0x00, 0x00,
      0x01, 0x7b, 0x00, 0xdd, 0x40, 0xe6, 0x05, 0x81, 0x00, 0x00, 0x00, 0x00,
      0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};
  const auto dir = testutil::scratch_dir("image_16bit");
  const std::string path = (dir / "deep.png").string();
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(bytes));
  out.close();
  CHECK_THROWS_AS(load_image(path), IoError);
}

TEST_CASE("bmp decode matches the png decode of the same image") {
  const auto dir = testutil::scratch_dir("image_bmp");
  const ciiq::RgbImage img = testutil::natural_color_image(128, 130, 9);

  // minimal 24-bit bottom-up BMP writer
  const int w = img.width(), h = img.height();
  const int stride = (w * 3 + 3) & ~3;
  const int data_size = stride * h;
  std::vector<unsigned char> buf(54 + data_size, 0);
  const auto put32 = [&](int off, uint32_t v) {
    buf[off] = v & 0xff;
    buf[off + 1] = (v >> 8) & 0xff;
    buf[off + 2] = (v >> 16) & 0xff;
    buf[off + 3] = (v >> 24) & 0xff;
  };
  buf[0] = 'B';
  buf[1] = 'M';
  put32(2, 54 + data_size);
  put32(10, 54);
  put32(14, 40);
  put32(18, static_cast<uint32_t>(w));
  put32(22, static_cast<uint32_t>(h));
  buf[26] = 1;
  buf[28] = 24;
  for (int y = 0; y < h; ++y) {
    unsigned char* row = &buf[54 + stride * (h - 1 - y)];
    for (int x = 0; x < w; ++x) {
      row[3 * x + 0] = img.b(y, x);
      row[3 * x + 1] = img.g(y, x);
      row[3 * x + 2] = img.r(y, x);
    }
  }
  const std::string path = (dir / "img.bmp").string();
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<long>(buf.size()));
  out.close();

  const ciiq::RgbImage back = load_image(path);
  REQUIRE(back.width() == w);
  REQUIRE(back.height() == h);
  CHECK((back.r.cast<int>() - img.r.cast<int>()).abs().maxCoeff() == 0);
  CHECK((back.b.cast<int>() - img.b.cast<int>()).abs().maxCoeff() == 0);
}

TEST_CASE("grayscale png decodes with near-zero chroma") {
  // save_png always writes RGB; emulate a grayscale source by equal channels
  const auto dir = testutil::scratch_dir("image_gray");
  const ciiq::RgbImage img = testutil::natural_gray_image(128, 128, 5);
  const std::string path = (dir / "gray.png").string();
  save_png(path, img);
  const LabImage lab = srgb_to_lab(load_image(path));
  CHECK(lab.a.abs().maxCoeff() < 1e-4);
  CHECK(lab.b.abs().maxCoeff() < 1e-4);
}
