#include "ciiq/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "ciiq/errors.hpp"

namespace ciiq {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void check_min_dims(int width, int height) {
  if (width < kMinImageDim || height < kMinImageDim) {
    throw DimensionError("image too small: " + std::to_string(width) + "x" +
                         std::to_string(height) + ", need at least " +
                         std::to_string(kMinImageDim) + " on each side");
  }
}

RgbImage from_rgb_rows(const std::vector<std::vector<unsigned char>>& rows,
                       int width, int height) {
  RgbImage img;
  img.r.resize(height, width);
  img.g.resize(height, width);
  img.b.resize(height, width);
  for (int y = 0; y < height; ++y) {
    const unsigned char* row = rows[y].data();
    for (int x = 0; x < width; ++x) {
      img.r(y, x) = row[3 * x + 0];
      img.g(y, x) = row[3 * x + 1];
      img.b(y, x) = row[3 * x + 2];
    }
  }
  return img;
}

RgbImage load_png(std::FILE* fp, const std::string& path) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }

  // longjmp must not skip destructors, so every non-trivial local lives
  // above the setjmp point
  std::vector<std::vector<unsigned char>> rows;
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unsupported or corrupt PNG: " + path);
  }

  png_init_io(png, fp);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth == 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("16-bit PNG rejected, 8-bit inputs only: " + path);
  }

  // Normalize everything to 8-bit RGB.
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<size_t>(width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unexpected PNG row layout: " + path);
  }

  rows.assign(height, std::vector<unsigned char>(width * 3));
  row_ptrs.resize(height);
  for (int y = 0; y < height; ++y) row_ptrs[y] = rows[y].data();
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  check_min_dims(width, height);
  return from_rgb_rows(rows, width, height);
}

uint32_t read_u32le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16le(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

// Uncompressed 24/32-bit BI_RGB BMP only.
RgbImage load_bmp(std::FILE* fp, const std::string& path) {
  std::fseek(fp, 0, SEEK_END);
  const long size = std::ftell(fp);
  std::fseek(fp, 0, SEEK_SET);
  if (size < 54) throw IoError("truncated BMP: " + path);
  std::vector<unsigned char> buf(static_cast<size_t>(size));
  if (std::fread(buf.data(), 1, buf.size(), fp) != buf.size())
    throw IoError("short read: " + path);

  const uint32_t data_offset = read_u32le(&buf[10]);
  const uint32_t header_size = read_u32le(&buf[14]);
  if (header_size < 40) throw IoError("unsupported BMP header: " + path);
  const int32_t width = static_cast<int32_t>(read_u32le(&buf[18]));
  int32_t height = static_cast<int32_t>(read_u32le(&buf[22]));
  const uint16_t bpp = read_u16le(&buf[28]);
  const uint32_t compression = read_u32le(&buf[30]);
  if (compression != 0 || (bpp != 24 && bpp != 32))
    throw IoError("unsupported BMP format (need uncompressed 24/32-bit): " +
                  path);
  const bool top_down = height < 0;
  if (top_down) height = -height;
  if (width <= 0 || height <= 0 || width > 65535 || height > 65535)
    throw IoError("corrupt BMP: " + path);

  const int bytes_pp = bpp / 8;
  const size_t row_stride = (static_cast<size_t>(width) * bytes_pp + 3) & ~3ull;
  if (data_offset + row_stride * height > buf.size())
    throw IoError("truncated BMP pixel data: " + path);

  check_min_dims(width, height);
  RgbImage img;
  img.r.resize(height, width);
  img.g.resize(height, width);
  img.b.resize(height, width);
  for (int y = 0; y < height; ++y) {
    const int src_y = top_down ? y : height - 1 - y;
    const unsigned char* row = &buf[data_offset + row_stride * src_y];
    for (int x = 0; x < width; ++x) {
      img.b(y, x) = row[bytes_pp * x + 0];
      img.g(y, x) = row[bytes_pp * x + 1];
      img.r(y, x) = row[bytes_pp * x + 2];
    }
  }
  return img;
}

}  // namespace

RgbImage load_image(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open file: " + path);

  unsigned char sig[8] = {0};
  const size_t got = std::fread(sig, 1, 8, fp.get());
  if (got == 8 && png_sig_cmp(sig, 0, 8) == 0) return load_png(fp.get(), path);
  if (got >= 2 && sig[0] == 'B' && sig[1] == 'M') {
    std::fseek(fp.get(), 0, SEEK_SET);
    return load_bmp(fp.get(), path);
  }
  throw IoError("unsupported format (PNG or BMP expected): " + path);
}

void save_png(const std::string& path, const RgbImage& img) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write file: " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed");
  }
  const int w = img.width(), h = img.height();
  std::vector<unsigned char> row(static_cast<size_t>(w) * 3);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG write failed: " + path);
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      row[3 * x + 0] = img.r(y, x);
      row[3 * x + 1] = img.g(y, x);
      row[3 * x + 2] = img.b(y, x);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

namespace {

// sRGB -> XYZ (D65), IEC 61966-2-1 primaries. Rows sum to the white point.
constexpr double kM[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
constexpr double kWhite[3] = {0.95047, 1.0, 1.08883};

double srgb_linearize(unsigned char c8) {
  const double c = c8 / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double eps = 216.0 / 24389.0;  // (6/29)^3
  constexpr double kappa = 841.0 / 108.0;  // 1/(3*(6/29)^2)
  return t > eps ? std::cbrt(t) : kappa * t + 4.0 / 29.0;
}

}  // namespace

LabImage srgb_to_lab(const RgbImage& img) {
  const int h = img.height(), w = img.width();
  LabImage lab;
  lab.L.resize(h, w);
  lab.a.resize(h, w);
  lab.b.resize(h, w);

  // 256-entry linearization table; the conversion is a pure per-pixel map.
  double lut[256];
  for (int i = 0; i < 256; ++i) lut[i] = srgb_linearize(static_cast<unsigned char>(i));

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = lut[img.r(y, x)], g = lut[img.g(y, x)],
                   b = lut[img.b(y, x)];
      const double fx =
          lab_f((kM[0][0] * r + kM[0][1] * g + kM[0][2] * b) / kWhite[0]);
      const double fy =
          lab_f((kM[1][0] * r + kM[1][1] * g + kM[1][2] * b) / kWhite[1]);
      const double fz =
          lab_f((kM[2][0] * r + kM[2][1] * g + kM[2][2] * b) / kWhite[2]);
      lab.L(y, x) = 116.0 * fy - 16.0;
      lab.a(y, x) = 500.0 * (fx - fy);
      lab.b(y, x) = 200.0 * (fy - fz);
    }
  }
  return lab;
}

}  // namespace ciiq
