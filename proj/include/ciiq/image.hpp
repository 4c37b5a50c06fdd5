#pragma once

#include <string>

#include "ciiq/plane.hpp"

namespace ciiq {

/// Minimum width/height so a seven-level dyadic decomposition keeps a
/// non-empty coarsest band.
inline constexpr int kMinImageDim = 128;

/// 8-bit sRGB image, one byte plane per channel.
struct RgbImage {
  BytePlane r, g, b;

  int height() const { return static_cast<int>(r.rows()); }
  int width() const { return static_cast<int>(r.cols()); }
};

/// CIELab planes (D65/2°). L in [0,100], a/b nominally in [-128,127].
struct LabImage {
  Plane L, a, b;

  int height() const { return static_cast<int>(L.rows()); }
  int width() const { return static_cast<int>(L.cols()); }
};

/// Decode a PNG or BMP file. Grayscale inputs are replicated to three
/// channels; bit depths other than 8 are rejected.
/// Throws IoError (missing/undecodable file) or DimensionError (either
/// dimension below kMinImageDim).
RgbImage load_image(const std::string& path);

/// Write an 8-bit RGB PNG.
void save_png(const std::string& path, const RgbImage& img);

/// Per-pixel sRGB -> CIELab conversion (D65 white point, 2° observer,
/// standard sRGB transfer function).
LabImage srgb_to_lab(const RgbImage& img);

/// Rec.601 luma of one pixel, in [0,255] (not rounded).
inline double luma601(unsigned char r, unsigned char g, unsigned char b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

}  // namespace ciiq
