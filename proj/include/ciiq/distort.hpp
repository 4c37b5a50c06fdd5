#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ciiq/image.hpp"

namespace ciiq {

enum class DistortionKind {
  gaussian_noise,
  gaussian_blur,
  jpeg_like_blocking,
  contrast_shift,
};

DistortionKind parse_distortion_kind(const std::string& name);
const char* distortion_kind_name(DistortionKind kind);

/// Apply one distortion at an explicit severity. Zero severity returns the
/// input unchanged. `seed` only matters for gaussian_noise.
RgbImage apply_distortion(const RgbImage& ref, DistortionKind kind,
                          double severity, uint64_t seed = 0);

/// Severity parameter for rung `level` (1-based) of a kind's fixed ladder.
double distortion_severity(DistortionKind kind, int level);

/// Deterministic ladder of increasingly severe distortions of `ref`.
/// Entry i carries severity rank i+1; the severity schedules are fixed per
/// kind so repeated calls with the same seed reproduce identical pixels.
std::vector<RgbImage> generate_distortions(const RgbImage& ref,
                                           DistortionKind kind, int levels,
                                           uint64_t seed = 0);

/// Peak signal-to-noise ratio on Rec.601 luma, in dB, capped at the 99 dB
/// sentinel (identical images report exactly 99).
double psnr_baseline(const RgbImage& ref, const RgbImage& dist);

}  // namespace ciiq
