#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ciiq/image.hpp"
#include "ciiq/scaling.hpp"
#include "ciiq/wavelet.hpp"

namespace ciiq {

inline constexpr int kPoolSize = 3;
inline constexpr uint16_t kFeatureFormatVersion = 1;

/// Non-overlapping k x k max pooling anchored at the top-left corner.
/// Edge tiles are clipped to the map boundary, so an N x M map pools to
/// ceil(N/k) x ceil(M/k).
Plane max_pool(const Plane& map, int k = kPoolSize);

/// One pooled band inside a feature vector.
struct FeatureSegment {
  Channel channel;
  uint8_t level;
  Orientation orient;
  uint16_t rows;
  uint16_t cols;
  size_t offset;  // index of the first value within FeatureVector::values

  size_t count() const { return static_cast<size_t>(rows) * cols; }
};

/// Pooled, scaled coefficients of one image, concatenated channel L,a,b;
/// level ascending; orientation A,H,V,D.
struct FeatureVector {
  std::vector<double> values;
  std::vector<FeatureSegment> layout;

  bool same_layout(const FeatureVector& other) const;
};

/// Everything build_feature produces besides the vector itself, kept for
/// diagnostics and for forcing the pair's second image onto the same branch.
struct FeatureBuildResult {
  FeatureVector feature;
  Branch branch = Branch::standard;
  double color_ratio = 0.0;
  bool degenerate_luminance = false;
  ChannelStats stats;
};

/// Full pipeline for one image: decompose each Lab plane, run both
/// normalization tiers, scale, pool, concatenate. When `forced_branch` is
/// empty the branch is chosen from this image's own color ratio.
FeatureBuildResult build_feature(const LabImage& img, const ScalingParams& p,
                                 std::optional<Branch> forced_branch = {});

/// Normalized (post-tier2, pre-scaling) decompositions of all channels.
/// Exposed for diagnostics and map dumps.
std::array<Decomposition, 3> normalized_decomposition(const LabImage& img,
                                                      const ScalingParams& p);

/// Sum of absolute coefficient differences. Throws DimensionError when the
/// layouts differ.
double l1_distance(const FeatureVector& f1, const FeatureVector& f2);

struct QualityScore {
  double e = 0.0;
  Branch branch = Branch::standard;
  bool degenerate_luminance = false;
  ScalingParams params;
};

/// Perceptual distance between a reference and a distorted image. The
/// color-adaptation branch is decided from the reference and forced on the
/// distorted image so both features live in the same space.
QualityScore score_pair(const RgbImage& ref, const RgbImage& dist,
                        const ScalingParams& p);

/// Feature dump: magic "CIIQF", version u16, segment count u16, then per
/// segment a (channel u8, level u8, orientation u8, rows u16, cols u16)
/// header followed by its row-major f32 values. Little-endian throughout.
void dump_features(const std::string& path, const FeatureVector& fv);
FeatureVector load_features(const std::string& path);

}  // namespace ciiq
