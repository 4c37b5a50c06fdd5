#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ciiq/plane.hpp"

namespace ciiq {

inline constexpr int kLevels = 7;

enum class Orientation : uint8_t { A = 0, H = 1, V = 2, D = 3 };
enum class Channel : uint8_t { L = 0, a = 1, b = 2 };

inline char orientation_code(Orientation o) { return "AHVD"[static_cast<int>(o)]; }
inline char channel_code(Channel c) { return "Lab"[static_cast<int>(c)]; }

/// One subband plane tagged with its position in the decomposition.
/// Level 1 is the coarsest; the single approximation band lives at level 1.
struct FeatureMap {
  int level = 1;
  Orientation orient = Orientation::A;
  Channel channel = Channel::L;
  Plane plane;
};

/// Detail triplet at one level.
struct LevelBands {
  Plane h;  // highpass along y (responds to horizontal edges)
  Plane v;  // highpass along x (responds to vertical edges)
  Plane d;  // highpass both axes
};

/// Seven-level decomposition of a single channel plane: one approximation
/// band plus H/V/D details per level. `levels[s-1]` holds level s, with
/// s = 1 the coarsest and s = 7 the finest.
struct Decomposition {
  Plane approx;
  std::array<LevelBands, kLevels> levels;

  Plane& band(int level, Orientation o);
  const Plane& band(int level, Orientation o) const;

  /// Sum of coefficient counts over all 22 bands.
  long long coefficient_count() const;
};

/// One analysis stage of the separable biorthogonal 1.5 transform with
/// half-sample symmetric boundary extension. Lowpass outputs take
/// ceil(n/2) samples per axis, highpass floor(n/2), so the stage is
/// critically sampled for every input size.
struct StageBands {
  Plane ll, h, v, d;
};
StageBands dwt_stage(const Plane& in);

/// Inverse of dwt_stage; (rows, cols) name the original plane size.
Plane idwt_stage(const StageBands& bands, int rows, int cols);

/// Full seven-level decomposition. Requires min(dims) >= 128 so every
/// level is non-empty. Throws DimensionError otherwise.
Decomposition decompose(const Plane& plane);

/// Inverse transform. Throws DimensionError if the band dimensions are
/// not mutually consistent.
Plane reconstruct(const Decomposition& set);

/// Subband sizes for an input of the given size: result[0] is the
/// approximation, result[s] the detail dims at level s. Pairs are (rows, cols).
std::array<std::pair<int, int>, kLevels + 1> band_dims(int rows, int cols);

/// Debug dump: magic "FMAP", then width, height, level, orientation code as
/// little-endian u32, then row-major f32 coefficients.
void dump_feature_map(const std::string& path, const FeatureMap& map);
FeatureMap load_feature_map(const std::string& path);

}  // namespace ciiq
