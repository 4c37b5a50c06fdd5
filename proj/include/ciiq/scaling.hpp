#pragma once

#include <array>
#include <string>
#include <vector>

#include "ciiq/wavelet.hpp"

namespace ciiq {

enum class NormMode { center_surround, single_window };
enum class Branch { standard, color_adapted };

inline const char* norm_mode_name(NormMode m) {
  return m == NormMode::center_surround ? "cs" : "win";
}
inline const char* branch_name(Branch b) {
  return b == Branch::standard ? "standard" : "color_adapted";
}

/// Tunables of the normalization/scaling stages. Defaults are the
/// operating point used throughout: K1 = 31, K2 = 3, color-ratio
/// threshold 0.25, center-surround normalization, 3x3 pooling.
struct ScalingParams {
  double k1 = 31.0;
  double k2 = 3.0;
  double cr_threshold = 0.25;
  double sigma_floor = 1e-6;
  NormMode mode = NormMode::center_surround;
  int window_k = 3;           // single-window size when mode == single_window
  bool include_approx = true; // pool/concatenate the approximation band

  void validate() const;
  std::string mode_label() const;  // "cs", "win3", "win5", "win7"
};

/// Per-channel deviation statistics of the normalized decompositions:
/// per-map sigma for the per-band gain, and per-level sigma pooled over the
/// three detail orientations for the color-adaptation decision.
struct ChannelStats {
  // [channel][level-1][orientation]: population sigma of one detail map,
  // orientation indexed H = 0, V = 1, D = 2.
  std::array<std::array<std::array<double, 3>, kLevels>, 3> map_sigma{};
  // [channel][level-1]: population sigma over the concatenated H/V/D maps.
  std::array<std::array<double, kLevels>, 3> level_sigma{};

  double level(Channel c, int s) const {
    return level_sigma[static_cast<int>(c)][s - 1];
  }
};

ChannelStats compute_channel_stats(const std::array<Decomposition, 3>& chans);

struct ColorRatio {
  double value = 0.0;
  bool degenerate_luminance = false;  // some level had sigma_L below the floor
};

/// Summed per-level chroma-to-luminance deviation ratio over all levels.
/// Luminance sigmas below the floor are clamped to it and flagged.
ColorRatio compute_color_ratio(const ChannelStats& stats,
                               const ScalingParams& p);

/// Per-band gain: K2 / sigma + K1, with sigma clamped to the floor.
double scale_factor(double sigma, const ScalingParams& p);

/// Color-adapted per-level gain: K2/sigma_L + K2/(sigma_a * sigma_b) + K1.
double color_adapted_scale_factor(double sigma_L, double sigma_ab_product,
                                  const ScalingParams& p);

/// Multiply every detail map by its gain, in place. In the standard branch
/// each map uses its own sigma; in the color-adapted branch all maps at
/// level s share the per-level gain. The approximation band is not scaled.
void apply_scaling(std::array<Decomposition, 3>& chans,
                   const ChannelStats& stats, Branch branch,
                   const ScalingParams& p);

/// One row of the scaling diagnostics CSV.
struct DiagRow {
  Channel channel;
  int level;
  Orientation orient;
  double sigma;
  double delta;
};

std::vector<DiagRow> scaling_diagnostics(const ChannelStats& stats,
                                         Branch branch,
                                         const ScalingParams& p);

}  // namespace ciiq
