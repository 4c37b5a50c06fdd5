#pragma once

#include "ciiq/plane.hpp"
#include "ciiq/wavelet.hpp"

namespace ciiq {

/// Patch layout of the center-surround pass: 13x13 patches overlapping by
/// 4 pixels (stride 9), each with a concentric 5x5 center block.
struct PatchGeometry {
  int patch_size = 13;
  int center_size = 5;
  int overlap = 4;

  int stride() const { return patch_size - overlap; }
  int center_offset() const { return (patch_size - center_size) / 2; }
};

/// Divisive normalization factor: the center/surround deviation ratio,
/// falling back to the center deviation when the surround is flat.
inline double norm_factor(double sigma_center, double sigma_surround) {
  return sigma_surround != 0.0 ? sigma_center / sigma_surround : sigma_center;
}

/// First normalization tier. Every patch's 5x5 center block C is replaced
/// by (C - mean(C)) / r + mean(C) with r = norm_factor over the center and
/// surround deviations; pixels outside processed centers are untouched.
/// Patches are anchored at the top-left corner and clipped at the right and
/// bottom edges. A map smaller than one patch in both dimensions is treated
/// as a single patch whose center is the whole map, which makes r = 1 and
/// passes the map through. Constant patches (r = 0) also pass through.
Plane tier1_normalize(const Plane& map, const PatchGeometry& geom = {});

/// Second tier: subtract the scalar grand mean over all coefficients of the
/// detail maps at levels 2..7 from those maps. The approximation band and
/// the level-1 details are left unaltered.
void tier2_normalize(Decomposition& set);

/// Ablation variant of tier 1: each pixel is normalized against its own
/// k x k window (clipped at edges), with r equal to the window deviation.
/// k must be odd.
Plane single_window_normalize(const Plane& map, int k);

}  // namespace ciiq
