#include "ciiq/normalize.hpp"

#include <algorithm>
#include <cmath>

#include "ciiq/errors.hpp"

namespace ciiq {

namespace {

struct BlockStats {
  double mean = 0.0;
  double stddev = 0.0;
};

BlockStats block_stats(const Plane& m, long y0, long x0, long h, long w) {
  const auto blk = m.block(y0, x0, h, w);
  BlockStats st;
  st.mean = blk.mean();
  st.stddev = std::sqrt((blk - st.mean).square().mean());
  return st;
}

}  // namespace

Plane tier1_normalize(const Plane& map, const PatchGeometry& geom) {
  const long h = map.rows(), w = map.cols();
  Plane out = map;

  // Small coarse maps carry too few samples for separate center/surround
  // statistics; the whole map acts as one patch with center == surround.
  if (h < geom.patch_size && w < geom.patch_size) return out;

  const long stride = geom.stride();
  const long off = geom.center_offset();
  for (long py = 0; py < h; py += stride) {
    for (long px = 0; px < w; px += stride) {
      const long ph = std::min<long>(geom.patch_size, h - py);
      const long pw = std::min<long>(geom.patch_size, w - px);
      const long cy = py + off, cx = px + off;
      const long ch = std::min<long>(geom.center_size, h - cy);
      const long cw = std::min<long>(geom.center_size, w - cx);
      if (ch <= 0 || cw <= 0) continue;

      const BlockStats center = block_stats(map, cy, cx, ch, cw);
      const BlockStats surround = block_stats(map, py, px, ph, pw);
      const double r = norm_factor(center.stddev, surround.stddev);
      if (r == 0.0) continue;  // constant center: nothing to enhance

      out.block(cy, cx, ch, cw) =
          (map.block(cy, cx, ch, cw) - center.mean) / r + center.mean;
    }
  }
  return out;
}

void tier2_normalize(Decomposition& set) {
  double sum = 0.0;
  long long count = 0;
  for (int s = 2; s <= kLevels; ++s) {
    const LevelBands& lb = set.levels[s - 1];
    for (const Plane* p : {&lb.h, &lb.v, &lb.d}) {
      sum += p->sum();
      count += p->size();
    }
  }
  if (count == 0) return;
  const double grand_mean = sum / static_cast<double>(count);
  for (int s = 2; s <= kLevels; ++s) {
    LevelBands& lb = set.levels[s - 1];
    for (Plane* p : {&lb.h, &lb.v, &lb.d}) *p -= grand_mean;
  }
}

Plane single_window_normalize(const Plane& map, int k) {
  if (k % 2 == 0 || k < 1)
    throw ConfigError("window size must be odd, got " + std::to_string(k));

  const long h = map.rows(), w = map.cols();
  const long r = k / 2;
  Plane out(h, w);
  for (long y = 0; y < h; ++y) {
    const long y0 = std::max<long>(0, y - r);
    const long y1 = std::min<long>(h, y + r + 1);
    for (long x = 0; x < w; ++x) {
      const long x0 = std::max<long>(0, x - r);
      const long x1 = std::min<long>(w, x + r + 1);
      const BlockStats win = block_stats(map, y0, x0, y1 - y0, x1 - x0);
      out(y, x) = win.stddev == 0.0
                      ? map(y, x)
                      : (map(y, x) - win.mean) / win.stddev + win.mean;
    }
  }
  return out;
}

}  // namespace ciiq
