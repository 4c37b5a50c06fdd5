#include "ciiq/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "ciiq/errors.hpp"

namespace ciiq {

void ScalingParams::validate() const {
  if (k1 < 0 || k2 < 0) throw ConfigError("K1 and K2 must be non-negative");
  if (cr_threshold <= 0) throw ConfigError("cr_threshold must be positive");
  if (sigma_floor <= 0) throw ConfigError("sigma_floor must be positive");
  if (mode == NormMode::single_window && (window_k < 3 || window_k % 2 == 0))
    throw ConfigError("single-window size must be odd and >= 3");
}

std::string ScalingParams::mode_label() const {
  return mode == NormMode::center_surround ? "cs"
                                           : "win" + std::to_string(window_k);
}

namespace {

double pooled_sigma(const LevelBands& lb) {
  double sum = 0.0;
  long long n = 0;
  for (const Plane* p : {&lb.h, &lb.v, &lb.d}) {
    sum += p->sum();
    n += p->size();
  }
  if (n == 0) return 0.0;
  const double mu = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const Plane* p : {&lb.h, &lb.v, &lb.d}) ss += (*p - mu).square().sum();
  return std::sqrt(ss / static_cast<double>(n));
}

}  // namespace

ChannelStats compute_channel_stats(const std::array<Decomposition, 3>& chans) {
  ChannelStats st;
  for (int c = 0; c < 3; ++c) {
    for (int s = 1; s <= kLevels; ++s) {
      const LevelBands& lb = chans[c].levels[s - 1];
      const Plane* maps[3] = {&lb.h, &lb.v, &lb.d};
      for (int o = 0; o < 3; ++o)
        st.map_sigma[c][s - 1][o] =
            maps[o]->size() ? population_stddev(*maps[o]) : 0.0;
      st.level_sigma[c][s - 1] = pooled_sigma(lb);
    }
  }
  return st;
}

ColorRatio compute_color_ratio(const ChannelStats& stats,
                               const ScalingParams& p) {
  ColorRatio cr;
  for (int s = 1; s <= kLevels; ++s) {
    double sigma_L = stats.level(Channel::L, s);
    if (sigma_L < p.sigma_floor) {
      sigma_L = p.sigma_floor;
      cr.degenerate_luminance = true;
    }
    cr.value +=
        (stats.level(Channel::a, s) + stats.level(Channel::b, s)) / sigma_L;
  }
  return cr;
}

double scale_factor(double sigma, const ScalingParams& p) {
  return p.k2 / std::max(sigma, p.sigma_floor) + p.k1;
}

double color_adapted_scale_factor(double sigma_L, double sigma_ab_product,
                                  const ScalingParams& p) {
  return p.k2 / std::max(sigma_L, p.sigma_floor) +
         p.k2 / std::max(sigma_ab_product, p.sigma_floor) + p.k1;
}

namespace {

double band_delta(const ChannelStats& stats, Branch branch,
                  const ScalingParams& p, int c, int s, int o) {
  if (branch == Branch::color_adapted) {
    const double ab = stats.level(Channel::a, s) * stats.level(Channel::b, s);
    return color_adapted_scale_factor(stats.level(Channel::L, s), ab, p);
  }
  return scale_factor(stats.map_sigma[c][s - 1][o], p);
}

}  // namespace

void apply_scaling(std::array<Decomposition, 3>& chans,
                   const ChannelStats& stats, Branch branch,
                   const ScalingParams& p) {
  for (int c = 0; c < 3; ++c) {
    for (int s = 1; s <= kLevels; ++s) {
      LevelBands& lb = chans[c].levels[s - 1];
      Plane* maps[3] = {&lb.h, &lb.v, &lb.d};
      for (int o = 0; o < 3; ++o) *maps[o] *= band_delta(stats, branch, p, c, s, o);
    }
  }
}

std::vector<DiagRow> scaling_diagnostics(const ChannelStats& stats,
                                         Branch branch,
                                         const ScalingParams& p) {
  std::vector<DiagRow> rows;
  const Orientation os[3] = {Orientation::H, Orientation::V, Orientation::D};
  for (int c = 0; c < 3; ++c)
    for (int s = 1; s <= kLevels; ++s)
      for (int o = 0; o < 3; ++o)
        rows.push_back({static_cast<Channel>(c), s, os[o],
                        stats.map_sigma[c][s - 1][o],
                        band_delta(stats, branch, p, c, s, o)});
  return rows;
}

}  // namespace ciiq
