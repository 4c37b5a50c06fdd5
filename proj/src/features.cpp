#include "ciiq/features.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "ciiq/errors.hpp"
#include "ciiq/normalize.hpp"

namespace ciiq {

Plane max_pool(const Plane& map, int k) {
  if (k < 1) throw ConfigError("pool size must be >= 1");
  const long h = map.rows(), w = map.cols();
  const long oh = (h + k - 1) / k, ow = (w + k - 1) / k;
  Plane out(oh, ow);
  for (long i = 0; i < oh; ++i) {
    const long y0 = i * k, y1 = std::min<long>(y0 + k, h);
    for (long j = 0; j < ow; ++j) {
      const long x0 = j * k, x1 = std::min<long>(x0 + k, w);
      out(i, j) = map.block(y0, x0, y1 - y0, x1 - x0).maxCoeff();
    }
  }
  return out;
}

bool FeatureVector::same_layout(const FeatureVector& other) const {
  if (layout.size() != other.layout.size()) return false;
  for (size_t i = 0; i < layout.size(); ++i) {
    const FeatureSegment &a = layout[i], &b = other.layout[i];
    if (a.channel != b.channel || a.level != b.level || a.orient != b.orient ||
        a.rows != b.rows || a.cols != b.cols || a.offset != b.offset)
      return false;
  }
  return true;
}

std::array<Decomposition, 3> normalized_decomposition(const LabImage& img,
                                                      const ScalingParams& p) {
  p.validate();
  std::array<Decomposition, 3> chans = {
      decompose(img.L), decompose(img.a), decompose(img.b)};
  for (Decomposition& set : chans) {
    for (LevelBands& lb : set.levels) {
      for (Plane* m : {&lb.h, &lb.v, &lb.d}) {
        *m = p.mode == NormMode::center_surround
                 ? tier1_normalize(*m)
                 : single_window_normalize(*m, p.window_k);
      }
    }
    tier2_normalize(set);
  }
  return chans;
}

namespace {

void append_pooled(FeatureVector& fv, const Plane& map, Channel c, int s,
                   Orientation o) {
  const Plane pooled = max_pool(map);
  FeatureSegment seg{c,
                     static_cast<uint8_t>(s),
                     o,
                     static_cast<uint16_t>(pooled.rows()),
                     static_cast<uint16_t>(pooled.cols()),
                     fv.values.size()};
  fv.layout.push_back(seg);
  fv.values.reserve(fv.values.size() + seg.count());
  for (long y = 0; y < pooled.rows(); ++y)
    for (long x = 0; x < pooled.cols(); ++x) fv.values.push_back(pooled(y, x));
}

}  // namespace

FeatureBuildResult build_feature(const LabImage& img, const ScalingParams& p,
                                 std::optional<Branch> forced_branch) {
  FeatureBuildResult res;
  std::array<Decomposition, 3> chans = normalized_decomposition(img, p);

  res.stats = compute_channel_stats(chans);
  const ColorRatio cr = compute_color_ratio(res.stats, p);
  res.color_ratio = cr.value;
  res.degenerate_luminance = cr.degenerate_luminance;
  res.branch = forced_branch.value_or(cr.value >= p.cr_threshold
                                          ? Branch::color_adapted
                                          : Branch::standard);

  apply_scaling(chans, res.stats, res.branch, p);

  for (int c = 0; c < 3; ++c) {
    const Channel chan = static_cast<Channel>(c);
    if (p.include_approx)
      append_pooled(res.feature, chans[c].approx, chan, 1, Orientation::A);
    for (int s = 1; s <= kLevels; ++s) {
      const LevelBands& lb = chans[c].levels[s - 1];
      append_pooled(res.feature, lb.h, chan, s, Orientation::H);
      append_pooled(res.feature, lb.v, chan, s, Orientation::V);
      append_pooled(res.feature, lb.d, chan, s, Orientation::D);
    }
  }
  return res;
}

double l1_distance(const FeatureVector& f1, const FeatureVector& f2) {
  if (!f1.same_layout(f2))
    throw DimensionError("feature layouts differ, vectors are not comparable");
  double e = 0.0;
  for (size_t i = 0; i < f1.values.size(); ++i)
    e += std::abs(f1.values[i] - f2.values[i]);
  return e;
}

QualityScore score_pair(const RgbImage& ref, const RgbImage& dist,
                        const ScalingParams& p) {
  if (ref.width() != dist.width() || ref.height() != dist.height())
    throw DimensionError("image dimensions differ: " +
                         std::to_string(ref.width()) + "x" +
                         std::to_string(ref.height()) + " vs " +
                         std::to_string(dist.width()) + "x" +
                         std::to_string(dist.height()));

  const FeatureBuildResult fr = build_feature(srgb_to_lab(ref), p);
  const FeatureBuildResult fd =
      build_feature(srgb_to_lab(dist), p, fr.branch);

  QualityScore score;
  score.e = l1_distance(fr.feature, fd.feature);
  score.branch = fr.branch;
  score.degenerate_luminance = fr.degenerate_luminance;
  score.params = p;
  return score;
}

namespace {

void write_u16le(std::FILE* f, uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>(v >> 8)};
  std::fwrite(b, 1, 2, f);
}

uint16_t read_u16le(std::FILE* f, const std::string& path) {
  unsigned char b[2];
  if (std::fread(b, 1, 2, f) != 2) throw IoError("truncated dump: " + path);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

}  // namespace

void dump_features(const std::string& path, const FeatureVector& fv) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write file: " + path);
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> guard(f, &std::fclose);

  std::fwrite("CIIQF", 1, 5, f);
  write_u16le(f, kFeatureFormatVersion);
  write_u16le(f, static_cast<uint16_t>(fv.layout.size()));
  for (const FeatureSegment& seg : fv.layout) {
    const unsigned char head[3] = {static_cast<unsigned char>(seg.channel),
                                   seg.level,
                                   static_cast<unsigned char>(seg.orient)};
    std::fwrite(head, 1, 3, f);
    write_u16le(f, seg.rows);
    write_u16le(f, seg.cols);
    for (size_t i = 0; i < seg.count(); ++i) {
      const float v = static_cast<float>(fv.values[seg.offset + i]);
      std::fwrite(&v, sizeof(float), 1, f);
    }
  }
}

FeatureVector load_features(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open file: " + path);
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> guard(f, &std::fclose);

  char magic[5];
  if (std::fread(magic, 1, 5, f) != 5 || std::memcmp(magic, "CIIQF", 5) != 0)
    throw IoError("not a feature dump: " + path);
  const uint16_t version = read_u16le(f, path);
  if (version != kFeatureFormatVersion)
    throw IoError("unsupported feature dump version " +
                  std::to_string(version) + ": " + path);
  const uint16_t n_segments = read_u16le(f, path);

  FeatureVector fv;
  for (uint16_t i = 0; i < n_segments; ++i) {
    unsigned char head[3];
    if (std::fread(head, 1, 3, f) != 3) throw IoError("truncated dump: " + path);
    FeatureSegment seg;
    seg.channel = static_cast<Channel>(head[0]);
    seg.level = head[1];
    seg.orient = static_cast<Orientation>(head[2]);
    seg.rows = read_u16le(f, path);
    seg.cols = read_u16le(f, path);
    seg.offset = fv.values.size();
    for (size_t j = 0; j < seg.count(); ++j) {
      float v;
      if (std::fread(&v, sizeof(float), 1, f) != 1)
        throw IoError("truncated dump: " + path);
      fv.values.push_back(v);
    }
    fv.layout.push_back(seg);
  }
  return fv;
}

}  // namespace ciiq
