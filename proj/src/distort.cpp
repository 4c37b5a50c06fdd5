#include "ciiq/distort.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ciiq/errors.hpp"

namespace ciiq {

DistortionKind parse_distortion_kind(const std::string& name) {
  if (name == "gaussian_noise") return DistortionKind::gaussian_noise;
  if (name == "gaussian_blur") return DistortionKind::gaussian_blur;
  if (name == "jpeg_like_blocking") return DistortionKind::jpeg_like_blocking;
  if (name == "contrast_shift") return DistortionKind::contrast_shift;
  throw ConfigError("unknown distortion kind: " + name);
}

const char* distortion_kind_name(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::gaussian_noise: return "gaussian_noise";
    case DistortionKind::gaussian_blur: return "gaussian_blur";
    case DistortionKind::jpeg_like_blocking: return "jpeg_like_blocking";
    case DistortionKind::contrast_shift: return "contrast_shift";
  }
  return "?";
}

namespace {

unsigned char clamp8(double v) {
  return static_cast<unsigned char>(std::clamp(v, 0.0, 255.0) + 0.5);
}

template <typename Fn>
void per_plane(const RgbImage& in, RgbImage& out, Fn fn) {
  fn(in.r, out.r);
  fn(in.g, out.g);
  fn(in.b, out.b);
}

// Box-Muller on top of mt19937 keeps the noise bit-reproducible across
// standard libraries (std::normal_distribution is not pinned down).
class GaussianSource {
 public:
  explicit GaussianSource(uint64_t seed) : rng_(static_cast<uint32_t>(seed)) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 1e-12);
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

 private:
  double uniform() { return (rng_() + 0.5) * (1.0 / 4294967296.0); }
  std::mt19937 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

RgbImage add_noise(const RgbImage& ref, double sigma, uint64_t seed) {
  if (sigma <= 0.0) return ref;
  GaussianSource g(seed);
  RgbImage out = ref;
  const int h = ref.height(), w = ref.width();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      out.r(y, x) = clamp8(ref.r(y, x) + sigma * g.next());
      out.g(y, x) = clamp8(ref.g(y, x) + sigma * g.next());
      out.b(y, x) = clamp8(ref.b(y, x) + sigma * g.next());
    }
  return out;
}

void blur_plane(const BytePlane& in, BytePlane& out, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double ksum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    ksum += kernel[i + radius];
  }
  for (double& k : kernel) k /= ksum;

  const long h = in.rows(), w = in.cols();
  const auto reflect = [](long i, long n) {
    while (i < 0 || i >= n) i = i < 0 ? -1 - i : 2 * n - 1 - i;
    return i;
  };

  Eigen::ArrayXXd tmp(h, w);
  for (long y = 0; y < h; ++y)
    for (long x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * in(y, reflect(x + i, w));
      tmp(y, x) = acc;
    }
  out.resize(h, w);
  for (long y = 0; y < h; ++y)
    for (long x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * tmp(reflect(y + i, h), x);
      out(y, x) = clamp8(acc);
    }
}

RgbImage blur(const RgbImage& ref, double sigma) {
  if (sigma <= 0.0) return ref;
  RgbImage out;
  per_plane(ref, out,
            [&](const BytePlane& in, BytePlane& dst) { blur_plane(in, dst, sigma); });
  return out;
}

// 8x8 orthonormal DCT-II (forward) / DCT-III (inverse).
void dct8(const double in[8], double out[8], bool inverse) {
  for (int k = 0; k < 8; ++k) {
    double acc = 0.0;
    for (int n = 0; n < 8; ++n) {
      const double w0 = n == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      if (inverse)
        acc += w0 * in[n] * std::cos(M_PI * (2 * k + 1) * n / 16.0);
      else
        acc += in[n] * std::cos(M_PI * (2 * n + 1) * k / 16.0);
    }
    out[k] = inverse ? acc
                     : acc * (k == 0 ? std::sqrt(1.0 / 8.0)
                                     : std::sqrt(2.0 / 8.0));
  }
}

void quantize_block(Eigen::Ref<Eigen::ArrayXXd> blk, double step) {
  double tmp[8][8], vec[8], res[8];
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) vec[x] = blk(y, x);
    dct8(vec, tmp[y], false);
  }
  for (int x = 0; x < 8; ++x) {
    for (int y = 0; y < 8; ++y) vec[y] = tmp[y][x];
    dct8(vec, res, false);
    for (int y = 0; y < 8; ++y) tmp[y][x] = res[y];
  }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      // DC kept finer so severity shows as blocking, not brightness loss.
      const double q = (y == 0 && x == 0) ? step * 0.25 : step;
      tmp[y][x] = std::round(tmp[y][x] / q) * q;
    }
  for (int x = 0; x < 8; ++x) {
    for (int y = 0; y < 8; ++y) vec[y] = tmp[y][x];
    dct8(vec, res, true);
    for (int y = 0; y < 8; ++y) tmp[y][x] = res[y];
  }
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) vec[x] = tmp[y][x];
    dct8(vec, res, true);
    for (int x = 0; x < 8; ++x) blk(y, x) = res[x];
  }
}

RgbImage blockify(const RgbImage& ref, double step) {
  if (step <= 0.0) return ref;
  const long h = ref.height(), w = ref.width();
  RgbImage out;
  per_plane(ref, out, [&](const BytePlane& in, BytePlane& dst) {
    Eigen::ArrayXXd plane = in.cast<double>();
    for (long y = 0; y + 8 <= h; y += 8)
      for (long x = 0; x + 8 <= w; x += 8)
        quantize_block(plane.block(y, x, 8, 8), step);
    dst.resize(h, w);
    for (long y = 0; y < h; ++y)
      for (long x = 0; x < w; ++x) dst(y, x) = clamp8(plane(y, x));
  });
  return out;
}

RgbImage contrast(const RgbImage& ref, double gain) {
  RgbImage out;
  per_plane(ref, out, [&](const BytePlane& in, BytePlane& dst) {
    dst.resize(in.rows(), in.cols());
    for (long y = 0; y < in.rows(); ++y)
      for (long x = 0; x < in.cols(); ++x)
        dst(y, x) = clamp8(128.0 + gain * (in(y, x) - 128.0));
  });
  return out;
}

}  // namespace

RgbImage apply_distortion(const RgbImage& ref, DistortionKind kind,
                          double severity, uint64_t seed) {
  switch (kind) {
    case DistortionKind::gaussian_noise: return add_noise(ref, severity, seed);
    case DistortionKind::gaussian_blur: return blur(ref, severity);
    case DistortionKind::jpeg_like_blocking: return blockify(ref, severity);
    case DistortionKind::contrast_shift:
      return contrast(ref, 1.0 / (1.0 + severity));
  }
  throw ConfigError("unknown distortion kind");
}

double distortion_severity(DistortionKind kind, int level) {
  const double t = std::pow(2.0, level - 1);  // doubles per level
  switch (kind) {
    case DistortionKind::gaussian_noise: return 2.0 * t;
    case DistortionKind::gaussian_blur: return 0.8 * t;
    case DistortionKind::jpeg_like_blocking: return 12.0 * t;
    case DistortionKind::contrast_shift: return 0.35 * level;
  }
  return 0.0;
}

std::vector<RgbImage> generate_distortions(const RgbImage& ref,
                                           DistortionKind kind, int levels,
                                           uint64_t seed) {
  if (levels < 2) throw ConfigError("need at least 2 severity levels");

  std::vector<RgbImage> out;
  out.reserve(levels);
  for (int i = 1; i <= levels; ++i)
    out.push_back(apply_distortion(ref, kind, distortion_severity(kind, i),
                                   seed + 7919 * static_cast<uint64_t>(i)));
  return out;
}

double psnr_baseline(const RgbImage& ref, const RgbImage& dist) {
  if (ref.width() != dist.width() || ref.height() != dist.height())
    throw DimensionError("image dimensions differ");
  const int h = ref.height(), w = ref.width();
  double se = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = luma601(ref.r(y, x), ref.g(y, x), ref.b(y, x)) -
                       luma601(dist.r(y, x), dist.g(y, x), dist.b(y, x));
      se += d * d;
    }
  const double mse = se / (static_cast<double>(h) * w);
  if (mse == 0.0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

}  // namespace ciiq
