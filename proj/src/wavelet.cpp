#include "ciiq/wavelet.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "ciiq/errors.hpp"
#include "ciiq/image.hpp"

namespace ciiq {

namespace {

// Biorthogonal 1.5 filter bank, lifting form. The analysis lowpass is the
// standard 10-tap [3 -3 -22 22 128 128 22 -22 -3 3]/(128*sqrt(2)) from the
// biorthogonal spline filter tables; the analysis highpass is the 2-tap
// Haar difference. Expressed as a Haar predict/update plus one wider update
// whose weights reproduce those taps exactly on the interior.
constexpr double kU1 = 22.0 / 256.0;
constexpr double kU2 = -3.0 / 256.0;
const double kSqrt2 = std::sqrt(2.0);

// Half-sample symmetric index fold into [0, n).
inline long fold_hs(long i, long n) {
  if (n == 1) return 0;
  const long p2 = 2 * n;
  long p = i % p2;
  if (p < 0) p += p2;
  return p < n ? p : p2 - 1 - p;
}

// Haar difference of the half-sample symmetrically extended signal at pair
// j, expressed through the stored differences alone: x[fold(2j+1)] - x[fold(2j)]
// is always +/- a stored difference or zero, so analysis and synthesis can
// evaluate the same boundary values without the original samples.
inline double ext_diff(const double* d, long n, long j) {
  const long a = fold_hs(2 * j, n);
  const long b = fold_hs(2 * j + 1, n);
  if (a == b) return 0.0;
  if (b == a + 1) return d[a / 2];
  return -d[b / 2];
}

// Forward 1D stage: x[0..n) -> s[0..ceil(n/2)), d[0..floor(n/2)).
void lift_forward(const double* x, long n, double* s, double* d) {
  const long nd = n / 2, ns = (n + 1) / 2;
  for (long i = 0; i < nd; ++i) d[i] = x[2 * i + 1] - x[2 * i];
  for (long i = 0; i < ns; ++i) {
    const double u = 0.5 * ext_diff(d, n, i) +
                     kU1 * (ext_diff(d, n, i - 1) - ext_diff(d, n, i + 1)) +
                     kU2 * (ext_diff(d, n, i - 2) - ext_diff(d, n, i + 2));
    s[i] = (x[2 * i] + u) * kSqrt2;
  }
  for (long i = 0; i < nd; ++i) d[i] /= kSqrt2;
}

void lift_inverse(const double* s, const double* din, long n, double* x) {
  const long nd = n / 2, ns = (n + 1) / 2;
  std::vector<double> d(nd);
  for (long i = 0; i < nd; ++i) d[i] = din[i] * kSqrt2;
  for (long i = 0; i < ns; ++i) {
    const double u = 0.5 * ext_diff(d.data(), n, i) +
                     kU1 * (ext_diff(d.data(), n, i - 1) - ext_diff(d.data(), n, i + 1)) +
                     kU2 * (ext_diff(d.data(), n, i - 2) - ext_diff(d.data(), n, i + 2));
    x[2 * i] = s[i] / kSqrt2 - u;
    if (2 * i + 1 < n) x[2 * i + 1] = x[2 * i] + d[i];
  }
}

// Split along x (columns): rows stay, columns halve.
void split_cols(const Plane& in, Plane& lo, Plane& hi) {
  const long h = in.rows(), w = in.cols();
  lo.resize(h, (w + 1) / 2);
  hi.resize(h, w / 2);
  std::vector<double> row(w), s(lo.cols()), d(hi.cols());
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) row[c] = in(r, c);
    lift_forward(row.data(), w, s.data(), d.data());
    for (long c = 0; c < lo.cols(); ++c) lo(r, c) = s[c];
    for (long c = 0; c < hi.cols(); ++c) hi(r, c) = d[c];
  }
}

// Split along y (rows): columns stay, rows halve. Columns are contiguous in
// Eigen's default layout, so operate on them directly.
void split_rows(const Plane& in, Plane& lo, Plane& hi) {
  const long h = in.rows(), w = in.cols();
  lo.resize((h + 1) / 2, w);
  hi.resize(h / 2, w);
  for (long c = 0; c < w; ++c)
    lift_forward(in.col(c).data(), h, lo.col(c).data(), hi.col(c).data());
}

void merge_rows(const Plane& lo, const Plane& hi, long h, Plane& out) {
  out.resize(h, lo.cols());
  for (long c = 0; c < lo.cols(); ++c)
    lift_inverse(lo.col(c).data(), hi.cols() ? hi.col(c).data() : nullptr, h,
                 out.col(c).data());
}

void merge_cols(const Plane& lo, const Plane& hi, long w, Plane& out) {
  const long h = lo.rows();
  out.resize(h, w);
  std::vector<double> s(lo.cols()), d(hi.cols()), row(w);
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < lo.cols(); ++c) s[c] = lo(r, c);
    for (long c = 0; c < hi.cols(); ++c) d[c] = hi(r, c);
    lift_inverse(s.data(), d.data(), w, row.data());
    for (long c = 0; c < w; ++c) out(r, c) = row[c];
  }
}

}  // namespace

StageBands dwt_stage(const Plane& in) {
  Plane lo, hi;
  split_cols(in, lo, hi);
  StageBands out;
  split_rows(lo, out.ll, out.h);
  split_rows(hi, out.v, out.d);
  return out;
}

Plane idwt_stage(const StageBands& bands, int rows, int cols) {
  Plane lo, hi, out;
  merge_rows(bands.ll, bands.h, rows, lo);
  merge_rows(bands.v, bands.d, rows, hi);
  merge_cols(lo, hi, cols, out);
  return out;
}

Plane& Decomposition::band(int level, Orientation o) {
  return const_cast<Plane&>(
      static_cast<const Decomposition*>(this)->band(level, o));
}

const Plane& Decomposition::band(int level, Orientation o) const {
  if (o == Orientation::A) return approx;
  const LevelBands& lb = levels[level - 1];
  switch (o) {
    case Orientation::H: return lb.h;
    case Orientation::V: return lb.v;
    default: return lb.d;
  }
}

long long Decomposition::coefficient_count() const {
  long long n = approx.size();
  for (const auto& lb : levels) n += lb.h.size() + lb.v.size() + lb.d.size();
  return n;
}

Decomposition decompose(const Plane& plane) {
  if (plane.rows() < kMinImageDim || plane.cols() < kMinImageDim)
    throw DimensionError("plane too small for a seven-level decomposition: " +
                         std::to_string(plane.cols()) + "x" +
                         std::to_string(plane.rows()));

  Decomposition out;
  Plane cur = plane;
  // Transform stage k consumes the running approximation and emits details
  // at level s = 8 - k, so level 1 is the coarsest.
  for (int k = 1; k <= kLevels; ++k) {
    StageBands bands = dwt_stage(cur);
    LevelBands& lb = out.levels[kLevels - k];
    lb.h = std::move(bands.h);
    lb.v = std::move(bands.v);
    lb.d = std::move(bands.d);
    cur = std::move(bands.ll);
  }
  out.approx = std::move(cur);
  return out;
}

Plane reconstruct(const Decomposition& set) {
  Plane cur = set.approx;
  for (int s = 1; s <= kLevels; ++s) {
    const LevelBands& lb = set.levels[s - 1];
    const long rows = cur.rows() + lb.h.rows();
    const long cols = cur.cols() + lb.v.cols();
    if (lb.h.rows() != lb.d.rows() || lb.v.cols() != lb.d.cols() ||
        lb.h.cols() != cur.cols() || lb.v.rows() != cur.rows() ||
        lb.h.rows() != rows / 2 || lb.v.cols() != cols / 2)
      throw DimensionError("inconsistent band dimensions at level " +
                           std::to_string(s));
    StageBands bands{cur, lb.h, lb.v, lb.d};
    cur = idwt_stage(bands, static_cast<int>(rows), static_cast<int>(cols));
  }
  return cur;
}

std::array<std::pair<int, int>, kLevels + 1> band_dims(int rows, int cols) {
  std::array<std::pair<int, int>, kLevels + 1> dims;
  int r = rows, c = cols;
  for (int k = 1; k <= kLevels; ++k) {
    const int s = kLevels + 1 - k;
    dims[s] = {r / 2, c / 2};  // detail bands take the floor half
    r = (r + 1) / 2;
    c = (c + 1) / 2;
  }
  dims[0] = {r, c};
  return dims;
}

void dump_feature_map(const std::string& path, const FeatureMap& map) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write file: " + path);
  const uint32_t header[4] = {static_cast<uint32_t>(map.plane.cols()),
                              static_cast<uint32_t>(map.plane.rows()),
                              static_cast<uint32_t>(map.level),
                              static_cast<uint32_t>(map.orient)};
  std::fwrite("FMAP", 1, 4, f);
  // Little-endian u32s; byte order made explicit so dumps are portable.
  for (uint32_t v : header) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    std::fwrite(b, 1, 4, f);
  }
  for (long y = 0; y < map.plane.rows(); ++y)
    for (long x = 0; x < map.plane.cols(); ++x) {
      const float v = static_cast<float>(map.plane(y, x));
      std::fwrite(&v, sizeof(float), 1, f);
    }
  std::fclose(f);
}

FeatureMap load_feature_map(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open file: " + path);
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> guard(f, &std::fclose);

  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "FMAP", 4) != 0)
    throw IoError("not a feature map dump: " + path);
  uint32_t header[4];
  for (uint32_t& v : header) {
    unsigned char b[4];
    if (std::fread(b, 1, 4, f) != 4) throw IoError("truncated dump: " + path);
    v = static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
        (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
  }
  FeatureMap map;
  map.level = static_cast<int>(header[2]);
  map.orient = static_cast<Orientation>(header[3]);
  map.plane.resize(header[1], header[0]);
  for (long y = 0; y < map.plane.rows(); ++y)
    for (long x = 0; x < map.plane.cols(); ++x) {
      float v;
      if (std::fread(&v, sizeof(float), 1, f) != 1)
        throw IoError("truncated dump: " + path);
      map.plane(y, x) = v;
    }
  return map;
}

}  // namespace ciiq
