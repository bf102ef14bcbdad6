#include "figkit/features.hpp"

#include <cmath>
#include <exception>
#include <numbers>

#include "figkit/lbp.hpp"
#include "figkit/parallel.hpp"
#include "figkit/raster.hpp"

namespace figkit {

namespace {

constexpr double kRelativeZeroSigma = 1e-12;

void l1_normalize(std::span<double> v) {
  double sum = 0.0;
  for (double x : v) sum += std::abs(x);
  if (sum > 0.0) {
    for (double& x : v) x /= sum;
  }
}

void require_size(const GrayImage& texel, int min_side, const char* what) {
  if (texel.width() < min_side || texel.height() < min_side) {
    throw Error(ErrorCode::TexelTooSmall, std::string(what) + " needs a texel of at least " +
                                              std::to_string(min_side) + "x" +
                                              std::to_string(min_side) + " pixels");
  }
}

ChannelPlanes crop_channels(const NormalizedMap& map, const Texel& texel) {
  const int w = texel.pixels.width();
  const int h = texel.pixels.height();
  return {map.channels[0].crop(texel.x, texel.y, w, h),
          map.channels[1].crop(texel.x, texel.y, w, h),
          map.channels[2].crop(texel.x, texel.y, w, h)};
}

}  // namespace

void FeatureConfig::validate() const {
  if (lbp_radius < 1 || lbp_points != 8 * lbp_radius) {
    throw Error(ErrorCode::InvalidArgument, "lbp_points must equal 8 * lbp_radius");
  }
  if (lbp_points / 2 + 4 != kLbpBins) {
    throw Error(ErrorCode::InvalidArgument, "the 12-bin LBP layout needs 16 sample points");
  }
  if (hog_orientations < 12 || hog_orientations % 12 != 0) {
    throw Error(ErrorCode::InvalidArgument, "hog_orientations must be a positive multiple of 12");
  }
  if (histogram_bins_per_channel < 2) {
    throw Error(ErrorCode::InvalidArgument, "histogram_bins_per_channel must be >= 2");
  }
  if (texel_size < kMinTexelSize) {
    throw Error(ErrorCode::InvalidArgument, "texel_size must be >= 8");
  }
}

const std::array<std::string, kFeatureCount>& feature_labels() {
  static const std::array<std::string, kFeatureCount> kLabels = [] {
    std::array<std::string, kFeatureCount> out;
    const char* channels[] = {"R", "G", "B"};
    const char* stats[] = {"mean", "std", "skew", "kurt"};
    int i = 0;
    for (auto* c : channels) {
      for (auto* s : stats) out[i++] = std::string(c) + " " + s;
    }
    for (int k = 0; k <= 8; ++k) out[i++] = "LBP " + std::to_string(k);
    for (int k = 6; k <= 8; ++k) out[i++] = "LBP nu" + std::to_string(k);
    for (auto* h : {"HOG vertical", "HOG horizontal", "HOG diagonal", "HOG regular oblique",
                    "HOG irregular oblique"}) {
      out[i++] = h;
    }
    return out;
  }();
  return kLabels;
}

const std::array<std::string, kSimplifiedFeatureCount>& simplified_feature_labels() {
  static const std::array<std::string, kSimplifiedFeatureCount> kLabels{
      "mean R",       "mean G",         "mean B",       "value std",
      "value skew",   "value kurt",     "LBP flat",     "LBP edge",
      "LBP corner",   "HOG vertical",   "HOG horizontal", "HOG diagonal",
      "HOG regular oblique", "HOG irregular oblique"};
  return kLabels;
}

Moments describe(std::span<const double> values) {
  Moments m;
  if (values.empty()) {
    m.degenerate = true;
    return m;
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / n;
  double m2 = 0.0;
  for (double v : values) m2 += (v - m.mean) * (v - m.mean);
  const double sigma = std::sqrt(m2 / n);
  if (!(sigma > kRelativeZeroSigma * (1.0 + std::abs(m.mean)))) {
    m.degenerate = true;
    return m;
  }
  m.stddev = sigma;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double z = (v - m.mean) / sigma;
    const double z2 = z * z;
    m3 += z2 * z;
    m4 += z2 * z2;
  }
  m.skewness = m3 / n;
  m.kurtosis = m4 / n;
  return m;
}

ColorMoments color_moments(const ChannelPlanes& channels) {
  ColorMoments out;
  for (int c = 0; c < 3; ++c) {
    if (channels[c].pixel_count() == 0) {
      throw Error(ErrorCode::InvalidArgument, "color moments need a non-empty texel");
    }
    const Moments m = describe(channels[c].data());
    out.values[4 * c + 0] = m.mean;
    out.values[4 * c + 1] = m.stddev;
    out.values[4 * c + 2] = m.skewness;
    out.values[4 * c + 3] = m.kurtosis;
    out.degenerate = out.degenerate || m.degenerate;
  }
  return out;
}

std::vector<std::size_t> lbp_ones_counts(const GrayImage& texel, const FeatureConfig& cfg) {
  const int r = cfg.lbp_radius;
  require_size(texel, 2 * r + 1, "LBP");
  const GrayImage bin = otsu_binarize(texel);
  const CircularSampler sampler(cfg.lbp_points, r);
  std::vector<std::size_t> counts(static_cast<std::size_t>(cfg.lbp_points) + 1, 0);
  for (int y = r; y < bin.height() - r; ++y) {
    for (int x = r; x < bin.width() - r; ++x) ++counts[popcount(sampler.code_at(bin, x, y))];
  }
  return counts;
}

std::vector<double> lbp_histogram(const GrayImage& texel, const FeatureConfig& cfg) {
  const int r = cfg.lbp_radius;
  const int p = cfg.lbp_points;
  require_size(texel, 2 * r + 1, "LBP");
  const int half = p / 2;
  std::vector<double> hist(static_cast<std::size_t>(half) + 4, 0.0);

  const GrayImage bin = otsu_binarize(texel);
  const CircularSampler sampler(p, r);
  for (int y = r; y < bin.height() - r; ++y) {
    for (int x = r; x < bin.width() - r; ++x) {
      const std::uint32_t code = sampler.code_at(bin, x, y);
      const int ones = popcount(code);
      const int folded = std::min(ones, p - ones);
      const bool uniform = circular_transitions(code, p) <= 2;
      const int residue = folded - (half - 2);
      if (!uniform && residue >= 0) {
        hist[static_cast<std::size_t>(half + 1 + residue)] += 1.0;
      } else {
        hist[static_cast<std::size_t>(folded)] += 1.0;
      }
    }
  }
  l1_normalize(hist);
  return hist;
}

std::array<double, 3> lbp_semantic(const GrayImage& texel, const FeatureConfig& cfg) {
  const int p = cfg.lbp_points;
  const auto counts = lbp_ones_counts(texel, cfg);
  std::array<double, 3> out{};
  for (int k = 0; k <= p; ++k) {
    const int folded = std::min(k, p - k);
    const double c = static_cast<double>(counts[static_cast<std::size_t>(k)]);
    if (folded <= 1) {
      out[0] += c;
    } else if (folded >= p / 2 - 1) {
      out[1] += c;
    } else if (folded >= 3 && folded <= 5) {
      out[2] += c;
    }
  }
  l1_normalize(out);
  return out;
}

HogSuperbin superbin_of(int bin, int orientations) {
  // Centre angle as a multiple of pi/12, when it is one.
  const int scaled = bin * 12;
  if (scaled % orientations != 0) return HogSuperbin::IrregularOblique;
  switch (scaled / orientations) {
    case 0: return HogSuperbin::Vertical;
    case 6: return HogSuperbin::Horizontal;
    case 3:
    case 9: return HogSuperbin::Diagonal;
    case 2:
    case 4:
    case 8:
    case 10: return HogSuperbin::RegularOblique;
    default: return HogSuperbin::IrregularOblique;
  }
}

HogResult hog_superbins(const GrayImage& texel, const FeatureConfig& cfg) {
  require_size(texel, 3, "HOG");
  const int n = cfg.hog_orientations;
  const double bin_width = std::numbers::pi / n;
  std::vector<double> bins(static_cast<std::size_t>(n), 0.0);
  for (int y = 1; y < texel.height() - 1; ++y) {
    for (int x = 1; x < texel.width() - 1; ++x) {
      const double gx = static_cast<double>(texel.at(x + 1, y)) - texel.at(x - 1, y);
      const double gy = static_cast<double>(texel.at(x, y + 1)) - texel.at(x, y - 1);
      if (gx == 0.0 && gy == 0.0) continue;
      double theta = std::atan2(gy, gx);
      if (theta < 0.0) theta += std::numbers::pi;
      if (theta >= std::numbers::pi) theta -= std::numbers::pi;
      int b = static_cast<int>(std::floor(theta / bin_width + 0.5));
      if (b >= n) b -= n;
      bins[static_cast<std::size_t>(b)] += std::hypot(gx, gy);
    }
  }
  HogResult out;
  for (int b = 0; b < n; ++b) {
    out.values[static_cast<std::size_t>(superbin_of(b, n))] += bins[static_cast<std::size_t>(b)];
  }
  double total = 0.0;
  for (double v : out.values) total += v;
  if (total == 0.0) {
    out.zero_gradient = true;
    return out;
  }
  l1_normalize(out.values);
  return out;
}

NormalizedMap normalize_channels(const RgbImage& map) {
  NormalizedMap out;
  auto planes = split_channels(map);
  for (int c = 0; c < 3; ++c) {
    try {
      out.channels[c] = zscore_channel(planes[c]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroVariance) throw;
      out.channels[c] = RealPlane(map.width(), map.height(), 0.0);
      out.zero_variance[c] = true;
    }
  }
  return out;
}

FeatureVector feature_vector(const Texel& texel, const NormalizedMap& map,
                             const FeatureConfig& cfg) {
  const auto channels = crop_channels(map, texel);
  const GrayImage gray = to_grayscale(texel.pixels);

  FeatureVector fv;
  const ColorMoments color = color_moments(channels);
  const auto lbp = lbp_histogram(gray, cfg);
  const HogResult hog = hog_superbins(gray, cfg);
  if (lbp.size() != kLbpBins) {
    throw Error(ErrorCode::InvalidArgument, "feature vectors need the 12-bin LBP layout");
  }

  std::copy(color.values.begin(), color.values.end(), fv.values.begin());
  std::copy(lbp.begin(), lbp.end(), fv.values.begin() + kColorFeatures);
  std::copy(hog.values.begin(), hog.values.end(),
            fv.values.begin() + kColorFeatures + kLbpBins);
  fv.color_degenerate = color.degenerate;
  fv.hog_zero_gradient = hog.zero_gradient;

  double l1 = 0.0;
  for (double v : fv.values) l1 += std::abs(v);
  if (l1 == 0.0) {
    fv.degenerate = true;
    return fv;
  }
  for (double& v : fv.values) v /= l1;
  fv.norm_applied = true;
  return fv;
}

SimplifiedFeatureVector simplify(const Texel& texel, const NormalizedMap& map,
                                 const FeatureConfig& cfg) {
  const auto channels = crop_channels(map, texel);
  const GrayImage gray = to_grayscale(texel.pixels);

  std::vector<double> value(channels[0].pixel_count());
  for (std::size_t i = 0; i < value.size(); ++i) {
    value[i] = 0.299 * channels[0].data()[i] + 0.587 * channels[1].data()[i] +
               0.114 * channels[2].data()[i];
  }
  const Moments v = describe(value);

  SimplifiedFeatureVector out;
  for (int c = 0; c < 3; ++c) out.values[c] = describe(channels[c].data()).mean;
  out.values[3] = v.stddev;
  out.values[4] = v.skewness;
  out.values[5] = v.kurtosis;
  const auto semantic = lbp_semantic(gray, cfg);
  std::copy(semantic.begin(), semantic.end(), out.values.begin() + 6);
  const HogResult hog = hog_superbins(gray, cfg);
  std::copy(hog.values.begin(), hog.values.end(), out.values.begin() + 9);

  double l1 = 0.0;
  for (double x : out.values) l1 += std::abs(x);
  if (l1 == 0.0) {
    out.degenerate = true;
    return out;
  }
  for (double& x : out.values) x /= l1;
  out.norm_applied = true;
  return out;
}

std::vector<FeatureVector> extract_features_serial(std::span<const Texel> texels,
                                                   const NormalizedMap& map,
                                                   const FeatureConfig& cfg) {
  cfg.validate();
  std::vector<FeatureVector> out;
  out.reserve(texels.size());
  for (const auto& t : texels) out.push_back(feature_vector(t, map, cfg));
  return out;
}

std::vector<FeatureVector> extract_features(std::span<const Texel> texels,
                                            const NormalizedMap& map,
                                            const FeatureConfig& cfg) {
  cfg.validate();
  std::vector<FeatureVector> out(texels.size());
  const auto n = static_cast<std::ptrdiff_t>(texels.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = feature_vector(texels[static_cast<std::size_t>(i)], map, cfg);
    } catch (...) {
#pragma omp critical(figkit_features_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<SimplifiedFeatureVector> extract_simplified(std::span<const Texel> texels,
                                                        const NormalizedMap& map,
                                                        const FeatureConfig& cfg) {
  cfg.validate();
  std::vector<SimplifiedFeatureVector> out(texels.size());
  const auto n = static_cast<std::ptrdiff_t>(texels.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = simplify(texels[static_cast<std::size_t>(i)], map, cfg);
    } catch (...) {
#pragma omp critical(figkit_features_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace figkit
