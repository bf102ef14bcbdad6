#include "figkit/raster.hpp"

#include <array>
#include <cmath>
#include <cstdint>

#include "figkit/lbp.hpp"

namespace figkit {

std::string_view to_string(AblationMode mode) noexcept {
  switch (mode) {
    case AblationMode::Reference: return "reference";
    case AblationMode::Gray: return "gray";
    case AblationMode::Binary: return "binary";
    case AblationMode::TexturelessBinary: return "textureless";
  }
  return "reference";
}

std::optional<AblationMode> parse_ablation_mode(std::string_view name) noexcept {
  for (auto m : {AblationMode::Reference, AblationMode::Gray, AblationMode::Binary,
                 AblationMode::TexturelessBinary}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

std::uint8_t luma(Rgb c) noexcept {
  const double y = 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2];
  const double r = std::round(y);
  return static_cast<std::uint8_t>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
}

GrayImage to_grayscale(const RgbImage& img) {
  std::vector<std::uint8_t> out(img.pixel_count());
  const auto src = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = luma({src[3 * i], src[3 * i + 1], src[3 * i + 2]});
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

OtsuResult otsu_threshold(const GrayImage& img) {
  std::array<std::uint64_t, 256> hist{};
  for (auto v : img.data()) ++hist[v];

  const std::uint64_t total = img.pixel_count();
  unsigned __int128 total_sum = 0;
  for (int v = 0; v < 256; ++v) total_sum += static_cast<unsigned __int128>(hist[v]) * v;

  for (int v = 0; v < 256; ++v) {
    if (hist[v] == total) return {static_cast<std::uint8_t>(v), true};
  }

  // Inter-class variance up to a constant factor: (n1*s0 - n0*s1)^2 / (n0*n1).
  // Only thresholds sitting on an occupied bin start a new partition; empty
  // bins above it reproduce the same split, so the lowest threshold of each
  // partition is the occupied one.
  long double best = -1.0L;
  int best_t = 0;
  std::uint64_t n0 = 0;
  unsigned __int128 s0 = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += hist[t];
    s0 += static_cast<unsigned __int128>(hist[t]) * t;
    if (hist[t] == 0 || n0 == 0 || n0 == total) continue;
    const std::uint64_t n1 = total - n0;
    const unsigned __int128 s1 = total_sum - s0;
    const __int128 diff = static_cast<__int128>(s0 * n1) - static_cast<__int128>(s1 * n0);
    const long double d = static_cast<long double>(diff);
    const long double var = d * d / (static_cast<long double>(n0) * static_cast<long double>(n1));
    if (var > best) {
      best = var;
      best_t = t;
    }
  }
  return {static_cast<std::uint8_t>(best_t), false};
}

GrayImage binarize(const GrayImage& img, const OtsuResult& otsu) {
  if (otsu.degenerate) return GrayImage(img.width(), img.height(), 255);
  std::vector<std::uint8_t> out(img.pixel_count());
  const auto src = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = src[i] > otsu.threshold ? 255 : 0;
  return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage otsu_binarize(const GrayImage& img, bool* degenerate) {
  const auto otsu = otsu_threshold(img);
  if (degenerate) *degenerate = otsu.degenerate;
  return binarize(img, otsu);
}

RealPlane zscore_channel(const RealPlane& channel) {
  const auto src = channel.data();
  if (src.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "z-score needs at least 2 pixels");
  }
  const double n = static_cast<double>(src.size());
  double mean = 0.0;
  for (double v : src) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : src) var += (v - mean) * (v - mean);
  var /= n;
  const double sigma = std::sqrt(var);
  if (!(sigma > 0.0)) throw Error(ErrorCode::ZeroVariance, "channel has zero variance");

  std::vector<double> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = (src[i] - mean) / sigma;
  return RealPlane(channel.width(), channel.height(), std::move(out));
}

GrayImage lbp_code_map(const GrayImage& img, int radius) {
  const CircularSampler sampler(8 * radius, radius);
  const double max_code = std::ldexp(1.0, sampler.points()) - 1.0;
  GrayImage out(img.width(), img.height(), 0);
  for (int y = radius; y < img.height() - radius; ++y) {
    for (int x = radius; x < img.width() - radius; ++x) {
      const double code = sampler.code_at(img, x, y);
      out.set(x, y, static_cast<std::uint8_t>(std::lround(code * 255.0 / max_code)));
    }
  }
  return out;
}

RgbImage gray_to_rgb(const GrayImage& img) {
  std::vector<std::uint8_t> out(img.pixel_count() * 3);
  const auto src = img.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = src[i];
  }
  return RgbImage(img.width(), img.height(), std::move(out));
}

AblationResult ablate(const RgbImage& img, AblationMode mode, int lbp_radius) {
  switch (mode) {
    case AblationMode::Reference:
      return {img, false};
    case AblationMode::Gray:
      return {gray_to_rgb(to_grayscale(img)), false};
    case AblationMode::Binary: {
      bool degenerate = false;
      auto bin = otsu_binarize(to_grayscale(img), &degenerate);
      return {gray_to_rgb(bin), degenerate};
    }
    case AblationMode::TexturelessBinary: {
      bool first = false;
      auto bin = otsu_binarize(to_grayscale(img), &first);
      bool second = false;
      auto out = otsu_binarize(lbp_code_map(bin, lbp_radius), &second);
      return {gray_to_rgb(out), first || second};
    }
  }
  return {img, false};
}

}  // namespace figkit
