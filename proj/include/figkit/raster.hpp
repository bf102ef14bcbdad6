#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "figkit/image.hpp"

namespace figkit {

enum class AblationMode { Reference, Gray, Binary, TexturelessBinary };

std::string_view to_string(AblationMode mode) noexcept;
std::optional<AblationMode> parse_ablation_mode(std::string_view name) noexcept;

/// BT.601 luma, rounded to nearest.
GrayImage to_grayscale(const RgbImage& img);

std::uint8_t luma(Rgb c) noexcept;

struct OtsuResult {
  std::uint8_t threshold = 0;
  /// Set when every pixel has the same value; threshold is that value.
  bool degenerate = false;
};

/// Otsu's method on the 256-bin histogram. Pixels strictly greater than the
/// threshold are foreground. Among thresholds with equal inter-class
/// variance the lowest one wins.
OtsuResult otsu_threshold(const GrayImage& img);

/// Maps pixels > threshold to 255 and the rest to 0. A degenerate Otsu
/// result yields an all-foreground image.
GrayImage binarize(const GrayImage& img, const OtsuResult& otsu);

/// Otsu binarization in one step.
GrayImage otsu_binarize(const GrayImage& img, bool* degenerate = nullptr);

/// x' = (x - mean) / sigma with the population standard deviation.
/// Throws Error{ZeroVariance} for a constant channel.
RealPlane zscore_channel(const RealPlane& channel);

struct AblationResult {
  RgbImage image;
  bool degenerate = false;
};

/// Visual-cue ablation chain: identity, gray, Otsu binary, or Otsu binary
/// followed by an LBP code map (radius `lbp_radius`, 8 * radius points) and a
/// second Otsu pass.
AblationResult ablate(const RgbImage& img, AblationMode mode, int lbp_radius = 3);

/// Raw (non rotation-invariant) LBP code map with P = 8 * radius points,
/// rescaled linearly to [0, 255]. Border pixels closer than `radius` to the
/// edge receive code 0.
GrayImage lbp_code_map(const GrayImage& img, int radius);

RgbImage gray_to_rgb(const GrayImage& img);

}  // namespace figkit
