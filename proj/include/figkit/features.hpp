#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "figkit/corpus.hpp"
#include "figkit/image.hpp"

namespace figkit {

struct FeatureConfig {
  int lbp_radius = 2;
  int lbp_points = 16;
  int hog_orientations = 24;
  int histogram_bins_per_channel = 256;
  int texel_size = 50;

  /// Throws InvalidArgument unless lbp_points == 8 * lbp_radius, the
  /// orientation count is a multiple of 12 and the LBP layout has 12 bins.
  void validate() const;
};

inline constexpr int kColorFeatures = 12;
inline constexpr int kLbpBins = 12;
inline constexpr int kHogSuperbins = 5;
inline constexpr int kFeatureCount = kColorFeatures + kLbpBins + kHogSuperbins;
inline constexpr int kSimplifiedFeatureCount = 14;

/// Human-readable feature names in vector order.
const std::array<std::string, kFeatureCount>& feature_labels();
const std::array<std::string, kSimplifiedFeatureCount>& simplified_feature_labels();

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  bool degenerate = false;
};

/// Population mean, standard deviation, E[z^3] and E[z^4]. Zero variance
/// gives skewness = kurtosis = 0 with the degenerate flag set.
Moments describe(std::span<const double> values);

struct ColorMoments {
  /// (mean, std, skew, kurt) for R, then G, then B.
  std::array<double, kColorFeatures> values{};
  bool degenerate = false;
};

ColorMoments color_moments(const ChannelPlanes& channels);

/// 12-bin rotation-invariant LBP histogram of the Otsu-binarized texel,
/// L1-normalized.
///
/// Every pixel's code is keyed by its number of set bits k (0..16), which
/// already fixes the rotation: the canonical shift only reorders bits. Keys
/// are folded k <-> 16 - k into 0..8. Uniform codes (at most two circular
/// transitions) land in bin min(k, 16 - k). Non-uniform codes with folded key
/// 6, 7 or 8 (the keys that own the most non-uniform patterns) go to the
/// residue bins 9, 10, 11; other non-uniform codes share the uniform bin of
/// their folded key.
std::vector<double> lbp_histogram(const GrayImage& texel, const FeatureConfig& cfg = {});

/// Raw counts of set-bit keys 0..P over the binarized texel interior.
std::vector<std::size_t> lbp_ones_counts(const GrayImage& texel, const FeatureConfig& cfg = {});

/// (flat, edge, corner) shares of the LBP codes, L1-normalized over the
/// three groups. Keys outside the three groups are dropped; the result is
/// all zero when nothing is classified.
std::array<double, 3> lbp_semantic(const GrayImage& texel, const FeatureConfig& cfg = {});

enum class HogSuperbin { Vertical, Horizontal, Diagonal, RegularOblique, IrregularOblique };

/// Superbin of the orientation bin centred on bin * pi / orientations.
HogSuperbin superbin_of(int bin, int orientations);

struct HogResult {
  std::array<double, kHogSuperbins> values{};
  bool zero_gradient = false;
};

/// Magnitude-weighted unsigned gradient orientations over the whole texel
/// (one cell), grouped in five superbins and L1-normalized.
HogResult hog_superbins(const GrayImage& texel, const FeatureConfig& cfg = {});

/// Per-map channel z-scores, the input of the color descriptors.
struct NormalizedMap {
  ChannelPlanes channels;
  /// Channels with zero variance are centered only (all zeros).
  std::array<bool, 3> zero_variance{};
};

NormalizedMap normalize_channels(const RgbImage& map);

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  bool norm_applied = false;
  /// Set when the concatenated descriptors are all zero.
  bool degenerate = false;
  bool color_degenerate = false;
  bool hog_zero_gradient = false;
};

struct SimplifiedFeatureVector {
  std::array<double, kSimplifiedFeatureCount> values{};
  bool norm_applied = false;
  bool degenerate = false;
};

/// The 29 descriptors of one texel; `map` supplies the normalized channels
/// of the map the texel was cut from (indexed at texel.x, texel.y).
FeatureVector feature_vector(const Texel& texel, const NormalizedMap& map,
                             const FeatureConfig& cfg = {});

/// The 14-feature reduction: channel means, value-plane std/skew/kurt, LBP
/// flat/edge/corner and the five HOG superbins.
SimplifiedFeatureVector simplify(const Texel& texel, const NormalizedMap& map,
                                 const FeatureConfig& cfg = {});

/// Batch extraction over texels of one map. Output order equals input order.
std::vector<FeatureVector> extract_features(std::span<const Texel> texels,
                                            const NormalizedMap& map,
                                            const FeatureConfig& cfg = {});
std::vector<FeatureVector> extract_features_serial(std::span<const Texel> texels,
                                                   const NormalizedMap& map,
                                                   const FeatureConfig& cfg = {});
std::vector<SimplifiedFeatureVector> extract_simplified(std::span<const Texel> texels,
                                                        const NormalizedMap& map,
                                                        const FeatureConfig& cfg = {});

}  // namespace figkit
