#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace figkit {

inline constexpr int kKappaBins = 32;
/// Kurtosis assigned to a point-mass mode (zero spread or < 4 members).
inline constexpr double kSpikeCap = 1e4;
inline constexpr std::size_t kMinModePopulation = 4;
inline constexpr double kZeroSigma = 1e-12;

/// 32 equal-width bins over [min, max]; the maximum lands in the last bin.
struct Histogram32 {
  std::array<double, kKappaBins + 1> edges{};
  std::array<double, kKappaBins> counts{};
};

Histogram32 histogram32(std::span<const double> values);

/// Savitzky-Golay smoothing (centred least-squares polynomial fit) with
/// mirror padding at both ends. window = 3, degree = 1 is a 3-point mean.
std::vector<double> savgol_smooth(std::span<const double> counts, int window = 3, int degree = 1);

/// Local minima of a smoothed histogram and the value splits they induce.
struct ModeSplit {
  Histogram32 histogram;
  std::array<double, kKappaBins> smoothed{};
  /// Leftmost bin of each interior minimum (a plateau of equal values
  /// counts once).
  std::vector<int> minima;
  /// Value at which each minimum cuts the range: the midpoint of the
  /// minimum's bin span. Values <= split go to the lower mode.
  std::vector<double> splits;
};

/// Strict window-3 minima of `smoothed`, with equal-valued plateaus bounded
/// by larger neighbours treated as one minimum. Returns [first, last] bin
/// index pairs for each minimum.
std::vector<std::pair<int, int>> find_minima(std::span<const double> smoothed);

ModeSplit split_modes(std::span<const double> values);

/// Population kurtosis E[((x - mu) / sigma)^4] (not excess). Returns
/// kSpikeCap for fewer than 4 values or sigma < 1e-12.
double kurtosis(std::span<const double> values);

struct KappaResult {
  double kappa = 0.0;
  /// Member count of each mode, lowest values first.
  std::vector<std::size_t> mode_sizes;
  std::vector<double> mode_kurtosis;
  /// All values equal.
  bool degenerate = false;
};

/// Population-weighted sum of per-mode kurtoses. Needs at least 8 values.
KappaResult kappa_detail(std::span<const double> values);
double kappa(std::span<const double> values);

/// N x F sample matrix (row-major) for one named set of texels.
struct FeatureSampleSet {
  std::string name;
  std::size_t features = 0;
  std::vector<double> samples;

  std::size_t size() const noexcept { return features ? samples.size() / features : 0; }
  std::vector<double> column(std::size_t f) const;
  double at(std::size_t row, std::size_t f) const { return samples[row * features + f]; }
};

struct FeatureKappa {
  std::string name;
  /// κ of the full set.
  double kappa = 0.0;
  /// Median κ over the downsampling trials.
  double kappa_median = 0.0;
  /// (q97.5 - q2.5) / (2 * median), in percent.
  double ci95_halfwidth_pct = 0.0;
  bool degenerate = false;
};

struct KappaReport {
  std::string set;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t downsample_size = 0;
  std::vector<FeatureKappa> features;
  double mean_kappa = 0.0;
  double median_kappa = 0.0;
};

struct BootstrapOptions {
  std::size_t trials = 5000;
  std::uint64_t seed = 0;
  /// Names for the feature columns; defaults to f00, f01, ...
  std::vector<std::string> feature_names;
};

/// Downsamples every set without replacement to the smallest set's size,
/// `trials` times, and reports per-feature median κ with the relative 95%
/// interval half-width. Trial t of set s draws from the stream
/// derive_seed(seed, t, s), so results do not depend on thread count.
std::vector<KappaReport> bootstrap_kappa(std::span<const FeatureSampleSet> sets,
                                         const BootstrapOptions& options);
std::vector<KappaReport> bootstrap_kappa_serial(std::span<const FeatureSampleSet> sets,
                                                const BootstrapOptions& options);

/// Mean and median over the per-feature median κ values.
std::pair<double, double> mean_median_kappa(const KappaReport& report);

/// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double p);
double median(std::vector<double> values);

}  // namespace figkit
