#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "figkit/corpus.hpp"

namespace figkit {

/// K x K pixel counts indexed [ground truth][prediction].
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(const Ontology& ontology);

  const Ontology& ontology() const noexcept { return *ontology_; }
  int classes() const noexcept { return k_; }
  std::uint64_t at(int gt, int pred) const noexcept { return counts_[gt * k_ + pred]; }
  void add(int gt, int pred, std::uint64_t n = 1) noexcept { counts_[gt * k_ + pred] += n; }
  std::uint64_t total() const noexcept;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) noexcept {
    return a.ontology_ == b.ontology_ && a.counts_ == b.counts_;
  }

 private:
  const Ontology* ontology_;
  int k_;
  std::vector<std::uint64_t> counts_;
};

/// Throws ShapeMismatch on differing dimensions or ontologies.
ConfusionMatrix confusion(const ClassMap& pred, const ClassMap& gt);

struct ClassScore {
  /// False when the class is absent from both ground truth and prediction.
  bool defined = false;
  double iou = 0.0;
  double accuracy = 0.0;
  /// Undefined (nullopt) when the class is never predicted / never present.
  std::optional<double> precision;
  std::optional<double> recall;
};

struct ClassMetrics {
  std::vector<std::string> class_names;
  std::vector<ClassScore> per_class;
  double mean_iou = 0.0;
  double mean_accuracy = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  /// Share of correctly classified pixels.
  double pixel_accuracy = 0.0;
  /// Some class was excluded from the means.
  bool has_undefined = false;
};

ClassMetrics metrics(const ConfusionMatrix& cm);

struct NormalizedConfusion {
  int classes = 0;
  std::vector<double> values;
  /// Ground-truth rows with no pixels (left at zero).
  std::vector<bool> empty_rows;

  double at(int gt, int pred) const { return values[static_cast<std::size_t>(gt * classes + pred)]; }
};

/// Each ground-truth row divided by its sum, so the diagonal is recall.
NormalizedConfusion normalize_confusion(const ConfusionMatrix& cm);

struct PatchResult {
  std::string id;
  ConfusionMatrix cm;
};

struct BestHalf {
  double median_miou = 0.0;
  std::vector<std::string> selected;
  ConfusionMatrix pooled;
  ClassMetrics metrics;
  /// No patch strictly exceeded the median, so >= was used.
  bool tie_fallback = false;
};

/// Pooled metrics over the patches whose mIoU strictly exceeds the median
/// per-patch mIoU.
BestHalf best_half(std::span<const PatchResult> patches);

/// Micro-averaged corpus matrix.
ConfusionMatrix pool(std::span<const PatchResult> patches);

enum class PowerLawWeighting { Uniform, LinearInSize };
enum class FitTarget { Score, Complement };

struct PowerLawOptions {
  PowerLawWeighting weighting = PowerLawWeighting::LinearInSize;
  FitTarget target = FitTarget::Score;
  /// Grid points over c in (0, c_max] before golden-section refinement.
  int grid_points = 2000;
  double c_max = 20.0;
  bool refine = true;
};

/// f(x) = b + a * x^(-c).
struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  /// RMS of unweighted residuals on the fitted target.
  double residual = 0.0;
  /// Weighted sum of squared residuals that was minimized.
  double objective = 0.0;
  FitTarget target = FitTarget::Score;
  std::vector<double> sizes;
  std::vector<double> scores;

  /// Model value at x, mapped back to the score scale.
  double operator()(double x) const;
};

PowerLawFit fit_power_law(std::span<const double> sizes, std::span<const double> scores,
                          const PowerLawOptions& options = {});

/// Weighted least-squares (a, b) for a fixed exponent c and the attained
/// objective.
struct FixedExponentFit {
  double a = 0.0;
  double b = 0.0;
  double objective = 0.0;
};
FixedExponentFit fit_fixed_exponent(std::span<const double> sizes, std::span<const double> targets,
                                    std::span<const double> weights, double c);

double extrapolate_score(const PowerLawFit& fit, double size);

/// Training size at which the model reaches `target_score`. Throws
/// Unreachable when the target lies beyond the asymptote b or on the wrong
/// side of the curve.
double extrapolate_size(const PowerLawFit& fit, double target_score);

}  // namespace figkit
