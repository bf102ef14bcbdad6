#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "figkit/kappa.hpp"

namespace figkit {

inline constexpr int kSignatureBins = 32;

struct FeatureRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Per-feature [min, max] over every sample of every set.
std::vector<FeatureRange> pooled_ranges(std::span<const FeatureSampleSet> sets);

/// Per-feature histograms of one (corpus, class) texel set.
struct ClassSignature {
  std::string corpus;
  std::string class_name;
  std::size_t features = 0;
  int bins = kSignatureBins;
  std::size_t samples = 0;
  /// features x bins counts, row-major; each row sums to `samples`.
  std::vector<double> histograms;

  double count(std::size_t feature, int bin) const {
    return histograms[feature * static_cast<std::size_t>(bins) + static_cast<std::size_t>(bin)];
  }
};

/// Bin of `x` in [range.lo, range.hi] split in `bins` equal parts; the upper
/// bound belongs to the last bin.
int bin_index(double x, const FeatureRange& range, int bins);

ClassSignature class_signature(const FeatureSampleSet& set, std::span<const FeatureRange> ranges,
                               std::string corpus, std::string class_name,
                               int bins = kSignatureBins);

struct CorrelationMatrix {
  /// (corpus, class) per row/column.
  std::vector<std::pair<std::string, std::string>> labels;
  std::size_t size = 0;
  std::vector<double> r;
  /// Two-sided p-values of r under the null of zero correlation.
  std::vector<double> p;

  double at(std::size_t i, std::size_t j) const { return r[i * size + j]; }
  double p_at(std::size_t i, std::size_t j) const { return p[i * size + j]; }
};

/// Pearson r of two equal-length vectors, clamped to [-1, 1]. Throws
/// ZeroVarianceVector when either vector is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// Two-sided p-value of a Pearson r on n pairs (Student t, n - 2 dof).
double pearson_p_value(double r, std::size_t n);

CorrelationMatrix correlate(std::span<const ClassSignature> signatures);

struct InterclassMeans {
  std::string corpus;
  std::vector<std::string> classes;
  std::vector<double> per_class;
  double overall = 0.0;
};

/// Mean off-diagonal r within one corpus, per class and over all pairs.
InterclassMeans mean_interclass(const CorrelationMatrix& m, const std::string& corpus);

struct TsneOptions {
  double perplexity = 30.0;
  int iterations = 1000;
  std::uint64_t seed = 0;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
};

struct Embedding2D {
  std::size_t n = 0;
  /// n x 2, row-major.
  std::vector<double> coords;
  double perplexity = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;

  double x(std::size_t i) const { return coords[2 * i]; }
  double y(std::size_t i) const { return coords[2 * i + 1]; }
};

/// Exact O(N^2) t-SNE on an n x dims row-major matrix. Single-threaded and
/// deterministic for a given seed. Needs n > 3 * perplexity.
Embedding2D tsne_project(std::span<const double> data, std::size_t n, std::size_t dims,
                         const TsneOptions& options = {});

struct GridLayout {
  int rows = 0;
  int cols = 0;
  /// (row, col) of each embedded point.
  std::vector<std::pair<int, int>> cells;
};

/// cols = ceil(sqrt(n)), rows = ceil(n / cols).
std::pair<int, int> grid_shape(std::size_t n);

/// Coordinates min-max scaled to [0, 1] per axis (0.5 on a flat axis).
std::vector<double> normalized_coords(const Embedding2D& emb);

/// Sum of squared distances between normalized points and their cell
/// centres ((col + 0.5) / cols, (row + 0.5) / rows).
double layout_cost(const Embedding2D& emb, const GridLayout& layout);

/// Optimal bijective placement of embedded points onto grid cells.
GridLayout grid_assign(const Embedding2D& emb);

/// Rectangular linear assignment (rows <= cols) by shortest augmenting
/// paths. Returns the column assigned to each row.
std::vector<int> solve_assignment(std::span<const double> cost, int rows, int cols);

}  // namespace figkit
