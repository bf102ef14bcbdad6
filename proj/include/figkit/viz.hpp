#pragma once

#include <span>
#include <string>
#include <vector>

#include "figkit/analysis.hpp"
#include "figkit/corpus.hpp"
#include "figkit/image.hpp"

namespace figkit {

struct KurtographSeries {
  std::string name;
  std::vector<double> kappa;
};

struct KurtographSpec {
  std::string title;
  std::vector<std::string> feature_labels;
  std::vector<KurtographSeries> series;
  /// Free-form text written into the SVG <metadata> element.
  std::string metadata;
};

/// Radial geometry: radius = outer * (log10(kappa + alpha) + 1) / (log_max + 1),
/// so 0.1 sits at the centre and the largest kappa + alpha on the outer ring.
struct KurtographGeometry {
  double alpha = 0.0;
  double log_max = 0.0;
  double outer_radius = 0.0;
  /// radii[series][feature]
  std::vector<std::vector<double>> radii;

  double radius_of(double kappa) const;
  /// Radial length of one decade of kappa.
  double decade() const;
};

KurtographGeometry kurtograph_geometry(const KurtographSpec& spec, double outer_radius);

/// Throws EmptySeries when there is nothing to draw and InvalidArgument when
/// series lengths disagree with the labels.
std::string render_kurtograph(const KurtographSpec& spec);

/// Diverging blue-white-red color for r in [-1, 1].
Rgb diverging_color(double r);

std::string render_heatmap(const CorrelationMatrix& m, const std::string& title = {},
                           const std::string& metadata = {});

/// Texels resampled (nearest neighbour) to `cell_px` squares at their grid
/// cells; unused cells are (128, 128, 128).
RgbImage render_montage(std::span<const Texel> texels, const GridLayout& layout, int cell_px);

std::string xml_escape(std::string_view text);

}  // namespace figkit
