#include "figkit/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "figkit/error.hpp"

namespace figkit {

namespace {

constexpr double kMinShifted = 0.1;
constexpr double kLogFloor = -1.0;  // log10(kMinShifted)

const Rgb kPalette[] = {{31, 119, 180}, {214, 39, 40},  {44, 160, 44},  {255, 127, 14},
                        {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {127, 127, 127}};

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
  return s;
}

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

double KurtographGeometry::radius_of(double kappa) const {
  const double span = log_max - kLogFloor;
  return outer_radius * (std::log10(kappa + alpha) - kLogFloor) / span;
}

double KurtographGeometry::decade() const { return outer_radius / (log_max - kLogFloor); }

KurtographGeometry kurtograph_geometry(const KurtographSpec& spec, double outer_radius) {
  if (spec.series.empty()) throw Error(ErrorCode::EmptySeries, "kurtograph has no series");
  const std::size_t f = spec.feature_labels.size();
  if (f < 3) throw Error(ErrorCode::InvalidArgument, "kurtograph needs at least 3 features");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : spec.series) {
    if (s.kappa.size() != f) {
      throw Error(ErrorCode::InvalidArgument,
                  "series '" + s.name + "' does not match the feature labels");
    }
    for (double k : s.kappa) {
      if (!std::isfinite(k)) throw Error(ErrorCode::InvalidArgument, "kappa must be finite");
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  }
  KurtographGeometry g;
  g.alpha = std::max(0.0, kMinShifted - lo);
  g.log_max = std::log10(hi + g.alpha);
  if (!(g.log_max > kLogFloor)) g.log_max = kLogFloor + 1.0;
  g.outer_radius = outer_radius;
  for (const auto& s : spec.series) {
    std::vector<double> r;
    for (double k : s.kappa) r.push_back(g.radius_of(k));
    g.radii.push_back(std::move(r));
  }
  return g;
}

std::string render_kurtograph(const KurtographSpec& spec) {
  constexpr double kOuter = 220.0;
  constexpr double kCx = 360.0;
  constexpr double kCy = 320.0;
  const auto g = kurtograph_geometry(spec, kOuter);
  const std::size_t f = spec.feature_labels.size();

  auto angle = [f](std::size_t i) {
    return -std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * static_cast<double>(i) / f;
  };

  std::ostringstream svg;
  const double height = 660.0 + 20.0 * static_cast<double>(spec.series.size());
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"720\" height=\""
      << fmt(height, 0) << "\" viewBox=\"0 0 720 " << fmt(height, 0) << "\">\n";
  if (!spec.metadata.empty()) svg << "<metadata>" << xml_escape(spec.metadata) << "</metadata>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!spec.title.empty()) {
    svg << "<text x=\"360\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"18\">"
        << xml_escape(spec.title) << "</text>\n";
  }

  // One ring per decade of kappa + alpha, from 0.1 to the top decade.
  svg << "<g fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (int d = static_cast<int>(kLogFloor) + 1; d <= static_cast<int>(std::ceil(g.log_max)); ++d) {
    const double r = kOuter * (d - kLogFloor) / (g.log_max - kLogFloor);
    if (r > kOuter + 1e-9) break;
    svg << "<circle cx=\"" << fmt(kCx) << "\" cy=\"" << fmt(kCy) << "\" r=\"" << fmt(r)
        << "\"/>\n";
  }
  svg << "<circle cx=\"" << fmt(kCx) << "\" cy=\"" << fmt(kCy) << "\" r=\"" << fmt(kOuter)
      << "\" stroke=\"#888888\"/>\n";
  svg << "</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#666666\">\n";
  for (int d = static_cast<int>(kLogFloor) + 1; d <= static_cast<int>(std::ceil(g.log_max)); ++d) {
    const double r = kOuter * (d - kLogFloor) / (g.log_max - kLogFloor);
    if (r > kOuter + 1e-9) break;
    svg << "<text x=\"" << fmt(kCx + 3) << "\" y=\"" << fmt(kCy - r - 2) << "\">1e" << d
        << "</text>\n";
  }
  svg << "</g>\n";

  svg << "<g class=\"spokes\" stroke=\"#999999\" stroke-width=\"1\">\n";
  for (std::size_t i = 0; i < f; ++i) {
    const double a = angle(i);
    svg << "<line x1=\"" << fmt(kCx) << "\" y1=\"" << fmt(kCy) << "\" x2=\""
        << fmt(kCx + kOuter * std::cos(a)) << "\" y2=\"" << fmt(kCy + kOuter * std::sin(a))
        << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < f; ++i) {
    const double a = angle(i);
    const double x = kCx + (kOuter + 18.0) * std::cos(a);
    const double y = kCy + (kOuter + 18.0) * std::sin(a);
    const char* anchor = std::cos(a) > 0.2 ? "start" : (std::cos(a) < -0.2 ? "end" : "middle");
    svg << "<text class=\"spoke-label\" x=\"" << fmt(x) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"" << anchor << "\">" << xml_escape(spec.feature_labels[i])
        << "</text>\n";
  }
  svg << "</g>\n";

  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const Rgb color = kPalette[s % std::size(kPalette)];
    svg << "<polygon class=\"series\" fill=\"" << hex(color)
        << "\" fill-opacity=\"0.12\" stroke=\"" << hex(color)
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < f; ++i) {
      const double r = g.radii[s][i];
      const double a = angle(i);
      if (i) svg << ' ';
      svg << fmt(kCx + r * std::cos(a), 3) << ',' << fmt(kCy + r * std::sin(a), 3);
    }
    svg << "\"/>\n";
  }

  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const Rgb color = kPalette[s % std::size(kPalette)];
    const double y = 600.0 + 20.0 * static_cast<double>(s);
    svg << "<rect x=\"40\" y=\"" << fmt(y - 10) << "\" width=\"14\" height=\"10\" fill=\""
        << hex(color) << "\"/>\n"
        << "<text x=\"60\" y=\"" << fmt(y) << "\">" << xml_escape(spec.series[s].name)
        << "</text>\n";
  }
  if (g.alpha > 0.0) {
    svg << "<text x=\"40\" y=\"" << fmt(600.0 + 20.0 * static_cast<double>(spec.series.size()))
        << "\">alpha = " << fmt(g.alpha, 4) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

Rgb diverging_color(double r) {
  r = std::clamp(r, -1.0, 1.0);
  const Rgb pos{178, 24, 43};
  const Rgb neg{33, 102, 172};
  const Rgb& end = r >= 0.0 ? pos : neg;
  const double t = std::abs(r);
  Rgb out;
  for (int k = 0; k < 3; ++k) {
    out[k] = static_cast<std::uint8_t>(std::lround(255.0 + t * (end[k] - 255.0)));
  }
  return out;
}

std::string render_heatmap(const CorrelationMatrix& m, const std::string& title,
                           const std::string& metadata) {
  if (m.size == 0 || m.r.size() != m.size * m.size) {
    throw Error(ErrorCode::InvalidArgument, "heatmap needs a square matrix");
  }
  constexpr double kCell = 56.0;
  constexpr double kLeft = 180.0;
  constexpr double kTop = 180.0;
  const double n = static_cast<double>(m.size);
  const double width = kLeft + n * kCell + 20.0;
  const double height = kTop + n * kCell + 20.0;

  auto label = [&](std::size_t i) {
    return m.labels[i].first.empty() ? m.labels[i].second
                                     : m.labels[i].first + " / " + m.labels[i].second;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width, 0)
      << "\" height=\"" << fmt(height, 0) << "\" viewBox=\"0 0 " << fmt(width, 0) << ' '
      << fmt(height, 0) << "\">\n";
  if (!metadata.empty()) svg << "<metadata>" << xml_escape(metadata) << "</metadata>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << xml_escape(title) << "</text>\n";
  }
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < m.size; ++i) {
    const double y = kTop + (static_cast<double>(i) + 0.5) * kCell + 4.0;
    svg << "<text class=\"row-label\" x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(y)
        << "\" text-anchor=\"end\">" << xml_escape(label(i)) << "</text>\n";
    const double x = kLeft + (static_cast<double>(i) + 0.5) * kCell;
    svg << "<text class=\"col-label\" x=\"" << fmt(x) << "\" y=\"" << fmt(kTop - 6)
        << "\" transform=\"rotate(-60 " << fmt(x) << ' ' << fmt(kTop - 6) << ")\">"
        << xml_escape(label(i)) << "</text>\n";
  }
  svg << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">\n";
  for (std::size_t i = 0; i < m.size; ++i) {
    for (std::size_t j = 0; j < m.size; ++j) {
      const double r = m.at(i, j);
      const double x = kLeft + static_cast<double>(j) * kCell;
      const double y = kTop + static_cast<double>(i) * kCell;
      svg << "<rect class=\"cell\" x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
          << fmt(kCell) << "\" height=\"" << fmt(kCell) << "\" fill=\"" << hex(diverging_color(r))
          << "\" stroke=\"#ffffff\"/>\n"
          << "<text class=\"value\" x=\"" << fmt(x + kCell / 2) << "\" y=\""
          << fmt(y + kCell / 2 + 4) << "\" fill=\"" << (std::abs(r) > 0.6 ? "#ffffff" : "#000000")
          << "\">" << fmt(r) << "</text>\n";
    }
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

RgbImage render_montage(std::span<const Texel> texels, const GridLayout& layout, int cell_px) {
  if (cell_px < 1) throw Error(ErrorCode::InvalidArgument, "cell size must be positive");
  if (layout.cells.size() != texels.size() || layout.rows < 1 || layout.cols < 1) {
    throw Error(ErrorCode::LayoutMismatch, "layout does not cover the texels");
  }
  RgbImage out(layout.cols * cell_px, layout.rows * cell_px, Rgb{128, 128, 128});
  for (std::size_t i = 0; i < texels.size(); ++i) {
    const auto [row, col] = layout.cells[i];
    if (row < 0 || row >= layout.rows || col < 0 || col >= layout.cols) {
      throw Error(ErrorCode::LayoutMismatch, "layout cell outside the grid");
    }
    const RgbImage& src = texels[i].pixels;
    for (int dy = 0; dy < cell_px; ++dy) {
      const int sy = std::min(src.height() - 1, dy * src.height() / cell_px);
      for (int dx = 0; dx < cell_px; ++dx) {
        const int sx = std::min(src.width() - 1, dx * src.width() / cell_px);
        out.set(col * cell_px + dx, row * cell_px + dy, src.at(sx, sy));
      }
    }
  }
  return out;
}

}  // namespace figkit
