#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "figkit/image.hpp"

namespace figkit {

/// Ordered set of semantic classes with their label colors.
class Ontology {
 public:
  struct Class {
    std::string name;
    Rgb color;
  };

  /// frame, road network, blocks, water, non-built
  static const Ontology& five_class();
  /// frame, road network, map content
  static const Ontology& three_class();
  /// The shared instance for arity 3 or 5; throws WrongArity otherwise.
  static const Ontology& for_arity(int arity);

  int arity() const noexcept { return static_cast<int>(classes_.size()); }
  const std::vector<Class>& classes() const noexcept { return classes_; }
  const std::string& name(int index) const { return classes_.at(index).name; }
  Rgb color(int index) const { return classes_.at(index).color; }
  std::optional<int> index_of(std::string_view name) const noexcept;

  friend bool operator==(const Ontology& a, const Ontology& b) noexcept {
    return &a == &b;
  }

 private:
  explicit Ontology(std::vector<Class> classes) : classes_(std::move(classes)) {}
  std::vector<Class> classes_;
};

namespace classes5 {
inline constexpr int kFrame = 0;
inline constexpr int kRoad = 1;
inline constexpr int kBlocks = 2;
inline constexpr int kWater = 3;
inline constexpr int kNonBuilt = 4;
}  // namespace classes5

namespace classes3 {
inline constexpr int kFrame = 0;
inline constexpr int kRoad = 1;
inline constexpr int kContent = 2;
}  // namespace classes3

/// Per-pixel class indices tied to an ontology.
class ClassMap {
 public:
  ClassMap(int width, int height, const Ontology& ontology, std::uint8_t fill = 0);
  ClassMap(int width, int height, const Ontology& ontology, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return data_.size(); }
  const Ontology& ontology() const noexcept { return *ontology_; }

  int at(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  void set(int x, int y, int cls);
  std::span<const std::uint8_t> data() const noexcept { return data_; }

  ClassMap crop(int x, int y, int w, int h) const;

  friend bool operator==(const ClassMap& a, const ClassMap& b) noexcept {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.ontology_ == b.ontology_ &&
           a.data_ == b.data_;
  }

 private:
  int width_;
  int height_;
  const Ontology* ontology_;
  std::vector<std::uint8_t> data_;
};

inline constexpr double kDefaultLabelTolerance = 48.0;

/// Nearest anchor color per pixel (Euclidean RGB). Throws
/// Error{UnknownColor} naming the first pixel whose nearest anchor is
/// farther than `tolerance`.
ClassMap decode_label(const RgbImage& label, const Ontology& ontology,
                      double tolerance = kDefaultLabelTolerance);

/// Paints every pixel with its class anchor color.
RgbImage encode_label(const ClassMap& map);

/// Merges blocks, water and non-built into map content.
/// Throws Error{WrongArity} for a non five-class map.
ClassMap collapse_to_3(const ClassMap& map5);

struct Texel {
  std::string map_id;
  int x = 0;
  int y = 0;
  int size = 0;
  RgbImage pixels;
  std::optional<int> assigned_class;
};

inline constexpr int kMinTexelSize = 8;

struct TexelOrigin {
  int x;
  int y;
};

/// Top-left corners of the regular texel grid anchored at (0, 0); tiles that
/// would cross the right or bottom edge are dropped.
std::vector<TexelOrigin> texel_grid(int width, int height, int size, int stride);

inline constexpr double kDefaultPurity = 0.75;

/// Class covering at least `threshold` of the tile, if any.
std::optional<int> assign_texel_class(const ClassMap& tile, double threshold = kDefaultPurity);

/// Cuts `img` into texels. When `label` is given each texel is assigned the
/// class covering at least `threshold` of its footprint.
std::vector<Texel> extract_texels(const RgbImage& img, const ClassMap* label, int size,
                                  int stride, const std::string& map_id = {},
                                  double threshold = kDefaultPurity);

/// Pooled fraction of pixels per class over all maps.
std::vector<double> area_proportions(std::span<const ClassMap> maps);

}  // namespace figkit
