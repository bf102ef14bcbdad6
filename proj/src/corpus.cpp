#include "figkit/corpus.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace figkit {

const Ontology& Ontology::five_class() {
  static const Ontology kOntology({{"frame", {0, 0, 0}},
                                   {"road network", {255, 255, 255}},
                                   {"blocks", {255, 0, 255}},
                                   {"water", {0, 0, 255}},
                                   {"non-built", {0, 255, 255}}});
  return kOntology;
}

const Ontology& Ontology::three_class() {
  static const Ontology kOntology(
      {{"frame", {0, 0, 0}}, {"road network", {255, 255, 255}}, {"map content", {255, 0, 255}}});
  return kOntology;
}

const Ontology& Ontology::for_arity(int arity) {
  if (arity == 5) return five_class();
  if (arity == 3) return three_class();
  throw Error(ErrorCode::WrongArity, "ontology arity must be 3 or 5, got " + std::to_string(arity));
}

std::optional<int> Ontology::index_of(std::string_view name) const noexcept {
  for (int i = 0; i < arity(); ++i) {
    if (classes_[i].name == name) return i;
  }
  return std::nullopt;
}

ClassMap::ClassMap(int width, int height, const Ontology& ontology, std::uint8_t fill)
    : ClassMap(width, height, ontology,
               std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                             static_cast<std::size_t>(std::max(height, 0)),
                                         fill)) {}

ClassMap::ClassMap(int width, int height, const Ontology& ontology, std::vector<std::uint8_t> data)
    : width_(width), height_(height), ontology_(&ontology), data_(std::move(data)) {
  if (width < 1 || height < 1 ||
      data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidArgument, "class map dimensions do not match its data");
  }
  for (auto v : data_) {
    if (v >= ontology.arity()) {
      throw Error(ErrorCode::InvalidArgument,
                  "class index " + std::to_string(v) + " outside ontology");
    }
  }
}

void ClassMap::set(int x, int y, int cls) {
  if (cls < 0 || cls >= ontology_->arity()) {
    throw Error(ErrorCode::InvalidArgument, "class index outside ontology");
  }
  data_[static_cast<std::size_t>(y) * width_ + x] = static_cast<std::uint8_t>(cls);
}

ClassMap ClassMap::crop(int x, int y, int w, int h) const {
  if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > width_ || y + h > height_) {
    throw Error(ErrorCode::InvalidArgument, "crop window outside class map");
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h);
  for (int row = 0; row < h; ++row) {
    const auto* src = data_.data() + static_cast<std::size_t>(y + row) * width_ + x;
    std::copy(src, src + w, out.begin() + static_cast<std::ptrdiff_t>(row) * w);
  }
  return ClassMap(w, h, *ontology_, std::move(out));
}

ClassMap decode_label(const RgbImage& label, const Ontology& ontology, double tolerance) {
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  const double tol2 = tolerance * tolerance;
  std::vector<std::uint8_t> out(label.pixel_count());
  const auto src = label.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_cls = 0;
    for (int c = 0; c < ontology.arity(); ++c) {
      const Rgb anchor = ontology.color(c);
      double d2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double d = static_cast<double>(src[3 * i + k]) - anchor[k];
        d2 += d * d;
      }
      if (d2 < best) {
        best = d2;
        best_cls = c;
      }
    }
    if (best > tol2) {
      const auto x = static_cast<int>(i % static_cast<std::size_t>(label.width()));
      const auto y = static_cast<int>(i / static_cast<std::size_t>(label.width()));
      throw Error(ErrorCode::UnknownColor,
                  "unknown label color (" + std::to_string(src[3 * i]) + "," +
                      std::to_string(src[3 * i + 1]) + "," + std::to_string(src[3 * i + 2]) +
                      ") at (" + std::to_string(x) + "," + std::to_string(y) + ")");
    }
    out[i] = static_cast<std::uint8_t>(best_cls);
  }
  return ClassMap(label.width(), label.height(), ontology, std::move(out));
}

RgbImage encode_label(const ClassMap& map) {
  RgbImage out(map.width(), map.height());
  auto dst = out.data();
  const auto src = map.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Rgb c = map.ontology().color(src[i]);
    dst[3 * i] = c[0];
    dst[3 * i + 1] = c[1];
    dst[3 * i + 2] = c[2];
  }
  return out;
}

ClassMap collapse_to_3(const ClassMap& map5) {
  if (!(map5.ontology() == Ontology::five_class())) {
    throw Error(ErrorCode::WrongArity, "collapse_to_3 expects a five-class map");
  }
  std::vector<std::uint8_t> out(map5.pixel_count());
  const auto src = map5.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = src[i] <= classes5::kRoad ? src[i] : static_cast<std::uint8_t>(classes3::kContent);
  }
  return ClassMap(map5.width(), map5.height(), Ontology::three_class(), std::move(out));
}

std::vector<TexelOrigin> texel_grid(int width, int height, int size, int stride) {
  if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
  if (size < kMinTexelSize) {
    throw Error(ErrorCode::InvalidArgument,
                "texel size must be >= " + std::to_string(kMinTexelSize));
  }
  if (size > width || size > height) {
    throw Error(ErrorCode::ImageTooSmall, "image " + std::to_string(width) + "x" +
                                              std::to_string(height) +
                                              " smaller than texel size " + std::to_string(size));
  }
  std::vector<TexelOrigin> out;
  const int nx = (width - size) / stride + 1;
  const int ny = (height - size) / stride + 1;
  out.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) out.push_back({i * stride, j * stride});
  }
  return out;
}

std::optional<int> assign_texel_class(const ClassMap& tile, double threshold) {
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "purity threshold must lie in (0.5, 1]");
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(tile.ontology().arity()), 0);
  for (auto v : tile.data()) ++counts[v];
  const double need = threshold * static_cast<double>(tile.pixel_count());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    // threshold > 0.5, so at most one class can qualify.
    if (static_cast<double>(counts[c]) >= need) return static_cast<int>(c);
  }
  return std::nullopt;
}

std::vector<Texel> extract_texels(const RgbImage& img, const ClassMap* label, int size,
                                  int stride, const std::string& map_id, double threshold) {
  if (label && (label->width() != img.width() || label->height() != img.height())) {
    throw Error(ErrorCode::ShapeMismatch, "label raster and image differ in size");
  }
  const auto grid = texel_grid(img.width(), img.height(), size, stride);
  std::vector<Texel> out;
  out.reserve(grid.size());
  for (const auto& o : grid) {
    Texel t;
    t.map_id = map_id;
    t.x = o.x;
    t.y = o.y;
    t.size = size;
    t.pixels = img.crop(o.x, o.y, size, size);
    if (label) t.assigned_class = assign_texel_class(label->crop(o.x, o.y, size, size), threshold);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> area_proportions(std::span<const ClassMap> maps) {
  if (maps.empty()) throw Error(ErrorCode::EmptySet, "area_proportions needs at least one map");
  const Ontology& ont = maps.front().ontology();
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(ont.arity()), 0);
  std::uint64_t total = 0;
  for (const auto& m : maps) {
    if (!(m.ontology() == ont)) {
      throw Error(ErrorCode::MixedOntologies, "maps use different ontologies");
    }
    for (auto v : m.data()) ++counts[v];
    total += m.pixel_count();
  }
  std::vector<double> out(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    out[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
  }
  return out;
}

}  // namespace figkit
