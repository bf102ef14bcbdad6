#include "figkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <vector>

#include "figkit/error.hpp"
#include "figkit/image_io.hpp"
#include "figkit/rng.hpp"

namespace figkit {

namespace {

constexpr int kFrameWidth = 50;

std::uint8_t clamp8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
}

Rgb jitter(Rgb base, Rng& rng, double amount) {
  const double n = amount * rng.normal();
  return {clamp8(base[0] + n), clamp8(base[1] + n), clamp8(base[2] + n)};
}

// Positions snapped to multiples of `step` so that wide features line up
// with some texel grids and produce pure texels.
int snapped(Rng& rng, int lo, int hi, int step) {
  const int slots = std::max(1, (hi - lo) / step);
  return lo + step * static_cast<int>(rng.below(static_cast<std::uint64_t>(slots)));
}

}  // namespace

SyntheticMap synthesize_map(const std::string& id, int width, int height, std::uint64_t seed) {
  if (width < 4 * kFrameWidth || height < 4 * kFrameWidth) {
    throw Error(ErrorCode::ImageTooSmall, "synthetic maps need at least 200x200 pixels");
  }
  using namespace classes5;
  Rng layout(derive_seed(seed, "layout"));
  Rng paint(derive_seed(seed, "paint"));

  ClassMap label(width, height, Ontology::five_class(), static_cast<std::uint8_t>(kBlocks));

  const int x0 = kFrameWidth, y0 = kFrameWidth;
  const int x1 = width - kFrameWidth, y1 = height - kFrameWidth;

  // Blocks between thin streets, each built-up or green.
  std::vector<int> xs{x0}, ys{y0};
  while (xs.back() < x1) xs.push_back(xs.back() + 80 + static_cast<int>(layout.below(60)));
  while (ys.back() < y1) ys.push_back(ys.back() + 80 + static_cast<int>(layout.below(60)));
  xs.back() = x1;
  ys.back() = y1;
  for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const int cls = layout.uniform() < 0.3 ? kNonBuilt : kBlocks;
      for (int y = ys[j]; y < ys[j + 1]; ++y)
        for (int x = xs[i]; x < xs[i + 1]; ++x) label.set(x, y, cls);
    }
  }
  constexpr int kStreet = 8;
  for (int sx : xs)
    for (int y = y0; y < y1; ++y)
      for (int x = std::max(x0, sx - kStreet / 2); x < std::min(x1, sx + kStreet / 2); ++x)
        label.set(x, y, kRoad);
  for (int sy : ys)
    for (int y = std::max(y0, sy - kStreet / 2); y < std::min(y1, sy + kStreet / 2); ++y)
      for (int x = x0; x < x1; ++x) label.set(x, y, kRoad);

  // River band, slightly meandering, then a boulevard crossing it on a bridge.
  const int river_x = snapped(layout, x0 + 25, x1 - 100, 25);
  const double phase = layout.uniform(0.0, 2 * std::numbers::pi);
  for (int y = y0; y < y1; ++y) {
    const int shift = static_cast<int>(std::lround(6.0 * std::sin(phase + y / 40.0)));
    for (int x = river_x + shift; x < river_x + 75 + shift; ++x) {
      if (x >= x0 && x < x1) label.set(x, y, kWater);
    }
  }
  const int blvd_y = snapped(layout, y0 + 25, y1 - 85, 25);
  for (int y = blvd_y; y < blvd_y + 60; ++y)
    for (int x = x0; x < x1; ++x) label.set(x, y, kRoad);

  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (x < x0 || x >= x1 || y < y0 || y >= y1) label.set(x, y, kFrame);

  // Paint each class with its own texture.
  RgbImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      Rgb c{};
      switch (label.at(x, y)) {
        case kFrame:
          c = jitter({222, 208, 170}, paint, 6.0);
          break;
        case kRoad:
          c = jitter({248, 246, 238}, paint, 3.0);
          break;
        case kBlocks:
          c = ((x + y) % 6 < 2) ? jitter({150, 60, 60}, paint, 8.0)
                                : jitter({232, 176, 168}, paint, 5.0);
          break;
        case kWater: {
          const double wave = std::sin(x / 5.0) * 2.0;
          const bool line = static_cast<int>(std::lround(y + wave)) % 8 == 0;
          c = line ? jitter({60, 100, 170}, paint, 6.0) : jitter({160, 196, 228}, paint, 4.0);
          break;
        }
        default:
          c = paint.uniform() < 0.06 ? jitter({40, 110, 40}, paint, 10.0)
                                     : jitter({196, 222, 176}, paint, 6.0);
          break;
      }
      img.set(x, y, c);
    }
  }
  // Dark outlines along class boundaries inside the map body, and a neatline.
  RgbImage outlined = img;
  for (int y = 1; y + 1 < height; ++y) {
    for (int x = 1; x + 1 < width; ++x) {
      const int k = label.at(x, y);
      if (k == kFrame) continue;
      if (label.at(x + 1, y) != k || label.at(x, y + 1) != k) {
        outlined.set(x, y, jitter({70, 60, 55}, paint, 5.0));
      }
    }
  }
  for (int x = x0 - 3; x < x1 + 3; ++x) {
    outlined.set(x, y0 - 3, {30, 30, 30});
    outlined.set(x, y1 + 2, {30, 30, 30});
  }
  for (int y = y0 - 3; y < y1 + 3; ++y) {
    outlined.set(x0 - 3, y, {30, 30, 30});
    outlined.set(x1 + 2, y, {30, 30, 30});
  }
  // Lettering in the top margin.
  for (int k = 0; k < 6; ++k) {
    const int lx = 60 + k * 14 + static_cast<int>(layout.below(4));
    for (int y = 18; y < 30; ++y)
      for (int x = lx; x < lx + 8; ++x)
        if ((x + y) % 3 != 0) outlined.set(x, y, {45, 35, 30});
  }
  return {id, std::move(outlined), std::move(label)};
}

ClassMap perturb_labels(const ClassMap& truth, std::uint64_t seed, double severity) {
  if (!(severity >= 0.0 && severity <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "severity must lie in [0, 1]");
  }
  Rng rng(derive_seed(seed, "perturb"));
  ClassMap out = truth;
  const int w = truth.width(), h = truth.height();
  const int arity = truth.ontology().arity();
  // Boundary jitter: copy a neighbour's label near class edges.
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const int k = truth.at(x, y);
      const int r = truth.at(x + 1, y), d = truth.at(x, y + 1);
      if ((r != k || d != k) && rng.uniform() < severity) out.set(x, y, r != k ? r : d);
    }
  }
  const int patches = static_cast<int>(std::lround(8 * severity));
  for (int p = 0; p < patches; ++p) {
    const int pw = 10 + static_cast<int>(rng.below(30));
    const int ph = 10 + static_cast<int>(rng.below(30));
    const int px = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, w - pw))));
    const int py = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, h - ph))));
    const int cls = static_cast<int>(rng.below(static_cast<std::uint64_t>(arity)));
    for (int y = py; y < std::min(h, py + ph); ++y)
      for (int x = px; x < std::min(w, px + pw); ++x) out.set(x, y, cls);
  }
  return out;
}

Manifest write_synthetic_corpus(const std::filesystem::path& dir,
                                const SyntheticCorpusOptions& options) {
  if (options.maps < 1) throw Error(ErrorCode::InvalidArgument, "need at least one map");
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char* sub : {"images", "labels", "predictions"}) {
    fs::create_directories(dir / sub, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + (dir / sub).string());
  }
  static const char* kCities[] = {"Aldmere", "Brisa", "Coldharbour", "Dunmore", "Estavel"};
  static const WorldRegion kRegions[] = {WorldRegion::WesternEurope, WorldRegion::NorthAmerica,
                                         WorldRegion::SouthAsia, WorldRegion::NorthAfrica,
                                         WorldRegion::Oceania};
  Manifest manifest;
  manifest.base_dir = dir;
  const std::map<std::string, std::string> text{
      {"Software", std::string("figkit ") + FIGKIT_VERSION},
      {"Source", "synthetic seed=" + std::to_string(options.seed)}};
  for (int m = 0; m < options.maps; ++m) {
    char id[16];
    std::snprintf(id, sizeof id, "synth-%02d", m + 1);
    const std::uint64_t map_seed = derive_seed(options.seed, static_cast<std::uint64_t>(m), 1);
    const SyntheticMap map = synthesize_map(id, options.width, options.height, map_seed);

    MapRecord rec;
    rec.id = id;
    rec.city = kCities[m % 5];
    rec.title = "Plan of " + rec.city;
    rec.year = 1820 + 17 * m;
    rec.institution = "figkit synthetic atlas";
    rec.country = "Nowhere";
    rec.publication_countries = {"Nowhere"};
    rec.region = kRegions[m % 5];
    rec.urban_form = m % 3 == 0 ? UrbanForm::Regular : m % 3 == 1 ? UrbanForm::Mixed
                                                                   : UrbanForm::Irregular;
    rec.image_path = fs::path("images") / (rec.id + ".png");
    rec.label_path = fs::path("labels") / (rec.id + ".png");
    write_png(dir / rec.image_path, map.image, text);
    write_png(dir / *rec.label_path, encode_label(map.label), text);
    if (options.predictions) {
      const fs::path pred = fs::path("predictions") / (rec.id + ".png");
      const ClassMap predicted = perturb_labels(map.label, map_seed, 0.3 + 0.2 * m);
      write_png(dir / pred, encode_label(predicted), text);
      rec.extra["prediction_path"] = pred.generic_string();
    }
    manifest.maps.push_back(std::move(rec));
  }
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / "manifest.json").string());
  out << dump_manifest(manifest);
  return manifest;
}

}  // namespace figkit
