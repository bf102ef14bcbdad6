#pragma once

#include <cstdint>
#include <vector>

#include "figkit/corpus.hpp"
#include "figkit/image.hpp"
#include "figkit/rng.hpp"

namespace figkit::test {

inline RgbImage random_rgb(Rng& rng, int w, int h) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * 3);
  for (auto& v : data) v = static_cast<std::uint8_t>(rng.below(256));
  return RgbImage(w, h, std::move(data));
}

inline GrayImage random_gray(Rng& rng, int w, int h, int levels = 256) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h);
  for (auto& v : data) v = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(levels)));
  return GrayImage(w, h, std::move(data));
}

inline ClassMap random_classes(Rng& rng, int w, int h, const Ontology& ont) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h);
  for (auto& v : data) v = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(ont.arity())));
  return ClassMap(w, h, ont, std::move(data));
}

inline GrayImage rotate90(const GrayImage& img) {
  GrayImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.set(img.height() - 1 - y, x, img.at(x, y));
  return out;
}

inline GrayImage transpose(const GrayImage& img) {
  GrayImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.set(y, x, img.at(x, y));
  return out;
}

inline GrayImage mirror(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.set(img.width() - 1 - x, y, img.at(x, y));
  return out;
}

}  // namespace figkit::test
