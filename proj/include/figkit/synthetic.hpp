#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "figkit/corpus.hpp"
#include "figkit/manifest.hpp"

namespace figkit {

/// A procedural "map" with known five-class geometry: a paper frame, a grid
/// of thin streets plus one wide boulevard, a river band, and blocks that
/// are either hatched built-up areas or dotted green space.
struct SyntheticMap {
  std::string id;
  RgbImage image;
  ClassMap label;
};

SyntheticMap synthesize_map(const std::string& id, int width, int height, std::uint64_t seed);

/// A plausible imperfect prediction of `truth`: boundary jitter plus a few
/// rectangular patches relabelled to a random class. `severity` in [0, 1].
ClassMap perturb_labels(const ClassMap& truth, std::uint64_t seed, double severity = 0.5);

struct SyntheticCorpusOptions {
  int maps = 3;
  int width = 400;
  int height = 400;
  std::uint64_t seed = 0;
  bool predictions = true;
};

/// Writes images/, labels/, predictions/ and manifest.json under `dir` and
/// returns the manifest. Prediction paths are stored in each record's
/// "prediction_path" field.
Manifest write_synthetic_corpus(const std::filesystem::path& dir,
                                const SyntheticCorpusOptions& options);

}  // namespace figkit
