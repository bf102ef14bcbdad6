#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "figkit/kappa.hpp"

namespace figkit {

struct FeatureRecord {
  std::string map_id;
  int x = 0;
  int y = 0;
  /// Class name; empty when the texel is unassigned.
  std::string cls;
  std::vector<double> values;
};

struct FeatureTable {
  std::size_t features = 0;
  std::vector<FeatureRecord> records;

  /// Rows whose class equals `cls` (all rows when `cls` is empty and
  /// `any_class` is set).
  FeatureSampleSet sample_set(const std::string& name, const std::string& cls = {},
                              bool any_class = true) const;
};

/// Column header "map_id,x,y,class,f00,...". Lines starting with '#' are
/// comments; `comment` is written first as one such line.
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table,
                       const std::string& comment = {});
FeatureTable read_feature_csv(const std::filesystem::path& path);

/// Binary sidecar with the same record order: magic "FGKFEAT1", u32 feature
/// count, u64 record count, then per record u32-length-prefixed map id, i32
/// x, i32 y, u32-length-prefixed class, and `features` float64 values. All
/// integers and doubles little-endian.
void write_feature_binary(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_binary(const std::filesystem::path& path);

/// printf("%.17g"): round-trips every double.
std::string format_double(double v);

}  // namespace figkit
