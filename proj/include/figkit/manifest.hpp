#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace figkit {

enum class WorldRegion {
  NorthAmerica,
  CentralAmerica,
  SouthAmerica,
  WesternEurope,
  EasternEuropeCentralAsia,
  MiddleEast,
  NorthAfrica,
  SubSaharanAfrica,
  SouthAsia,
  EastAsia,
  Oceania,
};

enum class UrbanForm { Regular, Irregular, Mixed };

std::string_view to_string(WorldRegion region) noexcept;
std::optional<WorldRegion> parse_world_region(std::string_view s) noexcept;
std::string_view to_string(UrbanForm form) noexcept;
std::optional<UrbanForm> parse_urban_form(std::string_view s) noexcept;

/// One map of a corpus. Paths are stored as written in the manifest and
/// resolved against the manifest's directory on load.
struct MapRecord {
  std::string id;
  std::string title;
  std::optional<int> year;
  std::string institution;
  std::string source_url;
  std::string city;
  std::string country;
  std::vector<std::string> publication_countries;
  std::optional<WorldRegion> region;
  std::optional<UrbanForm> urban_form;
  std::filesystem::path image_path;
  std::optional<std::filesystem::path> label_path;
  /// Fields not listed above, kept verbatim for round trips.
  nlohmann::json extra = nlohmann::json::object();
};

MapRecord map_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MapRecord& record);

struct Manifest {
  std::filesystem::path base_dir;
  std::vector<MapRecord> maps;

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : base_dir / p;
  }
};

/// Throws Error{Parse} for malformed content and Error{Io} when unreadable.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(std::string_view text, std::filesystem::path base_dir = {});
std::string dump_manifest(const Manifest& manifest);

}  // namespace figkit
