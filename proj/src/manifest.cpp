#include "figkit/manifest.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "figkit/error.hpp"

namespace figkit {

namespace {

constexpr std::array<std::pair<WorldRegion, std::string_view>, 11> kRegions{{
    {WorldRegion::NorthAmerica, "north_america"},
    {WorldRegion::CentralAmerica, "central_america"},
    {WorldRegion::SouthAmerica, "south_america"},
    {WorldRegion::WesternEurope, "western_europe"},
    {WorldRegion::EasternEuropeCentralAsia, "eastern_europe_central_asia"},
    {WorldRegion::MiddleEast, "middle_east"},
    {WorldRegion::NorthAfrica, "north_africa"},
    {WorldRegion::SubSaharanAfrica, "sub_saharan_africa"},
    {WorldRegion::SouthAsia, "south_asia"},
    {WorldRegion::EastAsia, "east_asia"},
    {WorldRegion::Oceania, "oceania"},
}};

constexpr std::array<std::pair<UrbanForm, std::string_view>, 3> kForms{{
    {UrbanForm::Regular, "regular"},
    {UrbanForm::Irregular, "irregular"},
    {UrbanForm::Mixed, "mixed"},
}};

constexpr std::array<std::string_view, 12> kKnownFields{
    "id",      "title", "year", "institution", "source_url", "city", "country",
    "publication_countries", "region", "urban_form", "image_path", "label_path"};

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

std::string get_string(const nlohmann::json& j, const char* key, bool required) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) parse_error(std::string("map record missing field '") + key + "'");
    return {};
  }
  if (!it->is_string()) parse_error(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(WorldRegion region) noexcept {
  for (const auto& [r, name] : kRegions) {
    if (r == region) return name;
  }
  return "";
}

std::optional<WorldRegion> parse_world_region(std::string_view s) noexcept {
  for (const auto& [r, name] : kRegions) {
    if (name == s) return r;
  }
  return std::nullopt;
}

std::string_view to_string(UrbanForm form) noexcept {
  for (const auto& [f, name] : kForms) {
    if (f == form) return name;
  }
  return "";
}

std::optional<UrbanForm> parse_urban_form(std::string_view s) noexcept {
  for (const auto& [f, name] : kForms) {
    if (name == s) return f;
  }
  return std::nullopt;
}

MapRecord map_record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) parse_error("map record must be a JSON object");
  MapRecord r;
  r.id = get_string(j, "id", true);
  if (r.id.empty()) parse_error("map record has an empty id");
  r.title = get_string(j, "title", false);
  if (auto it = j.find("year"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) parse_error("field 'year' must be an integer");
    const int year = it->get<int>();
    if (year < 1700 || year > 1994) {
      parse_error("map '" + r.id + "': year " + std::to_string(year) + " outside [1700, 1994]");
    }
    r.year = year;
  }
  r.institution = get_string(j, "institution", false);
  r.source_url = get_string(j, "source_url", false);
  r.city = get_string(j, "city", false);
  r.country = get_string(j, "country", false);
  if (auto it = j.find("publication_countries"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) parse_error("field 'publication_countries' must be an array");
    for (const auto& c : *it) {
      if (!c.is_string()) parse_error("publication_countries entries must be strings");
      r.publication_countries.push_back(c.get<std::string>());
    }
  }
  if (auto s = get_string(j, "region", false); !s.empty()) {
    r.region = parse_world_region(s);
    if (!r.region) parse_error("map '" + r.id + "': unknown region '" + s + "'");
  }
  if (auto s = get_string(j, "urban_form", false); !s.empty()) {
    r.urban_form = parse_urban_form(s);
    if (!r.urban_form) parse_error("map '" + r.id + "': unknown urban_form '" + s + "'");
  }
  r.image_path = get_string(j, "image_path", true);
  if (auto s = get_string(j, "label_path", false); !s.empty()) r.label_path = s;

  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto k : kKnownFields) known = known || key == k;
    if (!known) r.extra[key] = value;
  }
  return r;
}

nlohmann::json to_json(const MapRecord& r) {
  nlohmann::json j = r.extra;
  j["id"] = r.id;
  j["title"] = r.title;
  j["year"] = r.year ? nlohmann::json(*r.year) : nlohmann::json(nullptr);
  j["institution"] = r.institution;
  j["source_url"] = r.source_url;
  j["city"] = r.city;
  j["country"] = r.country;
  j["publication_countries"] = r.publication_countries;
  j["region"] = r.region ? nlohmann::json(std::string(to_string(*r.region))) : nlohmann::json(nullptr);
  j["urban_form"] =
      r.urban_form ? nlohmann::json(std::string(to_string(*r.urban_form))) : nlohmann::json(nullptr);
  j["image_path"] = r.image_path.generic_string();
  j["label_path"] =
      r.label_path ? nlohmann::json(r.label_path->generic_string()) : nlohmann::json(nullptr);
  return j;
}

Manifest parse_manifest(std::string_view text, std::filesystem::path base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_error(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) parse_error("manifest must be a JSON array of map records");
  Manifest m;
  m.base_dir = std::move(base_dir);
  for (const auto& entry : doc) m.maps.push_back(map_record_from_json(entry));
  for (std::size_t i = 0; i < m.maps.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (m.maps[i].id == m.maps[k].id) parse_error("duplicate map id '" + m.maps[i].id + "'");
    }
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read manifest " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

std::string dump_manifest(const Manifest& manifest) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : manifest.maps) doc.push_back(to_json(r));
  return doc.dump(2) + "\n";
}

}  // namespace figkit
