#include "figkit/feature_store.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "figkit/error.hpp"

namespace figkit {

static_assert(std::endian::native == std::endian::little,
              "binary feature sidecar assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'F', 'G', 'K', 'F', 'E', 'A', 'T', '1'};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t line,
                              const std::string& what) {
  throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw Error(ErrorCode::Parse, path.string() + ": truncated feature sidecar");
  }
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in, const std::filesystem::path& path) {
  const auto len = get<std::uint32_t>(in, path);
  if (len > (1u << 20)) throw Error(ErrorCode::Parse, path.string() + ": corrupt string length");
  std::string s(len, '\0');
  if (!in.read(s.data(), len)) throw Error(ErrorCode::Parse, path.string() + ": truncated string");
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

FeatureSampleSet FeatureTable::sample_set(const std::string& name, const std::string& cls,
                                          bool any_class) const {
  FeatureSampleSet set;
  set.name = name;
  set.features = features;
  for (const auto& r : records) {
    if (!(any_class && cls.empty()) && r.cls != cls) continue;
    set.samples.insert(set.samples.end(), r.values.begin(), r.values.end());
  }
  return set;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table,
                       const std::string& comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "map_id,x,y,class";
  for (std::size_t f = 0; f < table.features; ++f) {
    char buf[24];
    std::snprintf(buf, sizeof buf, ",f%02zu", f);
    out << buf;
  }
  out << "\n";
  for (const auto& r : table.records) {
    if (r.values.size() != table.features) {
      throw Error(ErrorCode::InvalidArgument, "feature record has the wrong width");
    }
    out << r.map_id << ',' << r.x << ',' << r.y << ',' << r.cls;
    for (double v : r.values) out << ',' << format_double(v);
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  FeatureTable table;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (!header) {
      if (cells.size() < 5 || cells[0] != "map_id" || cells[1] != "x" || cells[2] != "y" ||
          cells[3] != "class") {
        parse_error(path, lineno, "expected header map_id,x,y,class,f00,...");
      }
      table.features = cells.size() - 4;
      header = true;
      continue;
    }
    if (cells.size() != table.features + 4) parse_error(path, lineno, "wrong number of columns");
    FeatureRecord r;
    r.map_id = cells[0];
    r.cls = cells[3];
    auto parse_int = [&](const std::string& s) {
      int v = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        parse_error(path, lineno, "bad integer '" + s + "'");
      }
      return v;
    };
    r.x = parse_int(cells[1]);
    r.y = parse_int(cells[2]);
    for (std::size_t f = 0; f < table.features; ++f) {
      const std::string& s = cells[4 + f];
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || end != s.c_str() + s.size()) {
        parse_error(path, lineno, "bad number '" + s + "'");
      }
      r.values.push_back(v);
    }
    table.records.push_back(std::move(r));
  }
  if (!header) parse_error(path, lineno, "missing header");
  return table;
}

void write_feature_binary(const std::filesystem::path& path, const FeatureTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.features));
  put<std::uint64_t>(out, table.records.size());
  for (const auto& r : table.records) {
    put_string(out, r.map_id);
    put<std::int32_t>(out, r.x);
    put<std::int32_t>(out, r.y);
    put_string(out, r.cls);
    for (double v : r.values) put<double>(out, v);
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

FeatureTable read_feature_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::Parse, path.string() + ": not a feature sidecar");
  }
  FeatureTable table;
  table.features = get<std::uint32_t>(in, path);
  const auto count = get<std::uint64_t>(in, path);
  for (std::uint64_t i = 0; i < count; ++i) {
    FeatureRecord r;
    r.map_id = get_string(in, path);
    r.x = get<std::int32_t>(in, path);
    r.y = get<std::int32_t>(in, path);
    r.cls = get_string(in, path);
    r.values.resize(table.features);
    for (auto& v : r.values) v = get<double>(in, path);
    table.records.push_back(std::move(r));
  }
  return table;
}

}  // namespace figkit
