// figkit command-line front end. Every command reads file artifacts, writes
// file artifacts into --out, and stamps each artifact with the tool version,
// the seed and the effective configuration.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "figkit/analysis.hpp"
#include "figkit/corpus.hpp"
#include "figkit/error.hpp"
#include "figkit/feature_store.hpp"
#include "figkit/features.hpp"
#include "figkit/image_io.hpp"
#include "figkit/kappa.hpp"
#include "figkit/manifest.hpp"
#include "figkit/parallel.hpp"
#include "figkit/raster.hpp"
#include "figkit/rng.hpp"
#include "figkit/segeval.hpp"
#include "figkit/synthetic.hpp"
#include "figkit/viz.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace figkit;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitDegenerate = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return kExitIo;
    case ErrorCode::ZeroVariance:
    case ErrorCode::EmptySet:
    case ErrorCode::EmptyClass:
    case ErrorCode::ZeroVarianceVector:
    case ErrorCode::TooFewSamples:
    case ErrorCode::InsufficientPoints:
    case ErrorCode::Unreachable:
    case ErrorCode::EmptySeries:
      return kExitDegenerate;
    default:
      return kExitConfig;
  }
}

struct Options {
  std::string manifest;
  std::string out;
  std::uint64_t seed = 0;
  int texel_size = 50;
  int stride = 50;
  std::size_t trials = 5000;
  int classes = 5;
  std::string mode = "reference";
  double threshold = kDefaultPurity;
  double perplexity = 30.0;

  // Command-specific inputs.
  std::vector<std::string> features;
  std::string kappa;
  std::string scores;
  std::string pred_dir;
  std::vector<double> targets;
  std::vector<double> at_sizes;
  bool by_class = false;
  bool simplified = false;
  bool complement = false;
  int iterations = 1000;
  int patch_size = 0;
  int maps = 3;
  int size = 400;
  int cell = 0;
  std::string title;
};

json provenance(const std::string& command, json config, std::uint64_t seed) {
  return json{{"tool", "figkit"},
              {"version", FIGKIT_VERSION},
              {"command", command},
              {"seed", seed},
              {"config", std::move(config)}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::map<std::string, std::string> png_text(const json& prov) {
  return {{"Software", std::string("figkit ") + FIGKIT_VERSION}, {"figkit", prov.dump()}};
}

fs::path prepare_out(const std::string& out) {
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + out);
  return fs::path(out);
}

Manifest require_manifest(const Options& o) {
  if (o.manifest.empty()) throw Error(ErrorCode::InvalidArgument, "--manifest is required");
  return load_manifest(o.manifest);
}

const Ontology& ontology_for(const Options& o) { return Ontology::for_arity(o.classes); }

// Labels are decoded against the five-class palette; the three-class palette
// is a subset of it, so collapsing afterwards handles both kinds of files.
ClassMap load_label(const fs::path& path, const Options& o) {
  ClassMap map = decode_label(read_image(path), Ontology::five_class());
  return o.classes == 3 ? collapse_to_3(map) : map;
}

AblationMode parse_mode(const std::string& s) {
  const auto mode = parse_ablation_mode(s);
  if (!mode) throw Error(ErrorCode::InvalidArgument, "unknown mode '" + s + "'");
  return *mode;
}

std::vector<std::string> labels_for(std::size_t features) {
  std::vector<std::string> out;
  if (features == static_cast<std::size_t>(kFeatureCount)) {
    const auto& l = feature_labels();
    out.assign(l.begin(), l.end());
  } else if (features == static_cast<std::size_t>(kSimplifiedFeatureCount)) {
    const auto& l = simplified_feature_labels();
    out.assign(l.begin(), l.end());
  } else {
    for (std::size_t f = 0; f < features; ++f) {
      char buf[24];
      std::snprintf(buf, sizeof buf, "f%02zu", f);
      out.emplace_back(buf);
    }
  }
  return out;
}

// "name=path" or a bare path named after its stem.
std::pair<std::string, fs::path> named_input(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos) return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
  const fs::path p(arg);
  std::string name = p.stem().string();
  if (name == "features" && p.has_parent_path() && !p.parent_path().filename().empty()) {
    name = p.parent_path().filename().string();
  }
  return {name, p};
}

FeatureTable load_features(const fs::path& path) {
  if (path.extension() == ".bin") return read_feature_binary(path);
  return read_feature_csv(path);
}

json texel_config(const Options& o) {
  return {{"texel_size", o.texel_size}, {"stride", o.stride}, {"classes", o.classes},
          {"threshold", o.threshold}, {"mode", o.mode}};
}

// ---------------------------------------------------------------- commands

int cmd_synth(const Options& o) {
  const fs::path out = prepare_out(o.out);
  SyntheticCorpusOptions so;
  so.maps = o.maps;
  so.width = o.size;
  so.height = o.size;
  so.seed = o.seed;
  const Manifest m = write_synthetic_corpus(out, so);

  // A small noise-free-looking learning curve for the extrapolate demo.
  Rng rng(derive_seed(o.seed, "training-curve"));
  std::ostringstream csv;
  csv << "# " << provenance("synth", {{"maps", o.maps}, {"size", o.size}}, o.seed).dump()
      << "\nsize,score\n";
  for (int s = 10; s <= 100; s += 10) {
    const double score = 0.9 - 0.8 * std::pow(static_cast<double>(s), -0.6) +
                         0.002 * (rng.uniform() - 0.5);
    csv << s << ',' << format_double(score) << '\n';
  }
  write_text(out / "training_curve.csv", csv.str());
  std::cout << "wrote " << m.maps.size() << " synthetic maps to " << out.string() << "\n";
  return 0;
}

int cmd_extract(const Options& o) {
  const Manifest m = require_manifest(o);
  const fs::path out = prepare_out(o.out);
  const AblationMode mode = parse_mode(o.mode);
  const json prov = provenance("extract", texel_config(o), o.seed);
  fs::create_directories(out / "texels");
  std::ostringstream csv;
  csv << "# " << prov.dump() << "\nmap_id,x,y,class\n";
  std::size_t rows = 0;
  for (const auto& rec : m.maps) {
    const RgbImage img = ablate(read_image(m.resolve(rec.image_path)), mode).image;
    std::optional<ClassMap> label;
    if (rec.label_path) label = load_label(m.resolve(*rec.label_path), o);
    const auto texels = extract_texels(img, label ? &*label : nullptr, o.texel_size, o.stride,
                                       rec.id, o.threshold);
    for (const auto& t : texels) {
      csv << t.map_id << ',' << t.x << ',' << t.y << ','
          << (t.assigned_class ? label->ontology().name(*t.assigned_class) : "") << '\n';
      write_png(out / "texels" /
                    (t.map_id + "_" + std::to_string(t.x) + "_" + std::to_string(t.y) + ".png"),
                t.pixels, png_text(prov));
      ++rows;
    }
  }
  write_text(out / "texels.csv", csv.str());
  std::cout << "extracted " << rows << " texels\n";
  return 0;
}

int cmd_features(const Options& o) {
  const Manifest m = require_manifest(o);
  const fs::path out = prepare_out(o.out);
  const AblationMode mode = parse_mode(o.mode);
  FeatureConfig cfg;
  cfg.texel_size = o.texel_size;
  cfg.validate();
  json config = texel_config(o);
  config["simplified"] = o.simplified;
  const json prov = provenance("features", config, o.seed);

  FeatureTable table;
  table.features = o.simplified ? kSimplifiedFeatureCount : kFeatureCount;
  std::size_t degenerate = 0;
  for (const auto& rec : m.maps) {
    const RgbImage img = ablate(read_image(m.resolve(rec.image_path)), mode).image;
    std::optional<ClassMap> label;
    if (rec.label_path) label = load_label(m.resolve(*rec.label_path), o);
    const auto texels = extract_texels(img, label ? &*label : nullptr, o.texel_size, o.stride,
                                       rec.id, o.threshold);
    const NormalizedMap norm = normalize_channels(img);
    auto push = [&](const Texel& t, auto begin, auto end) {
      FeatureRecord r;
      r.map_id = t.map_id;
      r.x = t.x;
      r.y = t.y;
      if (t.assigned_class) r.cls = label->ontology().name(*t.assigned_class);
      r.values.assign(begin, end);
      table.records.push_back(std::move(r));
    };
    if (o.simplified) {
      const auto vecs = extract_simplified(texels, norm, cfg);
      for (std::size_t i = 0; i < texels.size(); ++i) {
        degenerate += vecs[i].degenerate;
        push(texels[i], vecs[i].values.begin(), vecs[i].values.end());
      }
    } else {
      const auto vecs = extract_features(texels, norm, cfg);
      for (std::size_t i = 0; i < texels.size(); ++i) {
        degenerate += vecs[i].degenerate;
        push(texels[i], vecs[i].values.begin(), vecs[i].values.end());
      }
    }
  }
  const std::string stem = o.simplified ? "features_simplified" : "features";
  write_feature_csv(out / (stem + ".csv"), table, prov.dump());
  write_feature_binary(out / (stem + ".bin"), table);
  json labels = labels_for(table.features);
  write_json(out / (stem + ".json"), {{"provenance", prov},
                                      {"feature_labels", labels},
                                      {"texels", table.records.size()},
                                      {"degenerate_texels", degenerate}});
  std::cout << "wrote " << table.records.size() << " feature vectors\n";
  return 0;
}

struct NamedSets {
  std::vector<FeatureSampleSet> sets;
  std::vector<std::string> corpus;
  std::vector<std::string> cls;
  std::size_t features = 0;
};

NamedSets gather_sets(const Options& o, bool by_class) {
  if (o.features.empty()) throw Error(ErrorCode::InvalidArgument, "--features is required");
  NamedSets out;
  for (const auto& arg : o.features) {
    const auto [name, path] = named_input(arg);
    const FeatureTable table = load_features(path);
    if (out.features == 0) out.features = table.features;
    if (table.features != out.features) {
      throw Error(ErrorCode::InvalidArgument, "feature files disagree on the feature count");
    }
    if (!by_class) {
      out.sets.push_back(table.sample_set(name));
      out.corpus.push_back(name);
      out.cls.emplace_back();
      continue;
    }
    const Ontology& ont = ontology_for(o);
    for (int k = 0; k < ont.arity(); ++k) {
      const std::string& cls = ont.name(k);
      out.sets.push_back(table.sample_set(o.features.size() > 1 ? name + "/" + cls : cls, cls,
                                          false));
      out.corpus.push_back(name);
      out.cls.push_back(cls);
    }
  }
  return out;
}

int cmd_kappa(const Options& o) {
  const fs::path out = prepare_out(o.out);
  NamedSets named = gather_sets(o, o.by_class);
  // Absent classes are reported and left out; a set that exists but is too
  // small to bootstrap is a degenerate-data error.
  std::vector<FeatureSampleSet> sets;
  json skipped = json::array();
  for (auto& s : named.sets) {
    if (s.size() == 0) {
      skipped.push_back({{"set", s.name}, {"reason", "no texels"}});
      continue;
    }
    sets.push_back(std::move(s));
  }
  if (sets.empty()) throw Error(ErrorCode::EmptySet, "no non-empty sample sets");

  BootstrapOptions bo;
  bo.trials = o.trials;
  bo.seed = o.seed;
  bo.feature_names = labels_for(named.features);
  const auto reports = bootstrap_kappa(sets, bo);

  json config{{"features", o.features}, {"trials", o.trials}, {"by_class", o.by_class},
              {"classes", o.classes}};
  const json prov = provenance("kappa", config, o.seed);
  json jr = json::array();
  std::ostringstream csv;
  csv << "# " << prov.dump() << "\nset,feature,kappa_full,kappa_median,ci95_halfwidth_pct,degenerate\n";
  for (const auto& r : reports) {
    json feats = json::array();
    for (const auto& f : r.features) {
      feats.push_back({{"name", f.name},
                       {"kappa", f.kappa},
                       {"kappa_median", f.kappa_median},
                       {"ci95_halfwidth_pct", f.ci95_halfwidth_pct},
                       {"degenerate", f.degenerate}});
      csv << r.set << ',' << f.name << ',' << format_double(f.kappa) << ','
          << format_double(f.kappa_median) << ',' << format_double(f.ci95_halfwidth_pct) << ','
          << (f.degenerate ? 1 : 0) << '\n';
    }
    jr.push_back({{"set", r.set},
                  {"seed", r.seed},
                  {"trials", r.trials},
                  {"downsample_size", r.downsample_size},
                  {"features", feats},
                  {"mean_kappa", r.mean_kappa},
                  {"median_kappa", r.median_kappa}});
  }
  write_json(out / "kappa.json", {{"provenance", prov}, {"reports", jr}, {"skipped", skipped}});
  write_text(out / "kappa.csv", csv.str());
  for (const auto& r : reports) {
    std::printf("%-24s mean kappa %.3f  median kappa %.3f\n", r.set.c_str(), r.mean_kappa,
                r.median_kappa);
  }
  return 0;
}

int cmd_kurtograph(const Options& o) {
  if (o.kappa.empty()) throw Error(ErrorCode::InvalidArgument, "--kappa is required");
  const fs::path out = prepare_out(o.out);
  std::ifstream in(o.kappa, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + o.kappa);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, o.kappa + ": " + e.what());
  }
  KurtographSpec spec;
  spec.title = o.title.empty() ? "kurtograph" : o.title;
  try {
    for (const auto& r : doc.at("reports")) {
      KurtographSeries s;
      s.name = r.at("set").get<std::string>();
      std::vector<std::string> names;
      for (const auto& f : r.at("features")) {
        names.push_back(f.at("name").get<std::string>());
        s.kappa.push_back(f.at("kappa_median").get<double>());
      }
      if (spec.feature_labels.empty()) spec.feature_labels = names;
      spec.series.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, o.kappa + ": " + e.what());
  }
  spec.metadata = provenance("kurtograph", {{"kappa", o.kappa}, {"title", spec.title}}, o.seed).dump();
  write_text(out / "kurtograph.svg", render_kurtograph(spec));
  std::cout << "rendered " << spec.series.size() << " series\n";
  return 0;
}

// Random subset of `set` with exactly `n` rows, rows kept in original order.
FeatureSampleSet downsample(const FeatureSampleSet& set, std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  FeatureSampleSet out;
  out.name = set.name;
  out.features = set.features;
  for (std::size_t r : idx) {
    for (std::size_t f = 0; f < set.features; ++f) out.samples.push_back(set.at(r, f));
  }
  return out;
}

int cmd_correlate(const Options& o) {
  const fs::path out = prepare_out(o.out);
  NamedSets named = gather_sets(o, true);
  std::vector<std::size_t> keep;
  json skipped = json::array();
  for (std::size_t i = 0; i < named.sets.size(); ++i) {
    if (named.sets[i].size() == 0) {
      skipped.push_back({{"set", named.sets[i].name}, {"reason", "no texels"}});
    } else {
      keep.push_back(i);
    }
  }
  if (keep.size() < 2) throw Error(ErrorCode::EmptySet, "fewer than two non-empty classes");
  std::size_t smallest = named.sets[keep[0]].size();
  for (std::size_t i : keep) smallest = std::min(smallest, named.sets[i].size());

  std::vector<FeatureSampleSet> sets;
  for (std::size_t i : keep) {
    Rng rng(derive_seed(derive_seed(o.seed, "correlate"), i));
    sets.push_back(downsample(named.sets[i], smallest, rng));
  }
  const auto ranges = pooled_ranges(sets);
  std::vector<ClassSignature> sigs;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    sigs.push_back(class_signature(sets[k], ranges, named.corpus[keep[k]], named.cls[keep[k]]));
  }
  const CorrelationMatrix m = correlate(sigs);

  json config{{"features", o.features}, {"classes", o.classes}, {"downsample_size", smallest}};
  const json prov = provenance("correlate", config, o.seed);
  json labels = json::array();
  for (const auto& [corpus, cls] : m.labels) labels.push_back({{"corpus", corpus}, {"class", cls}});
  json r = json::array(), p = json::array();
  std::ostringstream csv;
  csv << "# " << prov.dump() << "\nlabel";
  for (const auto& [corpus, cls] : m.labels) csv << ',' << corpus << '/' << cls;
  csv << '\n';
  for (std::size_t i = 0; i < m.size; ++i) {
    json rr = json::array(), pp = json::array();
    csv << m.labels[i].first << '/' << m.labels[i].second;
    for (std::size_t j = 0; j < m.size; ++j) {
      rr.push_back(m.at(i, j));
      pp.push_back(m.p_at(i, j));
      csv << ',' << format_double(m.at(i, j));
    }
    csv << '\n';
    r.push_back(rr);
    p.push_back(pp);
  }
  json interclass = json::array();
  std::vector<std::string> corpora;
  for (const auto& [corpus, cls] : m.labels) {
    if (std::find(corpora.begin(), corpora.end(), corpus) == corpora.end()) corpora.push_back(corpus);
  }
  for (const auto& c : corpora) {
    std::size_t members = 0;
    for (const auto& l : m.labels) members += l.first == c;
    if (members < 2) continue;
    const InterclassMeans im = mean_interclass(m, c);
    json per = json::object();
    for (std::size_t i = 0; i < im.classes.size(); ++i) per[im.classes[i]] = im.per_class[i];
    interclass.push_back({{"corpus", c}, {"per_class", per}, {"overall", im.overall}});
  }
  write_json(out / "correlation.json", {{"provenance", prov},
                                        {"labels", labels},
                                        {"r", r},
                                        {"p", p},
                                        {"interclass", interclass},
                                        {"skipped", skipped}});
  write_text(out / "correlation.csv", csv.str());
  write_text(out / "heatmap.svg",
             render_heatmap(m, o.title.empty() ? "class correlation" : o.title, prov.dump()));
  std::cout << "correlated " << m.size << " class signatures\n";
  return 0;
}

int cmd_embed(const Options& o) {
  const fs::path out = prepare_out(o.out);
  if (o.features.size() != 1) throw Error(ErrorCode::InvalidArgument, "embed takes one --features file");
  const FeatureTable table = load_features(named_input(o.features[0]).second);
  std::vector<double> data;
  for (const auto& r : table.records) data.insert(data.end(), r.values.begin(), r.values.end());
  TsneOptions to;
  to.perplexity = o.perplexity;
  to.seed = o.seed;
  to.iterations = o.iterations;
  const Embedding2D emb = tsne_project(data, table.records.size(), table.features, to);
  const GridLayout layout = grid_assign(emb);

  json config{{"features", o.features}, {"perplexity", o.perplexity}, {"iterations", o.iterations},
              {"texel_size", o.texel_size}, {"manifest", o.manifest}};
  const json prov = provenance("embed", config, o.seed);
  std::ostringstream csv;
  csv << "# " << prov.dump() << "\nmap_id,x,y,row,col,tsne_x,tsne_y\n";
  for (std::size_t i = 0; i < emb.n; ++i) {
    const auto& r = table.records[i];
    csv << r.map_id << ',' << r.x << ',' << r.y << ',' << layout.cells[i].first << ','
        << layout.cells[i].second << ',' << format_double(emb.x(i)) << ','
        << format_double(emb.y(i)) << '\n';
  }
  write_text(out / "embedding.csv", csv.str());

  if (!o.manifest.empty()) {
    const Manifest m = load_manifest(o.manifest);
    std::map<std::string, RgbImage> images;
    for (const auto& rec : m.maps) images.emplace(rec.id, read_image(m.resolve(rec.image_path)));
    std::vector<Texel> texels;
    for (const auto& r : table.records) {
      const auto it = images.find(r.map_id);
      if (it == images.end()) {
        throw Error(ErrorCode::InvalidArgument, "map '" + r.map_id + "' is not in the manifest");
      }
      Texel t;
      t.map_id = r.map_id;
      t.x = r.x;
      t.y = r.y;
      t.size = o.texel_size;
      t.pixels = it->second.crop(r.x, r.y, o.texel_size, o.texel_size);
      texels.push_back(std::move(t));
    }
    const int cell = o.cell > 0 ? o.cell : o.texel_size;
    write_png(out / "montage.png", render_montage(texels, layout, cell), png_text(prov));
  }
  std::cout << "embedded " << emb.n << " texels on a " << layout.rows << "x" << layout.cols
            << " grid\n";
  return 0;
}

int cmd_ablate(const Options& o) {
  Manifest m = require_manifest(o);
  const fs::path out = prepare_out(o.out);
  const AblationMode mode = parse_mode(o.mode);
  const json prov = provenance("ablate", {{"manifest", o.manifest}, {"mode", o.mode}}, o.seed);
  fs::create_directories(out / "images");
  const fs::path out_abs = fs::absolute(out);
  auto relocate = [&](const fs::path& p) {
    const fs::path rel = fs::absolute(m.resolve(p)).lexically_relative(out_abs);
    return rel.empty() ? fs::absolute(m.resolve(p)) : rel;
  };
  Manifest result;
  result.base_dir = out;
  std::size_t degenerate = 0;
  for (const auto& rec : m.maps) {
    const AblationResult res = ablate(read_image(m.resolve(rec.image_path)), mode);
    degenerate += res.degenerate;
    MapRecord copy = rec;
    copy.image_path = fs::path("images") / (rec.id + ".png");
    write_png(out / copy.image_path, res.image, png_text(prov));
    if (rec.label_path) copy.label_path = relocate(*rec.label_path);
    if (rec.extra.contains("prediction_path") && rec.extra["prediction_path"].is_string()) {
      copy.extra["prediction_path"] =
          relocate(rec.extra["prediction_path"].get<std::string>()).generic_string();
    }
    result.maps.push_back(std::move(copy));
  }
  write_text(out / "manifest.json", dump_manifest(result));
  std::cout << "ablated " << result.maps.size() << " maps (" << o.mode << ")";
  if (degenerate) std::cout << ", " << degenerate << " with a constant binarization";
  std::cout << "\n";
  return 0;
}

json metrics_json(const ClassMetrics& cm) {
  json per = json::array();
  for (std::size_t k = 0; k < cm.per_class.size(); ++k) {
    const ClassScore& s = cm.per_class[k];
    per.push_back({{"class", cm.class_names[k]},
                   {"defined", s.defined},
                   {"iou", s.iou},
                   {"accuracy", s.accuracy},
                   {"precision", s.precision ? json(*s.precision) : json(nullptr)},
                   {"recall", s.recall ? json(*s.recall) : json(nullptr)}});
  }
  return {{"per_class", per},
          {"mean_iou", cm.mean_iou},
          {"mean_accuracy", cm.mean_accuracy},
          {"mean_precision", cm.mean_precision},
          {"mean_recall", cm.mean_recall},
          {"pixel_accuracy", cm.pixel_accuracy},
          {"has_undefined", cm.has_undefined}};
}

json confusion_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (int g = 0; g < cm.classes(); ++g) {
    json row = json::array();
    for (int p = 0; p < cm.classes(); ++p) row.push_back(cm.at(g, p));
    rows.push_back(row);
  }
  return rows;
}

int cmd_segeval(const Options& o) {
  const Manifest m = require_manifest(o);
  const fs::path out = prepare_out(o.out);
  json config{{"manifest", o.manifest}, {"classes", o.classes}, {"pred_dir", o.pred_dir},
              {"patch_size", o.patch_size}};
  const json prov = provenance("segeval", config, o.seed);
  std::vector<PatchResult> patches;
  struct Origin {
    std::string map_id;
    int x, y;
  };
  std::vector<Origin> origins;
  for (const auto& rec : m.maps) {
    if (!rec.label_path) continue;
    fs::path pred_path;
    if (!o.pred_dir.empty()) {
      pred_path = fs::path(o.pred_dir) / (rec.id + ".png");
    } else if (rec.extra.contains("prediction_path") && rec.extra["prediction_path"].is_string()) {
      pred_path = m.resolve(rec.extra["prediction_path"].get<std::string>());
    } else {
      continue;
    }
    const ClassMap gt = load_label(m.resolve(*rec.label_path), o);
    const ClassMap pred = load_label(pred_path, o);
    if (o.patch_size <= 0) {
      patches.push_back({rec.id, confusion(pred, gt)});
      origins.push_back({rec.id, 0, 0});
      continue;
    }
    for (const auto& origin : texel_grid(gt.width(), gt.height(), o.patch_size, o.patch_size)) {
      origins.push_back({rec.id, origin.x, origin.y});
      patches.push_back({rec.id + "@" + std::to_string(origin.x) + "_" + std::to_string(origin.y),
                         confusion(pred.crop(origin.x, origin.y, o.patch_size, o.patch_size),
                                   gt.crop(origin.x, origin.y, o.patch_size, o.patch_size))});
    }
  }
  if (patches.empty()) throw Error(ErrorCode::EmptySet, "no map has both a label and a prediction");
  const ConfusionMatrix pooled = pool(patches);
  const ClassMetrics overall = metrics(pooled);
  const NormalizedConfusion norm = normalize_confusion(pooled);
  json norm_rows = json::array();
  for (int g = 0; g < norm.classes; ++g) {
    json row = json::array();
    for (int p = 0; p < norm.classes; ++p) {
      row.push_back(norm.empty_rows[static_cast<std::size_t>(g)] ? json(nullptr) : json(norm.at(g, p)));
    }
    norm_rows.push_back(row);
  }
  json report{{"provenance", prov},
              {"patches", patches.size()},
              {"pixels", pooled.total()},
              {"metrics", metrics_json(overall)},
              {"confusion", confusion_json(pooled)},
              {"normalized_confusion", norm_rows}};
  if (patches.size() >= 2) {
    const BestHalf bh = best_half(patches);
    report["best_half"] = {{"median_miou", bh.median_miou},
                           {"selected", bh.selected},
                           {"tie_fallback", bh.tie_fallback},
                           {"metrics", metrics_json(bh.metrics)}};
  } else {
    report["best_half"] = nullptr;
  }
  write_json(out / "segeval.json", report);

  std::ostringstream csv;
  csv << "# " << prov.dump() << "\npatch_id,map_id,x,y,pixels,mean_iou,pixel_accuracy\n";
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const PatchResult& p = patches[i];
    const ClassMetrics pm = metrics(p.cm);
    csv << p.id << ',' << origins[i].map_id << ',' << origins[i].x << ',' << origins[i].y << ','
        << p.cm.total() << ',' << format_double(pm.mean_iou) << ','
        << format_double(pm.pixel_accuracy) << '\n';
  }
  write_text(out / "segeval_patches.csv", csv.str());
  std::printf("mIoU %.4f  pixel accuracy %.4f over %zu patches\n", overall.mean_iou,
              overall.pixel_accuracy, patches.size());
  return 0;
}

int cmd_extrapolate(const Options& o) {
  if (o.scores.empty()) throw Error(ErrorCode::InvalidArgument, "--scores is required");
  const fs::path out = prepare_out(o.out);
  std::ifstream in(o.scores, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + o.scores);
  std::vector<double> sizes, scores;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      if (line == "size,score") continue;
    }
    const auto comma = line.find(',');
    char* end1 = nullptr;
    char* end2 = nullptr;
    const std::string a = line.substr(0, comma);
    const std::string b = comma == std::string::npos ? "" : line.substr(comma + 1);
    const double s = std::strtod(a.c_str(), &end1);
    const double v = std::strtod(b.c_str(), &end2);
    if (comma == std::string::npos || a.empty() || b.empty() || *end1 || *end2) {
      throw Error(ErrorCode::Parse, o.scores + ": expected 'size,score' rows, got '" + line + "'");
    }
    sizes.push_back(s);
    scores.push_back(v);
  }
  PowerLawOptions po;
  po.target = o.complement ? FitTarget::Complement : FitTarget::Score;
  const PowerLawFit fit = fit_power_law(sizes, scores, po);

  json config{{"scores", o.scores}, {"targets", o.targets}, {"at", o.at_sizes},
              {"complement", o.complement}};
  const json prov = provenance("extrapolate", config, o.seed);
  json predictions = json::array();
  for (double x : o.at_sizes) predictions.push_back({{"size", x}, {"score", extrapolate_score(fit, x)}});
  json needed = json::array();
  for (double t : o.targets) {
    try {
      needed.push_back({{"target", t}, {"size", extrapolate_size(fit, t)}});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unreachable) throw;
      needed.push_back({{"target", t}, {"size", nullptr}, {"reason", e.what()}});
    }
  }
  write_json(out / "extrapolation.json",
             {{"provenance", prov},
              {"fit", {{"a", fit.a}, {"b", fit.b}, {"c", fit.c}, {"residual", fit.residual},
                       {"target", o.complement ? "complement" : "score"}}},
              {"predictions", predictions},
              {"sizes_for_targets", needed}});
  std::ostringstream csv;
  csv << "# " << prov.dump() << "\nsize,observed,fitted\n";
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    csv << format_double(sizes[i]) << ',' << format_double(scores[i]) << ','
        << format_double(fit(sizes[i])) << '\n';
  }
  write_text(out / "extrapolation.csv", csv.str());
  std::printf("fit a=%.6g b=%.6g c=%.6g residual=%.3g\n", fit.a, fit.b, fit.c, fit.residual);
  return 0;
}

int cmd_proportions(const Options& o) {
  const Manifest m = require_manifest(o);
  const fs::path out = prepare_out(o.out);
  const json prov = provenance("proportions", {{"manifest", o.manifest}, {"classes", o.classes}}, o.seed);
  std::vector<ClassMap> labels;
  json per_map = json::array();
  for (const auto& rec : m.maps) {
    if (!rec.label_path) continue;
    labels.push_back(load_label(m.resolve(*rec.label_path), o));
    const auto p = area_proportions(std::span<const ClassMap>(&labels.back(), 1));
    per_map.push_back({{"map_id", rec.id}, {"proportions", p}});
  }
  if (labels.empty()) throw Error(ErrorCode::EmptySet, "no map in the manifest has a label");
  const auto pooled = area_proportions(labels);
  const Ontology& ont = labels.front().ontology();
  json named = json::object();
  json class_names = json::array();
  for (const auto& c : ont.classes()) class_names.push_back(c.name);
  std::ostringstream csv;
  csv << "# " << prov.dump() << "\nclass,proportion\n";
  for (int k = 0; k < ont.arity(); ++k) {
    named[ont.name(k)] = pooled[static_cast<std::size_t>(k)];
    csv << ont.name(k) << ',' << format_double(pooled[static_cast<std::size_t>(k)]) << '\n';
  }
  write_json(out / "proportions.json", {{"provenance", prov},
                                        {"classes", class_names},
                                        {"pooled", named},
                                        {"per_map", per_map}});
  write_text(out / "proportions.csv", csv.str());
  for (int k = 0; k < ont.arity(); ++k) {
    std::printf("%-14s %.4f\n", ont.name(k).c_str(), pooled[static_cast<std::size_t>(k)]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"figkit: measure cartographic figuration in historical maps"};
  app.set_version_flag("--version", std::string("figkit ") + FIGKIT_VERSION);
  app.require_subcommand(1);
  Options o;
  std::function<int(const Options&)> run;

  const std::vector<std::string> modes{"reference", "gray", "binary", "textureless"};
  auto add_seed = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Seed for every random stream")->capture_default_str();
  };
  auto add_out = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output directory")->required();
  };
  auto add_manifest = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--manifest", o.manifest, "Corpus manifest (JSON)");
    if (required) opt->required();
  };
  auto add_classes = [&](CLI::App* c) {
    c->add_option("--classes", o.classes, "Ontology arity")
        ->check(CLI::IsMember({3, 5}))
        ->capture_default_str();
  };
  auto add_texels = [&](CLI::App* c) {
    c->add_option("--texel-size", o.texel_size, "Texel edge in pixels")
        ->check(CLI::Range(kMinTexelSize, 100000))
        ->capture_default_str();
    c->add_option("--stride", o.stride, "Texel grid stride in pixels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--threshold", o.threshold, "Class purity threshold in (0.5, 1]")
        ->capture_default_str();
    c->add_option("--mode", o.mode, "Ablation applied before extraction")
        ->check(CLI::IsMember(modes))
        ->capture_default_str();
    add_classes(c);
  };
  auto bind = [&](CLI::App* c, int (*fn)(const Options&)) {
    c->callback([&run, fn] { run = fn; });
  };

  auto* synth = app.add_subcommand("synth", "Write the procedural mini-corpus");
  add_out(synth);
  add_seed(synth);
  synth->add_option("--maps", o.maps, "Number of maps")->check(CLI::Range(1, 100))->capture_default_str();
  synth->add_option("--size", o.size, "Map edge in pixels")->check(CLI::Range(200, 10000))->capture_default_str();
  bind(synth, cmd_synth);

  auto* extract = app.add_subcommand("extract", "Cut maps into texels and assign classes");
  add_manifest(extract, true);
  add_out(extract);
  add_seed(extract);
  add_texels(extract);
  bind(extract, cmd_extract);

  auto* features = app.add_subcommand("features", "Compute texel feature vectors");
  add_manifest(features, true);
  add_out(features);
  add_seed(features);
  add_texels(features);
  features->add_flag("--simplified", o.simplified, "Write the 14-feature simplified set");
  bind(features, cmd_features);

  auto* kappa_cmd = app.add_subcommand("kappa", "Bootstrap kappa coefficients per sample set");
  kappa_cmd->add_option("--features", o.features, "Feature files, optionally name=path")->required();
  add_out(kappa_cmd);
  add_seed(kappa_cmd);
  kappa_cmd->add_option("--trials", o.trials, "Bootstrap trials")->check(CLI::PositiveNumber)->capture_default_str();
  kappa_cmd->add_flag("--by-class", o.by_class, "One set per class instead of per file");
  add_classes(kappa_cmd);
  bind(kappa_cmd, cmd_kappa);

  auto* kurt = app.add_subcommand("kurtograph", "Render a kurtograph from kappa.json");
  kurt->add_option("--kappa", o.kappa, "kappa.json from the kappa command")->required();
  add_out(kurt);
  add_seed(kurt);
  kurt->add_option("--title", o.title, "Chart title");
  bind(kurt, cmd_kurtograph);

  auto* corr = app.add_subcommand("correlate", "Pearson correlation of class signatures");
  corr->add_option("--features", o.features, "Feature files, optionally name=path")->required();
  add_out(corr);
  add_seed(corr);
  add_classes(corr);
  corr->add_option("--title", o.title, "Heatmap title");
  bind(corr, cmd_correlate);

  auto* embed = app.add_subcommand("embed", "t-SNE projection, grid layout and montage");
  embed->add_option("--features", o.features, "Feature file")->required();
  add_manifest(embed, false);
  add_out(embed);
  add_seed(embed);
  embed->add_option("--perplexity", o.perplexity, "t-SNE perplexity")->check(CLI::PositiveNumber)->capture_default_str();
  embed->add_option("--iterations", o.iterations, "t-SNE iterations")->check(CLI::PositiveNumber)->capture_default_str();
  embed->add_option("--texel-size", o.texel_size, "Texel edge used for the montage")->capture_default_str();
  embed->add_option("--cell", o.cell, "Montage cell edge (default: texel size)");
  bind(embed, cmd_embed);

  auto* abl = app.add_subcommand("ablate", "Write ablated copies of a corpus");
  add_manifest(abl, true);
  add_out(abl);
  add_seed(abl);
  abl->add_option("--mode", o.mode, "Ablation mode")->check(CLI::IsMember(modes))->required();
  bind(abl, cmd_ablate);

  auto* seg = app.add_subcommand("segeval", "Score predicted label rasters");
  add_manifest(seg, true);
  add_out(seg);
  add_seed(seg);
  add_classes(seg);
  seg->add_option("--pred-dir", o.pred_dir, "Directory of <map_id>.png predictions");
  seg->add_option("--patch-size", o.patch_size, "Score square patches of this edge (0: whole maps)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bind(seg, cmd_segeval);

  auto* extra = app.add_subcommand("extrapolate", "Fit a power law to a learning curve");
  extra->add_option("--scores", o.scores, "CSV of size,score rows")->required();
  add_out(extra);
  add_seed(extra);
  extra->add_option("--target", o.targets, "Score whose required size is reported");
  extra->add_option("--at", o.at_sizes, "Sizes at which the score is predicted");
  extra->add_flag("--complement", o.complement, "Fit 1 - score instead of the score");
  bind(extra, cmd_extrapolate);

  auto* prop = app.add_subcommand("proportions", "Pooled class area proportions");
  add_manifest(prop, true);
  add_out(prop);
  add_seed(prop);
  add_classes(prop);
  bind(prop, cmd_proportions);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    return run(o);
  } catch (const Error& e) {
    std::cerr << "figkit: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "figkit: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "figkit: " << e.what() << "\n";
    return kExitConfig;
  }
}
