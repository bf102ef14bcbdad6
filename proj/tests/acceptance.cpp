// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each check uses its own oracle rather than library helpers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "figkit/analysis.hpp"
#include "figkit/error.hpp"
#include "figkit/features.hpp"
#include "figkit/image_io.hpp"
#include "figkit/kappa.hpp"
#include "figkit/parallel.hpp"
#include "figkit/raster.hpp"
#include "figkit/rng.hpp"
#include "figkit/segeval.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace figkit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- kurtosis ----

Outcome kurtosis_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(derive_seed(1, "kurtosis"));
  std::vector<double> signs(100000), uni(100000), gauss(100000);
  for (auto& v : signs) v = rng.below(2) ? 1.0 : -1.0;
  for (auto& v : uni) v = rng.uniform();
  for (auto& v : gauss) v = rng.normal();
  // Exactly balanced signs have mean 0 and x^2 = x^4 = 1.
  std::vector<double> balanced(100000);
  for (std::size_t i = 0; i < balanced.size(); ++i) balanced[i] = i % 2 ? 1.0 : -1.0;
  const double kb = kurtosis(balanced);
  const double ks = kurtosis(std::vector<double>{1, -1, -1, 1, 1, -1});
  const double ku = kurtosis(uni);
  const double kn = kurtosis(gauss);
  o.require(kb == 1.0, "balanced +/-1 kurtosis is " + fmt("%.17g", kb));
  o.require(ks == 1.0, "six-value +/-1 kurtosis is " + fmt("%.17g", ks));
  o.require(std::abs(ku - 1.8) <= 0.05, "uniform kurtosis " + fmt("%.4f", ku));
  o.require(std::abs(kn - 3.0) <= 0.1, "normal kurtosis " + fmt("%.4f", kn));
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "took " + fmt("%.2f s", secs));
  if (o.pass) o.detail = "uniform " + fmt("%.4f", ku) + ", normal " + fmt("%.4f", kn);
  return o;
}

// ---- kappa unimodal reduction and affine equivariance ----

// Quantiles of a triangular law on [0, 1] with its peak at `mode`.
std::vector<double> stratified_triangular(std::size_t n, double mode) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    v[i] = u < mode ? std::sqrt(u * mode) : 1.0 - std::sqrt((1.0 - u) * (1.0 - mode));
  }
  return v;
}

// Every value keeps at least `margin` (in bin units) from bin edges and from
// the half-bin points where plateau splits can fall.
bool clear_of_edges(const std::vector<double>& v, double margin) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double span = *hi - *lo;
  for (double x : v) {
    if (x == *lo || x == *hi) continue;
    const double t = 2.0 * kKappaBins * (x - *lo) / span;
    if (std::abs(t - std::round(t)) < 2.0 * margin) return false;
  }
  return true;
}

Outcome kappa_reduction() {
  Outcome o;
  Rng rng(derive_seed(2, "unimodal"));
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2000 + rng.below(8000);
    auto v = stratified_triangular(n, rng.uniform(0.2, 0.8));
    const double scale = rng.uniform(0.1, 50.0) * (rng.below(2) ? 1.0 : -1.0);
    const double shift = rng.uniform(-100.0, 100.0);
    for (auto& x : v) x = scale * x + shift;
    // Shuffle so the order carries no structure.
    for (std::size_t k = n - 1; k > 0; --k) std::swap(v[k], v[rng.below(k + 1)]);
    const KappaResult r = kappa_detail(v);
    o.require(r.mode_sizes.size() == 1, "unimodal sample " + std::to_string(i) + " split into " +
                                            std::to_string(r.mode_sizes.size()) + " modes");
    o.require(r.kappa == kurtosis(v), "kappa differs from kurtosis on sample " + std::to_string(i));
  }

  int checked = 0, skipped = 0;
  double worst = 0.0;
  Rng arng(derive_seed(2, "affine"));
  while (checked < 50) {
    const std::size_t n = 1000 + arng.below(4000);
    std::vector<double> v(n);
    const double gap = arng.uniform(4.0, 10.0);
    const double share = arng.uniform(0.3, 0.7);
    for (std::size_t k = 0; k < n; ++k) v[k] = (arng.uniform() < share ? 0.0 : gap) + arng.normal();
    const double alpha = arng.uniform(0.1, 20.0) * (arng.below(2) ? 1.0 : -1.0);
    const double beta = arng.uniform(-50.0, 50.0);
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = alpha * v[k] + beta;
    if (!clear_of_edges(v, 1e-6) || !clear_of_edges(w, 1e-6)) {
      ++skipped;
      continue;
    }
    ++checked;
    const KappaResult a = kappa_detail(v);
    const KappaResult b = kappa_detail(w);
    auto sizes = b.mode_sizes;
    auto kurt = b.mode_kurtosis;
    if (alpha < 0) {
      std::reverse(sizes.begin(), sizes.end());
      std::reverse(kurt.begin(), kurt.end());
    }
    o.require(sizes == a.mode_sizes, "affine map changed the mode partition");
    const double rel = std::abs(a.kappa - b.kappa) / std::abs(a.kappa);
    worst = std::max(worst, rel);
    o.require(rel <= 1e-9, "affine kappa differs by " + fmt("%.3g", rel));
  }
  if (o.pass) {
    o.detail = "50 unimodal exact; 50 affine pairs, max rel diff " + fmt("%.2g", worst) + " (" +
               std::to_string(skipped) + " near-edge draws skipped)";
  }
  return o;
}

// ---- kappa discrimination and bootstrap determinism ----

Outcome kappa_discrimination() {
  Outcome o;
  Rng rng(derive_seed(3, "spike"));
  std::vector<double> spike(10000), uni(10000);
  for (std::size_t i = 0; i < spike.size(); ++i) spike[i] = i < 9500 ? 0.5 : rng.uniform();
  for (auto& x : uni) x = rng.uniform();
  const double ks = kappa(spike), ku = kappa(uni);
  o.require(ks > 10.0 * ku, "spike " + fmt("%.4g", ks) + " vs uniform " + fmt("%.4g", ku));

  std::vector<FeatureSampleSet> sets;
  for (std::size_t s = 0; s < 3; ++s) {
    FeatureSampleSet set;
    set.name = "set" + std::to_string(s);
    set.features = 4;
    const std::size_t rows = 80 + 70 * s;
    for (std::size_t i = 0; i < rows * 4; ++i) set.samples.push_back(i % 4 ? rng.uniform() : rng.normal());
    sets.push_back(std::move(set));
  }
  BootstrapOptions opt;
  opt.trials = 300;
  opt.seed = 77;
  set_thread_count(1);
  const auto one = bootstrap_kappa(sets, opt);
  set_thread_count(4);
  const auto four = bootstrap_kappa(sets, opt);
  set_thread_count(0);
  const auto serial = bootstrap_kappa_serial(sets, opt);
  auto same = [](const std::vector<KappaReport>& a, const std::vector<KappaReport>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t s = 0; s < a.size(); ++s)
      for (std::size_t f = 0; f < a[s].features.size(); ++f) {
        const auto& x = a[s].features[f];
        const auto& y = b[s].features[f];
        if (x.kappa != y.kappa || x.kappa_median != y.kappa_median ||
            x.ci95_halfwidth_pct != y.ci95_halfwidth_pct)
          return false;
      }
    return true;
  };
  o.require(same(one, four), "bootstrap differs between 1 and 4 threads");
  o.require(same(one, serial), "bootstrap differs from the serial reference");
  if (o.pass) o.detail = "spike " + fmt("%.4g", ks) + " vs uniform " + fmt("%.4g", ku) + "; 1 = 4 threads";
  return o;
}

// ---- LBP ----

Outcome lbp_rotation() {
  Outcome o;
  Rng rng(derive_seed(4, "lbp"));
  for (int i = 0; i < 50; ++i) {
    const int size = 20 + static_cast<int>(rng.below(31));
    const GrayImage t = test::random_gray(rng, size, size, i % 3 ? 256 : 3);
    const auto h0 = lbp_histogram(t);
    GrayImage r = t;
    for (int turn = 1; turn <= 3; ++turn) {
      r = test::rotate90(r);
      o.require(lbp_histogram(r) == h0, "texel " + std::to_string(i) + " differs after " +
                                            std::to_string(90 * turn) + " degrees");
    }
  }
  const auto flat = lbp_semantic(GrayImage(30, 30, 90));
  o.require(flat == std::array<double, 3>{1.0, 0.0, 0.0}, "constant texel is not pure flat");
  if (o.pass) o.detail = "50 texels x 3 rotations; constant -> (1, 0, 0)";
  return o;
}

// ---- HOG ----

Outcome hog_direction() {
  Outcome o;
  const FeatureConfig cfg;
  const auto zero_bin = static_cast<std::size_t>(superbin_of(0, cfg.hog_orientations));
  auto argmax = [](const HogResult& h) {
    return static_cast<std::size_t>(std::max_element(h.values.begin(), h.values.end()) - h.values.begin());
  };
  double worst = 1.0;
  for (int period : {2, 3, 4, 5, 8}) {
    GrayImage img(50, 50);
    for (int y = 0; y < 50; ++y)
      for (int x = 0; x < 50; ++x) img.set(x, y, (x / period) % 2 ? 230 : 20);
    const HogResult v = hog_superbins(img);
    worst = std::min(worst, v.values[zero_bin]);
    o.require(v.values[zero_bin] >= 0.9, "period " + std::to_string(period) + " puts " +
                                             fmt("%.3f", v.values[zero_bin]) + " in the 0 superbin");
    const HogResult t = hog_superbins(test::transpose(img));
    o.require(argmax(v) == static_cast<std::size_t>(HogSuperbin::Vertical) &&
                  argmax(t) == static_cast<std::size_t>(HogSuperbin::Horizontal),
              "transposition does not swap the argmax");
  }
  if (o.pass) o.detail = "min mass " + fmt("%.3f", worst) + ", argmax swaps under transposition";
  return o;
}

// ---- Otsu ----

int brute_force_otsu(const GrayImage& img) {
  // Between-class variance compared as exact rationals.
  std::int64_t n = 0, s = 0;
  for (auto v : img.data()) {
    ++n;
    s += v;
  }
  int best = -1;
  unsigned __int128 best_num = 0;
  std::uint64_t best_den = 1;
  for (int t = 0; t < 256; ++t) {
    std::int64_t n0 = 0, s0 = 0;
    for (auto v : img.data())
      if (v <= t) {
        ++n0;
        s0 += v;
      }
    const std::int64_t n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const __int128 d = static_cast<__int128>(n) * s0 - static_cast<__int128>(n0) * s;
    const auto ad = static_cast<unsigned __int128>(d < 0 ? -d : d);
    const auto num = ad * ad;
    const auto den = static_cast<std::uint64_t>(n0 * n1);
    if (best < 0 || num * best_den > best_num * den) {
      best = t;
      best_num = num;
      best_den = den;
    }
  }
  return best;
}

Outcome otsu_exact() {
  Outcome o;
  Rng rng(derive_seed(6, "otsu"));
  int compared = 0;
  for (int i = 0; i < 100; ++i) {
    const int w = 8 + static_cast<int>(rng.below(60));
    const int h = 8 + static_cast<int>(rng.below(60));
    const GrayImage img = test::random_gray(rng, w, h, i % 4 ? 256 : 2 + static_cast<int>(rng.below(5)));
    const int oracle = brute_force_otsu(img);
    if (oracle < 0) continue;  // single-valued image
    ++compared;
    const int got = otsu_threshold(img).threshold;
    o.require(got == oracle, "image " + std::to_string(i) + ": " + std::to_string(got) + " vs " +
                                 std::to_string(oracle));
  }
  if (o.pass) o.detail = std::to_string(compared) + " images agree exactly";
  return o;
}

// ---- segeval ----

Outcome segeval_exact() {
  Outcome o;
  const Ontology& five = Ontology::five_class();
  Rng rng(derive_seed(7, "segeval"));
  for (int trial = 0; trial < 100; ++trial) {
    const ClassMap gt = test::random_classes(rng, 64, 64, five);
    const ClassMap pred = test::random_classes(rng, 64, 64, five);
    std::uint64_t oracle[5][5] = {};
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) ++oracle[gt.at(x, y)][pred.at(x, y)];
    const ConfusionMatrix cm = confusion(pred, gt);
    bool same = true;
    for (int g = 0; g < 5; ++g)
      for (int p = 0; p < 5; ++p) same = same && cm.at(g, p) == oracle[g][p];
    o.require(same, "pair " + std::to_string(trial) + " miscounted");
    const ClassMetrics m = metrics(cm);
    const NormalizedConfusion n = normalize_confusion(cm);
    for (int c = 0; c < 5; ++c) {
      const auto& rec = m.per_class[static_cast<std::size_t>(c)].recall;
      o.require(rec && n.at(c, c) == *rec, "normalized diagonal differs from recall");
    }
  }
  const Ontology& three = Ontology::three_class();
  const ClassMap gt(2, 2, three, std::vector<std::uint8_t>{0, 0, 1, 1});
  const ClassMap pred(2, 2, three, std::vector<std::uint8_t>{0, 1, 1, 1});
  const double miou = metrics(confusion(pred, gt)).mean_iou;
  o.require(std::abs(miou - 7.0 / 12.0) < 1e-15, "toy mIoU " + fmt("%.17g", miou));
  if (o.pass) o.detail = "100 pairs exact; toy mIoU " + fmt("%.6f", miou);
  return o;
}

// ---- power law ----

Outcome power_law_round_trip() {
  Outcome o;
  std::vector<double> sizes, scores;
  for (double x : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
    sizes.push_back(x);
    scores.push_back(0.5 + 2.0 / x);
  }
  const PowerLawFit f = fit_power_law(sizes, scores);
  auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
  o.require(rel(f.a, 2.0) <= 1e-4 && rel(f.b, 0.5) <= 1e-4 && rel(f.c, 1.0) <= 1e-4,
            "fit (" + fmt("%.8g", f.a) + ", " + fmt("%.8g", f.b) + ", " + fmt("%.8g", f.c) + ")");
  double worst = 0.0;
  for (double s : {1.5, 3.0, 10.0, 47.0, 300.0}) {
    const double back = extrapolate_size(f, extrapolate_score(f, s));
    worst = std::max(worst, rel(back, s));
  }
  o.require(worst <= 1e-9, "inverse of forward off by " + fmt("%.3g", worst));
  const double x07 = extrapolate_size(f, 0.7);
  o.require(std::abs(x07 - 10.0) <= 1e-4, "target 0.7 inverts to " + fmt("%.10g", x07));
  if (o.pass) {
    o.detail = "a=" + fmt("%.8f", f.a) + " b=" + fmt("%.8f", f.b) + " c=" + fmt("%.8f", f.c) +
               ", 0.7 -> " + fmt("%.8f", x07);
  }
  return o;
}

// ---- grid assignment ----

double exhaustive_cost(const std::vector<double>& pts, int rows, int cols) {
  const int n = static_cast<int>(pts.size() / 2);
  std::vector<int> cells(static_cast<std::size_t>(rows * cols));
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
  double best = 1e300;
  // Every ordered choice of n cells via permutations of all cells; the
  // trailing cells are ignored, so each placement appears (cells - n)! times.
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
      const int cell = cells[static_cast<std::size_t>(i)];
      const double dx = pts[2 * i] - (cell % cols + 0.5) / cols;
      const double dy = pts[2 * i + 1] - (cell / cols + 0.5) / rows;
      c += dx * dx + dy * dy;
    }
    best = std::min(best, c);
  } while (std::next_permutation(cells.begin(), cells.end()));
  return best;
}

Outcome grid_optimal() {
  Outcome o;
  Rng rng(derive_seed(9, "grid"));
  for (int set = 0; set < 20; ++set) {
    const std::size_t n = 1 + set % 7;
    Embedding2D e;
    e.n = n;
    e.coords.resize(2 * n);
    for (auto& c : e.coords) c = rng.uniform(-10.0, 10.0);
    const GridLayout g = grid_assign(e);
    std::set<std::pair<int, int>> used(g.cells.begin(), g.cells.end());
    bool inside = g.cells.size() == n;
    for (const auto& [r, c] : g.cells) inside = inside && r >= 0 && r < g.rows && c >= 0 && c < g.cols;
    o.require(inside && used.size() == n, "set " + std::to_string(set) + " is not a bijection");
    const double oracle = exhaustive_cost(normalized_coords(e), g.rows, g.cols);
    const double got = layout_cost(e, g);
    o.require(got <= oracle * (1.0 + 1e-12) + 1e-15,
              "set " + std::to_string(set) + " cost " + fmt("%.17g", got) + " vs " + fmt("%.17g", oracle));
  }
  if (o.pass) o.detail = "20 sets, N = 1..7, optimal and bijective";
  return o;
}

// ---- end to end ----

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool well_formed_xml(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = xml.find('<', i)) != std::string::npos) {
    const std::size_t end = xml.find('>', i);
    if (end == std::string::npos) return false;
    const std::string tag = xml.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!' || tag.back() == '/') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else {
      stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
    }
  }
  return stack.empty() && xml.find("<svg") != std::string::npos;
}

// Same number of fields on every non-comment line.
bool rectangular_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  long fields = -1;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const long f = std::count(line.begin(), line.end(), ',') + 1;
    if (fields >= 0 && f != fields) return false;
    fields = f;
    ++rows;
  }
  return rows >= 2;
}

int run_cli(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd \"" + cwd.string() + "\" && \"" + FIGKIT_CLI_PATH + "\" " + args +
                          " >> run.log 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::vector<std::string>& pipeline() {
  static const std::vector<std::string> steps{
      "synth --out corpus --seed 7 --maps 3 --size 400",
      "extract --manifest corpus/manifest.json --out texels --stride 25 --seed 7",
      "features --manifest corpus/manifest.json --out features --stride 25 --seed 7",
      "features --manifest corpus/manifest.json --out features --stride 25 --seed 7 --simplified",
      "features --manifest corpus/manifest.json --out features3 --stride 25 --seed 7 --classes 3",
      "kappa --features features/features.csv --by-class --trials 1000 --seed 7 --out kappa",
      "kappa --features five=features/features.csv --features three=features3/features.csv "
      "--trials 1000 --seed 7 --out kappa_sets",
      "kurtograph --kappa kappa/kappa.json --out kappa --title \"Synthetic corpus\"",
      "correlate --features synth=features/features.csv --seed 7 --out correlation",
      "embed --features features/features.csv --manifest corpus/manifest.json --seed 7 "
      "--out embedding",
      "ablate --manifest corpus/manifest.json --mode binary --out ablated",
      "segeval --manifest corpus/manifest.json --patch-size 100 --out segeval",
      "extrapolate --scores corpus/training_curve.csv --target 0.9 --target 0.99 --at 1000 --out extrapolation",
      "proportions --manifest corpus/manifest.json --out proportions",
  };
  return steps;
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "run.log") continue;
    out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return out;
}

Outcome end_to_end() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / "figkit_acceptance";
  fs::remove_all(base);
  const fs::path runs[2] = {base / "run1", base / "run2"};
  double slowest = 0.0;
  for (const auto& dir : runs) {
    fs::create_directories(dir);
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& step : pipeline()) {
      const int rc = run_cli(dir, step);
      o.require(rc == 0, "'" + step.substr(0, step.find(' ')) + "' exited with " + std::to_string(rc) +
                             " (see " + (dir / "run.log").string() + ")");
      if (!o.pass) return o;
    }
    slowest = std::max(slowest, seconds_since(t0));
  }
  o.require(slowest < 120.0, "pipeline took " + fmt("%.1f s", slowest));

  const auto a = tree_bytes(runs[0]);
  const auto b = tree_bytes(runs[1]);
  std::map<std::string, int> kinds;
  for (const auto& [name, bytes] : a) {
    const std::string ext = fs::path(name).extension().string();
    ++kinds[ext];
    bool valid = true;
    if (ext == ".json") {
      valid = nlohmann::json::accept(bytes);
    } else if (ext == ".svg") {
      valid = well_formed_xml(bytes);
    } else if (ext == ".csv") {
      valid = rectangular_csv(bytes);
    } else if (ext == ".png") {
      try {
        valid = !read_png(runs[0] / name).empty();
      } catch (const std::exception&) {
        valid = false;
      }
    }
    o.require(valid, name + " is not a valid " + ext + " artifact");
  }
  for (const char* needed : {"kappa/kappa.json", "kappa/kurtograph.svg", "correlation/heatmap.svg",
                             "correlation/correlation.json", "embedding/embedding.csv",
                             "embedding/montage.png", "segeval/segeval.json",
                             "extrapolation/extrapolation.json", "proportions/proportions.json",
                             "features/features.csv", "texels/texels.csv"}) {
    o.require(a.count(needed) == 1, std::string("missing ") + needed);
  }
  o.require(a.size() == b.size(), "reruns produced different file sets");
  std::size_t differing = 0;
  std::string first_diff;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != bytes) {
      if (!differing) first_diff = name;
      ++differing;
    }
  }
  o.require(differing == 0, std::to_string(differing) + " files differ between reruns, e.g. " + first_diff);
  if (o.pass) {
    o.detail = std::to_string(a.size()) + " artifacts (" + std::to_string(kinds[".json"]) + " json, " +
               std::to_string(kinds[".svg"]) + " svg, " + std::to_string(kinds[".csv"]) + " csv, " +
               std::to_string(kinds[".png"]) + " png), byte-identical rerun, slowest run " +
               fmt("%.1f s", slowest);
    fs::remove_all(base);
  }
  return o;
}

// ---- Pearson ----

ClassSignature signature_of(std::string name, std::vector<double> histograms) {
  ClassSignature s;
  s.corpus = "c";
  s.class_name = std::move(name);
  s.features = histograms.size() / kSignatureBins;
  s.histograms = std::move(histograms);
  return s;
}

Outcome pearson_sanity() {
  Outcome o;
  Rng rng(derive_seed(11, "pearson"));
  std::vector<double> h(3 * kSignatureBins);
  for (auto& v : h) v = static_cast<double>(rng.below(50));
  std::vector<double> integer_affine, real_affine;
  for (double v : h) {
    integer_affine.push_back(3.0 * v + 2.0);
    real_affine.push_back(0.731 * v + 12.9);
  }
  const std::vector<ClassSignature> sigs{signature_of("a", h), signature_of("same", h),
                                         signature_of("int", integer_affine),
                                         signature_of("real", real_affine)};
  const CorrelationMatrix m = correlate(sigs);
  o.require(m.at(0, 1) == 1.0, "identical signatures give " + fmt("%.17g", m.at(0, 1)));
  o.require(m.at(0, 2) == 1.0, "integer affine rescaling gives " + fmt("%.17g", m.at(0, 2)));
  o.require(std::abs(m.at(0, 3) - 1.0) <= 1e-12, "real affine rescaling gives " + fmt("%.17g", m.at(0, 3)));

  // Hand-computed: x = (1, 2, 3), y = (6, 5, 4) -> sxy = -2, sxx = syy = 2, r = -1.
  const double toy = pearson(std::vector<double>{1, 2, 3}, std::vector<double>{6, 5, 4});
  o.require(toy == -1.0, "toy case gives " + fmt("%.17g", toy));
  std::vector<double> down(kSignatureBins), up(kSignatureBins);
  for (int k = 0; k < kSignatureBins; ++k) {
    up[static_cast<std::size_t>(k)] = k;
    down[static_cast<std::size_t>(k)] = 40 - k;
  }
  const std::vector<ClassSignature> pair{signature_of("up", up), signature_of("down", down)};
  o.require(correlate(pair).at(0, 1) == -1.0, "reversed ramp signatures are not exactly -1");
  if (o.pass) o.detail = "identical 1, affine 1, toy -1 exact";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"kurtosis oracle", kurtosis_oracle},
      {"kappa unimodal reduction and affine equivariance", kappa_reduction},
      {"kappa discrimination and bootstrap determinism", kappa_discrimination},
      {"LBP rotation invariance", lbp_rotation},
      {"HOG direction", hog_direction},
      {"Otsu exact", otsu_exact},
      {"segeval exact counting", segeval_exact},
      {"power-law round trip", power_law_round_trip},
      {"grid assignment optimality", grid_optimal},
      {"end-to-end pipeline", end_to_end},
      {"Pearson sanity", pearson_sanity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s  %2zu  %-50s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
