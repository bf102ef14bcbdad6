#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "figkit/error.hpp"
#include "figkit/analysis.hpp"
#include "figkit/rng.hpp"

using namespace figkit;

namespace {

// Minimum total cost over every injective placement of n points into the
// grid cells, by exhaustive recursion.
double brute_force_layout(const std::vector<double>& pts, int rows, int cols) {
  const int n = static_cast<int>(pts.size() / 2);
  const int cells = rows * cols;
  std::vector<bool> used(static_cast<std::size_t>(cells), false);
  double best = 1e300;
  std::function<void(int, double)> rec = [&](int i, double acc) {
    if (acc >= best) return;
    if (i == n) {
      best = acc;
      return;
    }
    for (int c = 0; c < cells; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const double cx = (c % cols + 0.5) / cols, cy = (c / cols + 0.5) / rows;
      const double dx = pts[2 * i] - cx, dy = pts[2 * i + 1] - cy;
      used[static_cast<std::size_t>(c)] = true;
      rec(i + 1, acc + dx * dx + dy * dy);
      used[static_cast<std::size_t>(c)] = false;
    }
  };
  rec(0, 0.0);
  return best;
}

Embedding2D random_embedding(Rng& rng, std::size_t n) {
  Embedding2D e;
  e.n = n;
  e.coords.resize(2 * n);
  for (auto& c : e.coords) c = rng.uniform(-5, 5);
  return e;
}

FeatureSampleSet set_of(std::size_t features, std::vector<double> samples) {
  FeatureSampleSet s;
  s.features = features;
  s.samples = std::move(samples);
  return s;
}

}  // namespace

TEST_CASE("class signatures match manual binning") {
  // Two features, ten texels; pooled range of feature 0 is [0, 32].
  std::vector<double> a, b;
  for (int i = 0; i < 10; ++i) {
    a.push_back(i * 3.0);
    a.push_back(1.0);
  }
  for (int i = 0; i < 8; ++i) {
    b.push_back(32.0);
    b.push_back(i % 2 ? 1.0 : 3.0);
  }
  const std::vector<FeatureSampleSet> sets{set_of(2, a), set_of(2, b)};
  const auto ranges = pooled_ranges(sets);
  CHECK(ranges[0].lo == 0.0);
  CHECK(ranges[0].hi == 32.0);
  CHECK(ranges[1].lo == 1.0);
  CHECK(ranges[1].hi == 3.0);

  const ClassSignature sa = class_signature(sets[0], ranges, "c", "a");
  const ClassSignature sb = class_signature(sets[1], ranges, "c", "b");
  // Feature 0 of `a`: values 0,3,...,27 fall in bins 0,3,...,27.
  for (int i = 0; i < 10; ++i) CHECK(sa.count(0, i * 3) == 1.0);
  CHECK(sa.count(1, 0) == 10.0);
  CHECK(sb.count(0, 31) == 8.0);
  CHECK(sb.count(1, 0) == 4.0);
  CHECK(sb.count(1, 31) == 4.0);
  for (std::size_t f = 0; f < 2; ++f) {
    double row = 0;
    for (int k = 0; k < 32; ++k) row += sa.count(f, k);
    CHECK(row == 10.0);
  }
  // Pooled ranges make bins comparable: the same value maps to the same bin.
  CHECK(bin_index(3.0, ranges[0], 32) == 3);

  std::vector<double> same;
  for (int i = 0; i < 9; ++i) {
    same.push_back(4.0);
    same.push_back(2.0);
  }
  const ClassSignature spike = class_signature(set_of(2, same), ranges, "c", "s");
  CHECK(spike.count(0, 4) == 9.0);
  CHECK(spike.count(1, 16) == 9.0);

  CHECK_THROWS_AS(class_signature(set_of(2, {}), ranges, "c", "e"), Error);
  CHECK_THROWS_AS(class_signature(set_of(2, {1, 2, 3, 4}), ranges, "c", "e"), Error);
}

TEST_CASE("pearson toy cases") {
  const std::vector<double> v{1, 5, 2, 8, 3, 0, 4};
  std::vector<double> w;
  for (double x : v) w.push_back(2 * x + 3);
  CHECK(pearson(v, v) == 1.0);
  CHECK(pearson(v, w) == 1.0);
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{6, 5, 4}) == -1.0);

  std::vector<double> scaled;
  for (double x : v) scaled.push_back(0.37 * x + 1.1);
  CHECK(std::abs(pearson(v, scaled) - 1.0) < 1e-12);

  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);

  // Direct two-pass formula on a random pair.
  Rng rng(3);
  std::vector<double> x(50), y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    x[i] = rng.uniform();
    y[i] = x[i] + rng.normal();
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / 50;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / 50;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  CHECK(pearson(x, y) == doctest::Approx(sxy / std::sqrt(sxx * syy)).epsilon(1e-12));
}

TEST_CASE("pearson p-values match the t distribution") {
  // Two-sided p-values from the Student t survival function.
  CHECK(pearson_p_value(0.5, 10) == doctest::Approx(0.14111328125).epsilon(1e-10));
  CHECK(pearson_p_value(0.9, 5) == doctest::Approx(0.03738607346849863).epsilon(1e-10));
  CHECK(pearson_p_value(-0.3, 100) == doctest::Approx(0.0024257334625830316).epsilon(1e-10));
  CHECK(pearson_p_value(0.05, 1000) == doctest::Approx(0.11407259555107294).epsilon(1e-10));
  CHECK(pearson_p_value(1.0, 10) == 0.0);
}

TEST_CASE("correlation matrices are symmetric with a unit diagonal") {
  Rng rng(5);
  std::vector<ClassSignature> sigs;
  for (int s = 0; s < 5; ++s) {
    ClassSignature sig;
    sig.corpus = s < 3 ? "world" : "paris";
    sig.class_name = "c" + std::to_string(s);
    sig.features = 3;
    sig.histograms.resize(3 * 32);
    for (auto& h : sig.histograms) h = static_cast<double>(rng.below(20));
    sigs.push_back(sig);
  }
  const CorrelationMatrix m = correlate(sigs);
  REQUIRE(m.size == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(m.at(i, i) == 1.0);
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(m.at(i, j) == m.at(j, i));
      CHECK(std::abs(m.at(i, j)) <= 1.0 + 1e-12);
      CHECK(m.p_at(i, j) == m.p_at(j, i));
    }
  }
  ClassSignature odd = sigs[0];
  odd.features = 2;
  odd.histograms.resize(64);
  sigs.push_back(odd);
  CHECK_THROWS_AS(correlate(sigs), Error);
}

TEST_CASE("mean inter-class correlation") {
  CorrelationMatrix m;
  m.size = 3;
  m.labels = {{"w", "a"}, {"w", "b"}, {"w", "c"}};
  m.r = {1, 0.9, 0.8, 0.9, 1, 0.7, 0.8, 0.7, 1};
  m.p.assign(9, 0.0);
  const auto im = mean_interclass(m, "w");
  CHECK(im.overall == doctest::Approx(0.8));
  CHECK(im.per_class[0] == doctest::Approx(0.85));
  CHECK(im.per_class[1] == doctest::Approx(0.8));
  CHECK(im.per_class[2] == doctest::Approx(0.75));

  CorrelationMatrix two;
  two.size = 2;
  two.labels = {{"p", "a"}, {"p", "b"}};
  two.r = {1, 0.8, 0.8, 1};
  two.p.assign(4, 0.0);
  const auto i2 = mean_interclass(two, "p");
  CHECK(i2.per_class == std::vector<double>{0.8, 0.8});
  CHECK(i2.overall == doctest::Approx(0.8));
  CHECK_THROWS_AS(mean_interclass(two, "nowhere"), Error);
}

TEST_CASE("grid shape") {
  CHECK(grid_shape(1) == std::pair<int, int>{1, 1});
  CHECK(grid_shape(4) == std::pair<int, int>{2, 2});
  CHECK(grid_shape(5) == std::pair<int, int>{2, 3});
  CHECK(grid_shape(7) == std::pair<int, int>{3, 3});
  for (std::size_t n = 1; n < 3000; n += 7) {
    const auto [rows, cols] = grid_shape(n);
    CHECK(static_cast<std::size_t>(rows * cols) >= n);
    CHECK(static_cast<std::size_t>(rows * cols) - n < static_cast<std::size_t>(cols));
  }
}

TEST_CASE("grid assignment is bijective and optimal against exhaustive search") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const Embedding2D e = random_embedding(rng, n);
    const GridLayout layout = grid_assign(e);
    std::set<std::pair<int, int>> cells(layout.cells.begin(), layout.cells.end());
    CHECK(cells.size() == n);
    for (const auto& [r, c] : layout.cells) {
      CHECK(r >= 0);
      CHECK(r < layout.rows);
      CHECK(c >= 0);
      CHECK(c < layout.cols);
    }
    const double oracle = brute_force_layout(normalized_coords(e), layout.rows, layout.cols);
    CHECK(layout_cost(e, layout) == doctest::Approx(oracle).epsilon(1e-12));
  }
  Embedding2D one;
  one.n = 1;
  one.coords = {3.0, 4.0};
  const GridLayout single = grid_assign(one);
  CHECK(single.cells == std::vector<std::pair<int, int>>{{0, 0}});
}

TEST_CASE("assignment solver on a rectangular matrix") {
  // 2 rows, 3 columns; optimum picks (0->2, 1->0) at cost 1 + 2.
  const std::vector<double> cost{5, 9, 1, 2, 8, 7};
  CHECK(solve_assignment(cost, 2, 3) == std::vector<int>{2, 0});
}

TEST_CASE("t-SNE separates clusters and is deterministic") {
  Rng rng(7);
  const std::size_t per = 100, dims = 5;
  std::vector<double> data;
  std::vector<int> label;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < per; ++i) {
      for (std::size_t d = 0; d < dims; ++d) data.push_back((d == static_cast<std::size_t>(c) ? 10.0 : 0.0) + rng.normal());
      label.push_back(c);
    }
  TsneOptions opt;
  opt.seed = 3;
  opt.iterations = 500;
  const Embedding2D e = tsne_project(data, 3 * per, dims, opt);
  const Embedding2D again = tsne_project(data, 3 * per, dims, opt);
  CHECK(e.coords == again.coords);
  for (double c : e.coords) CHECK(std::isfinite(c));

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < e.n; ++i) {
    mx += e.x(i);
    my += e.y(i);
  }
  CHECK(std::abs(mx / e.n) < 1e-6);
  CHECK(std::abs(my / e.n) < 1e-6);

  // Purity of the 15 nearest neighbours in the embedding.
  std::size_t agree = 0;
  for (std::size_t i = 0; i < e.n; ++i) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t j = 0; j < e.n; ++j) {
      if (j == i) continue;
      d.emplace_back(std::hypot(e.x(i) - e.x(j), e.y(i) - e.y(j)), j);
    }
    std::partial_sort(d.begin(), d.begin() + 15, d.end());
    for (int k = 0; k < 15; ++k) agree += label[d[k].second] == label[i];
  }
  CHECK(static_cast<double>(agree) / (15.0 * e.n) >= 0.9);

  CHECK_THROWS_AS(tsne_project(std::vector<double>(90 * 2, 1.0), 90, 2, TsneOptions{}), Error);
}

TEST_CASE("t-SNE keeps duplicated rows together") {
  Rng rng(8);
  const std::size_t n = 120, dims = 4;
  std::vector<double> data(n * dims);
  for (auto& v : data) v = rng.normal();
  std::copy(data.begin(), data.begin() + dims, data.begin() + dims * 60);  // row 60 = row 0
  TsneOptions opt;
  opt.iterations = 400;
  const Embedding2D e = tsne_project(data, n, dims, opt);
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    lo_x = std::min(lo_x, e.x(i));
    hi_x = std::max(hi_x, e.x(i));
    lo_y = std::min(lo_y, e.y(i));
    hi_y = std::max(hi_y, e.y(i));
  }
  const double diameter = std::hypot(hi_x - lo_x, hi_y - lo_y);
  CHECK(std::hypot(e.x(0) - e.x(60), e.y(0) - e.y(60)) <= 1e-3 * diameter);
}

TEST_CASE("signature rows sum to the sample count") {
  Rng rng(11);
  std::vector<double> a(100 * 29), b(60 * 29);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.uniform(-4, 4);
  const std::vector<FeatureSampleSet> sets{set_of(29, a), set_of(29, b)};
  const auto ranges = pooled_ranges(sets);
  const ClassSignature sig = class_signature(sets[0], ranges, "w", "a");
  for (std::size_t f = 0; f < 29; ++f) {
    double row = 0;
    for (int k = 0; k < kSignatureBins; ++k) row += sig.count(f, k);
    CHECK(row == 100.0);
  }
}

TEST_CASE("t-SNE with heavy duplication") {
  Rng rng(9);
  const std::size_t n = 150, dims = 3;
  std::vector<double> data(n * dims);
  for (auto& v : data) v = rng.normal();
  // Rows 0..74 repeat one of three prototypes.
  for (std::size_t i = 0; i < 75; ++i) {
    const std::size_t proto = 75 + i % 3;
    std::copy(data.begin() + proto * dims, data.begin() + (proto + 1) * dims, data.begin() + i * dims);
  }
  TsneOptions opt;
  opt.iterations = 300;
  const Embedding2D e = tsne_project(data, n, dims, opt);
  for (std::size_t i = 0; i < 75; ++i) {
    CHECK(e.x(i) == e.x(75 + i % 3));
    CHECK(e.y(i) == e.y(75 + i % 3));
  }
  double mx = 0;
  for (std::size_t i = 0; i < n; ++i) mx += e.x(i);
  CHECK(std::abs(mx / n) < 1e-9);

  const Embedding2D same = tsne_project(std::vector<double>(n * dims, 2.0), n, dims, opt);
  CHECK(std::all_of(same.coords.begin(), same.coords.end(), [](double v) { return v == 0.0; }));
}
