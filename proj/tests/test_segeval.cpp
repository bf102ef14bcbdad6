#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "figkit/error.hpp"
#include "figkit/rng.hpp"
#include "figkit/segeval.hpp"
#include "support.hpp"

using namespace figkit;

namespace {

ClassMap map_of(int w, int h, const Ontology& onto, std::vector<std::uint8_t> v) {
  return ClassMap(w, h, onto, std::move(v));
}

ClassMap random_map(Rng& rng, int w, int h, const Ontology& onto) {
  std::vector<std::uint8_t> v(static_cast<std::size_t>(w * h));
  for (auto& c : v) c = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(onto.arity())));
  return ClassMap(w, h, onto, std::move(v));
}

PatchResult patch_with_miou(const std::string& id, int hits) {
  // Four content pixels, `hits` of them predicted right and the rest as road.
  const Ontology& onto = Ontology::three_class();
  std::vector<std::uint8_t> gt{2, 2, 2, 2}, pred{2, 2, 2, 2};
  for (int i = hits; i < 4; ++i) pred[static_cast<std::size_t>(i)] = 1;
  return {id, confusion(map_of(4, 1, onto, pred), map_of(4, 1, onto, gt))};
}

}  // namespace

TEST_CASE("toy confusion and metrics") {
  const Ontology& onto = Ontology::three_class();
  const ClassMap gt = map_of(2, 2, onto, {0, 0, 1, 1});
  const ClassMap pred = map_of(2, 2, onto, {0, 1, 1, 1});
  const ConfusionMatrix cm = confusion(pred, gt);
  CHECK(cm.at(0, 0) == 1);
  CHECK(cm.at(0, 1) == 1);
  CHECK(cm.at(1, 1) == 2);
  CHECK(cm.total() == 4);

  const ClassMetrics m = metrics(cm);
  CHECK(m.per_class[0].iou == doctest::Approx(0.5));
  CHECK(m.per_class[1].iou == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(m.per_class[2].defined);
  CHECK(m.has_undefined);
  CHECK(m.mean_iou == doctest::Approx(7.0 / 12.0));
  CHECK(m.pixel_accuracy == doctest::Approx(0.75));
  CHECK(*m.per_class[0].precision == 1.0);
  CHECK(*m.per_class[1].precision == doctest::Approx(2.0 / 3.0));

  const NormalizedConfusion n = normalize_confusion(cm);
  CHECK(n.at(0, 0) == 0.5);
  CHECK(n.at(0, 1) == 0.5);
  CHECK(n.at(1, 0) == 0.0);
  CHECK(n.at(1, 1) == 1.0);
  CHECK(n.empty_rows[2]);

  CHECK_THROWS_AS(confusion(map_of(1, 1, onto, {0}), gt), Error);
  CHECK_THROWS_AS(confusion(ClassMap(2, 2, Ontology::five_class()), gt), Error);
}

TEST_CASE("confusion counts match pixel enumeration") {
  Rng rng(41);
  const Ontology& onto = Ontology::five_class();
  for (int trial = 0; trial < 100; ++trial) {
    const ClassMap gt = random_map(rng, 64, 64, onto);
    const ClassMap pred = random_map(rng, 64, 64, onto);
    const ConfusionMatrix cm = confusion(pred, gt);
    std::uint64_t oracle[5][5] = {};
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) ++oracle[gt.at(x, y)][pred.at(x, y)];
    bool same = true;
    for (int g = 0; g < 5; ++g)
      for (int p = 0; p < 5; ++p) same = same && cm.at(g, p) == oracle[g][p];
    CHECK(same);
    CHECK(cm.total() == 64u * 64u);

    const ClassMetrics m = metrics(cm);
    const NormalizedConfusion n = normalize_confusion(cm);
    for (int c = 0; c < 5; ++c) {
      const ClassScore& s = m.per_class[static_cast<std::size_t>(c)];
      REQUIRE(s.recall.has_value());
      CHECK(n.at(c, c) == *s.recall);
      CHECK(s.iou <= *s.precision);
      CHECK(s.iou <= *s.recall);
      double row = 0;
      for (int p = 0; p < 5; ++p) row += n.at(c, p);
      CHECK(row == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("metrics are invariant under a consistent class relabelling") {
  Rng rng(42);
  const Ontology& onto = Ontology::five_class();
  const ClassMap gt = random_map(rng, 32, 32, onto);
  const ClassMap pred = random_map(rng, 32, 32, onto);
  const std::vector<std::uint8_t> perm{3, 0, 4, 1, 2};
  auto relabel = [&](const ClassMap& m) {
    std::vector<std::uint8_t> v(m.data().begin(), m.data().end());
    for (auto& c : v) c = perm[c];
    return ClassMap(m.width(), m.height(), onto, std::move(v));
  };
  const ClassMetrics a = metrics(confusion(pred, gt));
  const ClassMetrics b = metrics(confusion(relabel(pred), relabel(gt)));
  CHECK(a.mean_iou == doctest::Approx(b.mean_iou).epsilon(1e-15));
  CHECK(a.pixel_accuracy == b.pixel_accuracy);
  for (int c = 0; c < 5; ++c) {
    CHECK(a.per_class[static_cast<std::size_t>(c)].iou == b.per_class[perm[static_cast<std::size_t>(c)]].iou);
  }
}

TEST_CASE("perfect prediction scores one") {
  Rng rng(43);
  const ClassMap gt = random_map(rng, 40, 30, Ontology::five_class());
  const ClassMetrics m = metrics(confusion(gt, gt));
  CHECK(m.mean_iou == 1.0);
  CHECK(m.pixel_accuracy == 1.0);
}

TEST_CASE("best half keeps patches strictly above the median") {
  // mIoU is hits / 8 below four hits (road IoU is 0) and 1 at four.
  std::vector<PatchResult> patches{patch_with_miou("a", 1), patch_with_miou("b", 2),
                                   patch_with_miou("c", 3), patch_with_miou("d", 4)};
  std::vector<double> mious;
  for (const auto& p : patches) mious.push_back(metrics(p.cm).mean_iou);
  CHECK(std::is_sorted(mious.begin(), mious.end()));
  const BestHalf bh = best_half(patches);
  CHECK(bh.selected == std::vector<std::string>{"c", "d"});
  CHECK_FALSE(bh.tie_fallback);
  ConfusionMatrix expected = patches[2].cm;
  expected += patches[3].cm;
  CHECK(bh.pooled == expected);

  std::vector<PatchResult> ties{patch_with_miou("x", 4), patch_with_miou("y", 4),
                                patch_with_miou("z", 4)};
  const BestHalf all = best_half(ties);
  CHECK(all.tie_fallback);
  CHECK(all.selected.size() == 3);

  CHECK_THROWS_AS(best_half(std::span<const PatchResult>(patches.data(), 1)), Error);
}

TEST_CASE("power law recovers its generating parameters") {
  std::vector<double> sizes, scores;
  for (double x = 1; x <= 100; x += 3) {
    sizes.push_back(x);
    scores.push_back(1.0 - (0.5 + 2.0 / x) / 3.0);
  }
  // Fit the complement: 1 - score = (0.5 + 2 x^-1) / 3 -> a = 2/3, b = 1/6, c = 1.
  PowerLawOptions opt;
  opt.target = FitTarget::Complement;
  const PowerLawFit f = fit_power_law(sizes, scores, opt);
  CHECK(f.a == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK(f.b == doctest::Approx(1.0 / 6.0).epsilon(1e-4));
  CHECK(f.c == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(f.residual < 1e-8);

  std::vector<double> direct;
  for (double x : sizes) direct.push_back(0.5 + 2.0 * std::pow(x, -1.0));
  const PowerLawFit g = fit_power_law(sizes, direct);
  CHECK(g.a == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(g.b == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(g.c == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(extrapolate_size(g, 0.7) == doctest::Approx(10.0).epsilon(1e-6));
  for (double s : {2.0, 17.0, 250.0}) {
    CHECK(extrapolate_size(g, extrapolate_score(g, s)) == doctest::Approx(s).epsilon(1e-9));
  }
  CHECK_THROWS_AS(extrapolate_size(g, 0.4), Error);
}

TEST_CASE("power law on constant scores") {
  const std::vector<double> sizes{10, 20, 30, 40, 50};
  const std::vector<double> scores(5, 0.7);
  const PowerLawFit f = fit_power_law(sizes, scores);
  CHECK(f.residual < 1e-12);
  CHECK(extrapolate_score(f, 1000.0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, 2}, std::vector<double>{1, 2, 3}), Error);
  try {
    fit_power_law(std::vector<double>{5, 5, 6}, std::vector<double>{1, 2, 3});
    FAIL("expected InsufficientPoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientPoints);
  }
}

TEST_CASE("finer exponent grids never fit worse") {
  Rng rng(44);
  std::vector<double> sizes, scores;
  for (int i = 1; i <= 12; ++i) {
    sizes.push_back(i * 8.0);
    scores.push_back(0.9 - 0.8 * std::pow(i * 8.0, -0.6) + 0.01 * rng.normal());
  }
  PowerLawOptions opt;
  opt.weighting = PowerLawWeighting::Uniform;
  opt.refine = false;
  double prev = 1e300;
  for (int k = 10; k <= 5120; k *= 2) {
    opt.grid_points = k;
    const double r = fit_power_law(sizes, scores, opt).residual;
    CHECK(r <= prev * (1 + 1e-12));
    prev = r;
  }
  opt.refine = true;
  CHECK(fit_power_law(sizes, scores, opt).residual <= prev * (1 + 1e-12));
}
