#include "figkit/segeval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "figkit/kappa.hpp"

namespace figkit {

ConfusionMatrix::ConfusionMatrix(const Ontology& ontology)
    : ontology_(&ontology),
      k_(ontology.arity()),
      counts_(static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_), 0) {}

std::uint64_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (!(other.ontology() == ontology())) {
    throw Error(ErrorCode::ShapeMismatch, "cannot add confusion matrices of different ontologies");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix confusion(const ClassMap& pred, const ClassMap& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and ground truth differ in size");
  }
  if (!(pred.ontology() == gt.ontology())) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and ground truth use different ontologies");
  }
  ConfusionMatrix cm(gt.ontology());
  const auto p = pred.data();
  const auto g = gt.data();
  for (std::size_t i = 0; i < p.size(); ++i) cm.add(g[i], p[i]);
  return cm;
}

ClassMetrics metrics(const ConfusionMatrix& cm) {
  const int k = cm.classes();
  const std::uint64_t total = cm.total();
  if (total == 0) throw Error(ErrorCode::EmptySet, "confusion matrix is empty");
  ClassMetrics out;
  out.per_class.resize(static_cast<std::size_t>(k));
  std::uint64_t correct = 0;
  double s_iou = 0, s_acc = 0, s_prec = 0, s_rec = 0;
  int n_def = 0, n_prec = 0, n_rec = 0;
  for (int c = 0; c < k; ++c) {
    out.class_names.push_back(cm.ontology().name(c));
    const std::uint64_t tp = cm.at(c, c);
    std::uint64_t fp = 0, fn = 0;
    for (int o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += cm.at(o, c);
      fn += cm.at(c, o);
    }
    const std::uint64_t tn = total - tp - fp - fn;
    correct += tp;
    ClassScore& s = out.per_class[static_cast<std::size_t>(c)];
    s.defined = tp + fp + fn > 0;
    if (!s.defined) {
      out.has_undefined = true;
      continue;
    }
    s.iou = static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
    s.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
    if (tp + fp > 0) s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    s_iou += s.iou;
    s_acc += s.accuracy;
    ++n_def;
    if (s.precision) {
      s_prec += *s.precision;
      ++n_prec;
    }
    if (s.recall) {
      s_rec += *s.recall;
      ++n_rec;
    }
  }
  out.mean_iou = n_def ? s_iou / n_def : 0.0;
  out.mean_accuracy = n_def ? s_acc / n_def : 0.0;
  out.mean_precision = n_prec ? s_prec / n_prec : 0.0;
  out.mean_recall = n_rec ? s_rec / n_rec : 0.0;
  out.pixel_accuracy = static_cast<double>(correct) / static_cast<double>(total);
  return out;
}

NormalizedConfusion normalize_confusion(const ConfusionMatrix& cm) {
  NormalizedConfusion out;
  const int k = cm.classes();
  out.classes = k;
  out.values.assign(static_cast<std::size_t>(k * k), 0.0);
  out.empty_rows.assign(static_cast<std::size_t>(k), false);
  for (int g = 0; g < k; ++g) {
    std::uint64_t row = 0;
    for (int p = 0; p < k; ++p) row += cm.at(g, p);
    if (row == 0) {
      out.empty_rows[static_cast<std::size_t>(g)] = true;
      continue;
    }
    for (int p = 0; p < k; ++p) {
      out.values[static_cast<std::size_t>(g * k + p)] =
          static_cast<double>(cm.at(g, p)) / static_cast<double>(row);
    }
  }
  return out;
}

ConfusionMatrix pool(std::span<const PatchResult> patches) {
  if (patches.empty()) throw Error(ErrorCode::EmptySet, "no patches to pool");
  ConfusionMatrix total(patches.front().cm.ontology());
  for (const auto& p : patches) total += p.cm;
  return total;
}

BestHalf best_half(std::span<const PatchResult> patches) {
  if (patches.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "best-half analysis needs at least two patches");
  }
  std::vector<double> mious;
  for (const auto& p : patches) mious.push_back(metrics(p.cm).mean_iou);
  const double med = median(mious);

  BestHalf out{med, {}, ConfusionMatrix(patches.front().cm.ontology()), {}, false};
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (mious[i] > med) {
      out.selected.push_back(patches[i].id);
      out.pooled += patches[i].cm;
    }
  }
  if (out.selected.empty()) {
    out.tie_fallback = true;
    for (std::size_t i = 0; i < patches.size(); ++i) {
      if (mious[i] >= med) {
        out.selected.push_back(patches[i].id);
        out.pooled += patches[i].cm;
      }
    }
  }
  out.metrics = metrics(out.pooled);
  return out;
}

FixedExponentFit fit_fixed_exponent(std::span<const double> sizes, std::span<const double> targets,
                                    std::span<const double> weights, double c) {
  // Weighted least squares of y on u = x^-c with intercept.
  long double sw = 0, su = 0, sy = 0, suu = 0, suy = 0;
  std::vector<double> u(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    u[i] = std::pow(sizes[i], -c);
    const long double w = weights[i];
    sw += w;
    su += w * u[i];
    sy += w * targets[i];
    suu += w * u[i] * u[i];
    suy += w * u[i] * targets[i];
  }
  const long double mu = su / sw;
  const long double my = sy / sw;
  const long double var = suu / sw - mu * mu;
  FixedExponentFit f;
  if (var > 0) {
    const long double a = (suy / sw - mu * my) / var;
    f.a = static_cast<double>(a);
    f.b = static_cast<double>(my - a * mu);
  } else {
    f.a = 0.0;
    f.b = static_cast<double>(my);
  }
  long double obj = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const long double r = static_cast<long double>(f.b) + static_cast<long double>(f.a) * u[i] -
                          targets[i];
    obj += weights[i] * r * r;
  }
  f.objective = static_cast<double>(obj);
  return f;
}

double PowerLawFit::operator()(double x) const {
  const double v = b + a * std::pow(x, -c);
  return target == FitTarget::Complement ? 1.0 - v : v;
}

PowerLawFit fit_power_law(std::span<const double> sizes, std::span<const double> scores,
                          const PowerLawOptions& options) {
  if (sizes.size() != scores.size()) {
    throw Error(ErrorCode::InvalidArgument, "sizes and scores differ in length");
  }
  std::vector<double> distinct(sizes.begin(), sizes.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw Error(ErrorCode::InsufficientPoints, "power-law fit needs at least 3 distinct sizes");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0) || !std::isfinite(scores[i])) {
      throw Error(ErrorCode::InvalidArgument, "sizes must be positive and scores finite");
    }
  }
  if (options.grid_points < 2 || !(options.c_max > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid exponent search grid");
  }

  std::vector<double> y(scores.begin(), scores.end());
  if (options.target == FitTarget::Complement) {
    for (double& v : y) v = 1.0 - v;
  }
  std::vector<double> w(sizes.size());
  double wsum = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    w[i] = options.weighting == PowerLawWeighting::LinearInSize ? sizes[i] : 1.0;
    wsum += w[i];
  }
  for (double& v : w) v /= wsum;

  double scale = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) scale += w[i] * y[i] * y[i];
  const double tie = 1e-15 * std::max(scale, 1e-300);

  auto eval = [&](double c) { return fit_fixed_exponent(sizes, y, w, c); };
  const int k = options.grid_points;
  double best_c = options.c_max / k;
  FixedExponentFit best = eval(best_c);
  int best_i = 1;
  for (int i = 2; i <= k; ++i) {
    const double c = options.c_max * i / k;
    const FixedExponentFit f = eval(c);
    // Strict improvement beyond the tie band keeps the smallest c on ties.
    if (f.objective < best.objective - tie) {
      best = f;
      best_c = c;
      best_i = i;
    }
  }

  if (options.refine && best.objective > tie) {
    double lo = options.c_max * std::max(best_i - 1, 0) / k;
    double hi = options.c_max * std::min(best_i + 1, k) / k;
    lo = std::max(lo, 1e-12);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = eval(x1).objective;
    double f2 = eval(x2).objective;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = eval(x1).objective;
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = eval(x2).objective;
      }
    }
    const double c = 0.5 * (lo + hi);
    const FixedExponentFit f = eval(c);
    if (f.objective < best.objective) {
      best = f;
      best_c = c;
    }
  }

  PowerLawFit fit;
  fit.a = best.a;
  fit.b = best.b;
  fit.c = best_c;
  fit.objective = best.objective;
  fit.target = options.target;
  fit.sizes.assign(sizes.begin(), sizes.end());
  fit.scores.assign(scores.begin(), scores.end());
  double ss = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double r = fit.b + fit.a * std::pow(sizes[i], -fit.c) - y[i];
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(sizes.size()));
  return fit;
}

double extrapolate_score(const PowerLawFit& fit, double size) {
  if (!(size > 0.0)) throw Error(ErrorCode::InvalidArgument, "size must be positive");
  return fit(size);
}

double extrapolate_size(const PowerLawFit& fit, double target_score) {
  const double t = fit.target == FitTarget::Complement ? 1.0 - target_score : target_score;
  if (fit.a == 0.0 || !(fit.c > 0.0)) {
    throw Error(ErrorCode::Unreachable, "flat power law cannot be inverted");
  }
  const double ratio = fit.a / (t - fit.b);
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw Error(ErrorCode::Unreachable, "target score is beyond the fitted asymptote");
  }
  return std::pow(ratio, 1.0 / fit.c);
}

}  // namespace figkit
