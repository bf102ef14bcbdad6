#include "figkit/kappa.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "figkit/error.hpp"
#include "figkit/parallel.hpp"
#include "figkit/rng.hpp"

namespace figkit {

Histogram32 histogram32(std::span<const double> values) {
  Histogram32 h;
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double span = hi - lo;
  for (int i = 0; i <= kKappaBins; ++i) h.edges[i] = lo + span * i / kKappaBins;
  h.edges[kKappaBins] = hi;
  for (double x : values) {
    int b = span > 0.0 ? static_cast<int>(std::floor(kKappaBins * ((x - lo) / span))) : 0;
    b = std::clamp(b, 0, kKappaBins - 1);
    h.counts[b] += 1.0;
  }
  return h;
}

std::vector<double> savgol_smooth(std::span<const double> counts, int window, int degree) {
  const int n = static_cast<int>(counts.size());
  if (window < 1 || window % 2 == 0 || window > n || degree < 0 || degree >= window) {
    throw Error(ErrorCode::InvalidArgument,
                "Savitzky-Golay needs an odd window <= length and degree < window");
  }
  const int half = window / 2;
  const int terms = degree + 1;

  // Normal equations (A^T A) c = e0 for the fit evaluated at the centre.
  std::vector<double> ata(static_cast<std::size_t>(terms * terms), 0.0);
  for (int j = -half; j <= half; ++j) {
    for (int r = 0; r < terms; ++r) {
      for (int c = 0; c < terms; ++c) ata[r * terms + c] += std::pow(j, r + c);
    }
  }
  std::vector<double> rhs(static_cast<std::size_t>(terms), 0.0);
  rhs[0] = 1.0;
  for (int col = 0; col < terms; ++col) {
    int pivot = col;
    for (int r = col + 1; r < terms; ++r) {
      if (std::abs(ata[r * terms + col]) > std::abs(ata[pivot * terms + col])) pivot = r;
    }
    for (int c = 0; c < terms; ++c) std::swap(ata[col * terms + c], ata[pivot * terms + c]);
    std::swap(rhs[col], rhs[pivot]);
    for (int r = 0; r < terms; ++r) {
      if (r == col) continue;
      const double f = ata[r * terms + col] / ata[col * terms + col];
      for (int c = col; c < terms; ++c) ata[r * terms + c] -= f * ata[col * terms + c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> coeff(static_cast<std::size_t>(window), 0.0);
  for (int j = -half; j <= half; ++j) {
    double c = 0.0;
    for (int k = 0; k < terms; ++k) c += rhs[k] / ata[k * terms + k] * std::pow(j, k);
    coeff[j + half] = c;
  }

  auto mirror = [n](int i) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
    return i;
  };
  // Smoothing coefficients are symmetric, so neighbours are summed in pairs:
  // the result is then bit-identical for the reversed sequence, which keeps
  // mode splitting exactly mirror-equivariant.
  std::vector<double> out(counts.size());
  for (int i = 0; i < n; ++i) {
    double acc = coeff[half] * counts[i];
    for (int j = 1; j <= half; ++j) {
      acc += coeff[half + j] * (counts[mirror(i + j)] + counts[mirror(i - j)]);
    }
    out[i] = acc;
  }
  return out;
}

std::vector<std::pair<int, int>> find_minima(std::span<const double> smoothed) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(smoothed.size());
  int i = 1;
  while (i < n - 1) {
    if (!(smoothed[i] < smoothed[i - 1])) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && smoothed[j + 1] == smoothed[i]) ++j;
    if (j + 1 < n && smoothed[j + 1] > smoothed[i]) out.emplace_back(i, j);
    i = j + 1;
  }
  return out;
}

ModeSplit split_modes(std::span<const double> values) {
  ModeSplit split;
  split.histogram = histogram32(values);
  const auto smoothed = savgol_smooth(split.histogram.counts, 3, 1);
  std::copy(smoothed.begin(), smoothed.end(), split.smoothed.begin());
  for (const auto& [first, last] : find_minima(split.smoothed)) {
    split.minima.push_back(first);
    split.splits.push_back(0.5 * (split.histogram.edges[first] + split.histogram.edges[last + 1]));
  }
  return split;
}

double kurtosis(std::span<const double> values) {
  if (values.size() < kMinModePopulation) return kSpikeCap;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double m2 = 0.0;
  for (double v : values) m2 += (v - mean) * (v - mean);
  const double sigma = std::sqrt(m2 / n);
  if (!(sigma >= kZeroSigma)) return kSpikeCap;
  double m4 = 0.0;
  for (double v : values) {
    const double z = (v - mean) / sigma;
    m4 += (z * z) * (z * z);
  }
  return m4 / n;
}

KappaResult kappa_detail(std::span<const double> values) {
  if (values.size() < 8) {
    throw Error(ErrorCode::TooFewSamples, "kappa needs at least 8 values, got " +
                                              std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "kappa input is not finite");
  }
  KappaResult r;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    r.kappa = kSpikeCap;
    r.degenerate = true;
    r.mode_sizes = {values.size()};
    r.mode_kurtosis = {kSpikeCap};
    return r;
  }

  const ModeSplit split = split_modes(values);
  if (split.splits.empty()) {
    r.kappa = kurtosis(values);
    r.mode_sizes = {values.size()};
    r.mode_kurtosis = {r.kappa};
    return r;
  }

  std::vector<std::vector<double>> modes(split.splits.size() + 1);
  for (double x : values) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(split.splits.begin(), split.splits.end(), x) - split.splits.begin());
    modes[idx].push_back(x);
  }
  const double n = static_cast<double>(values.size());
  for (const auto& m : modes) {
    if (m.empty()) continue;
    const double k = kurtosis(m);
    r.mode_sizes.push_back(m.size());
    r.mode_kurtosis.push_back(k);
    r.kappa += static_cast<double>(m.size()) / n * k;
  }
  return r;
}

double kappa(std::span<const double> values) { return kappa_detail(values).kappa; }

std::vector<double> FeatureSampleSet::column(std::size_t f) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, f);
  return out;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::EmptySet, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

std::pair<double, double> mean_median_kappa(const KappaReport& report) {
  std::vector<double> medians;
  for (const auto& f : report.features) medians.push_back(f.kappa_median);
  if (medians.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(medians.begin(), medians.end(), 0.0) /
                      static_cast<double>(medians.size());
  return {mean, median(std::move(medians))};
}

namespace {

void validate_sets(std::span<const FeatureSampleSet> sets, const BootstrapOptions& options) {
  if (sets.empty()) throw Error(ErrorCode::EmptySet, "bootstrap needs at least one sample set");
  if (options.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  const std::size_t f = sets.front().features;
  for (const auto& s : sets) {
    if (s.features == 0 || s.samples.size() % s.features != 0) {
      throw Error(ErrorCode::InvalidArgument, "set '" + s.name + "' has a ragged sample matrix");
    }
    if (s.features != f) {
      throw Error(ErrorCode::InvalidArgument, "set '" + s.name + "' has a different feature count");
    }
    if (s.size() == 0) throw Error(ErrorCode::EmptySet, "set '" + s.name + "' is empty");
    if (s.size() < 8) {
      throw Error(ErrorCode::TooFewSamples,
                  "set '" + s.name + "' has " + std::to_string(s.size()) + " samples, need 8");
    }
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
      if (!std::isfinite(s.samples[i])) {
        throw Error(ErrorCode::InvalidArgument, "set '" + s.name + "' feature " +
                                                    std::to_string(i % f) + " has a non-finite value");
      }
    }
  }
  if (!options.feature_names.empty() && options.feature_names.size() != f) {
    throw Error(ErrorCode::InvalidArgument, "feature_names does not match the feature count");
  }
}

/// Sorted row indices of a without-replacement subsample.
std::vector<std::size_t> subsample(std::size_t population, std::size_t size, Rng& rng) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(size);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<KappaReport> run_bootstrap(std::span<const FeatureSampleSet> sets,
                                       const BootstrapOptions& options, bool parallel) {
  validate_sets(sets, options);
  const std::size_t n_sets = sets.size();
  const std::size_t n_feat = sets.front().features;
  const std::size_t trials = options.trials;
  std::size_t m = sets.front().size();
  for (const auto& s : sets) m = std::min(m, s.size());

  // Sets already at the downsample size give the same κ on every trial.
  std::vector<std::vector<double>> fixed(n_sets);
  for (std::size_t s = 0; s < n_sets; ++s) {
    if (sets[s].size() != m) continue;
    fixed[s].resize(n_feat);
    for (std::size_t f = 0; f < n_feat; ++f) fixed[s][f] = kappa(sets[s].column(f));
  }

  // trial_kappa[(t * n_sets + s) * n_feat + f]
  std::vector<double> trial_kappa(trials * n_sets * n_feat, 0.0);
  auto run_trial = [&](std::size_t t) {
    std::vector<double> column(m);
    for (std::size_t s = 0; s < n_sets; ++s) {
      double* out = trial_kappa.data() + (t * n_sets + s) * n_feat;
      if (!fixed[s].empty()) {
        std::copy(fixed[s].begin(), fixed[s].end(), out);
        continue;
      }
      Rng rng(derive_seed(options.seed, t, s));
      const auto rows = subsample(sets[s].size(), m, rng);
      for (std::size_t f = 0; f < n_feat; ++f) {
        for (std::size_t i = 0; i < m; ++i) column[i] = sets[s].at(rows[i], f);
        out[f] = kappa(column);
      }
    }
  };

  if (parallel) {
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_count())
    for (std::ptrdiff_t t = 0; t < n; ++t) {
      try {
        run_trial(static_cast<std::size_t>(t));
      } catch (...) {
#pragma omp critical(figkit_bootstrap_error)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::size_t t = 0; t < trials; ++t) run_trial(t);
  }

  std::vector<KappaReport> reports;
  for (std::size_t s = 0; s < n_sets; ++s) {
    KappaReport rep;
    rep.set = sets[s].name;
    rep.seed = options.seed;
    rep.trials = trials;
    rep.downsample_size = m;
    std::vector<double> per_trial(trials);
    for (std::size_t f = 0; f < n_feat; ++f) {
      FeatureKappa fk;
      if (options.feature_names.empty()) {
        fk.name = (f < 10 ? "f0" : "f") + std::to_string(f);
      } else {
        fk.name = options.feature_names[f];
      }
      const auto direct = kappa_detail(sets[s].column(f));
      fk.kappa = direct.kappa;
      fk.degenerate = direct.degenerate;
      for (std::size_t t = 0; t < trials; ++t) {
        per_trial[t] = trial_kappa[(t * n_sets + s) * n_feat + f];
      }
      fk.kappa_median = median(per_trial);
      const double lo = quantile(per_trial, 0.025);
      const double hi = quantile(per_trial, 0.975);
      fk.ci95_halfwidth_pct = fk.kappa_median > 0.0 ? 100.0 * (hi - lo) / (2.0 * fk.kappa_median) : 0.0;
      rep.features.push_back(std::move(fk));
    }
    std::tie(rep.mean_kappa, rep.median_kappa) = mean_median_kappa(rep);
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace

std::vector<KappaReport> bootstrap_kappa(std::span<const FeatureSampleSet> sets,
                                         const BootstrapOptions& options) {
  return run_bootstrap(sets, options, true);
}

std::vector<KappaReport> bootstrap_kappa_serial(std::span<const FeatureSampleSet> sets,
                                                const BootstrapOptions& options) {
  return run_bootstrap(sets, options, false);
}

}  // namespace figkit
