#include <algorithm>
#include <cmath>
#include <limits>

#include "figkit/analysis.hpp"
#include "figkit/error.hpp"
#include "figkit/rng.hpp"

namespace figkit {

namespace {

/// Row-conditional affinities with a per-row precision found by bisection
/// so that each row's entropy matches log(perplexity). Row i sees `weight[j]`
/// copies of point j (one fewer of itself); `p` holds the per-copy value.
std::vector<double> conditional_affinities(const std::vector<double>& dist2,
                                           const std::vector<double>& weight, double perplexity) {
  const std::size_t n = weight.size();
  std::vector<double> p(n * n, 0.0);
  const double target = std::log(perplexity);
  for (std::size_t i = 0; i < n; ++i) {
    double beta = 1.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double* row = p.data() + i * n;
    const double* d = dist2.data() + i * n;
    for (int iter = 0; iter < 200; ++iter) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = std::exp(-beta * d[j]);
        sum += (j == i ? weight[j] - 1.0 : weight[j]) * row[j];
      }
      if (sum <= std::numeric_limits<double>::min()) sum = std::numeric_limits<double>::min();
      double h = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        h += (j == i ? weight[j] - 1.0 : weight[j]) * beta * d[j] * row[j];
      }
      h = h / sum + std::log(sum);
      for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
      const double diff = h - target;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = std::isinf(lo) ? beta / 2.0 : 0.5 * (beta + lo);
      }
    }
  }
  return p;
}

}  // namespace

Embedding2D tsne_project(std::span<const double> data, std::size_t n, std::size_t dims,
                         const TsneOptions& options) {
  if (dims == 0 || data.size() != n * dims) {
    throw Error(ErrorCode::InvalidArgument, "t-SNE input is not an n x dims matrix");
  }
  if (!(options.perplexity > 0.0) || static_cast<double>(n) <= 3.0 * options.perplexity) {
    throw Error(ErrorCode::TooFewSamples, "t-SNE needs more than 3 * perplexity samples (" +
                                              std::to_string(n) + " given)");
  }
  if (options.iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1");
  for (double v : data) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "t-SNE input must be finite");
  }

  // Center and scale to unit max-abs so the bandwidth search starts sane.
  std::vector<double> x(data.begin(), data.end());
  for (std::size_t d = 0; d < dims; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i * dims + d];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) x[i * dims + d] -= mean;
  }
  double max_abs = 0.0;
  for (double v : x) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs > 0.0) {
    for (double& v : x) v /= max_abs;
  }

  // Bit-identical rows are optimized as one weighted point so that they
  // land on exactly the same spot.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto row_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(data.begin() + a * dims, data.begin() + (a + 1) * dims,
                                        data.begin() + b * dims, data.begin() + (b + 1) * dims);
  };
  std::stable_sort(order.begin(), order.end(), row_less);
  std::vector<std::size_t> group(n);
  std::vector<std::size_t> first_of(n, n);
  std::vector<std::size_t> reps;
  // Number groups by their first member in input order.
  std::vector<std::size_t> sorted_group(n);
  {
    std::size_t g = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == 0 || row_less(order[k - 1], order[k])) ++g;
      sorted_group[order[k]] = g - 1;
    }
  }
  std::vector<double> weight;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = sorted_group[i];
    if (first_of[g] == n) {
      first_of[g] = reps.size();
      reps.push_back(i);
      weight.push_back(0.0);
    }
    group[i] = first_of[g];
    weight[group[i]] += 1.0;
  }
  const std::size_t u = reps.size();

  std::vector<double> dist2(u * u, 0.0);
  for (std::size_t i = 0; i < u; ++i) {
    for (std::size_t j = i + 1; j < u; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        const double diff = x[reps[i] * dims + d] - x[reps[j] * dims + d];
        s += diff * diff;
      }
      dist2[i * u + j] = dist2[j * u + i] = s;
    }
  }

  // Joint affinities per pair of copies; pair_count[i][j] copies share them.
  auto p = conditional_affinities(dist2, weight, options.perplexity);
  auto pair_count = [&](std::size_t i, std::size_t j) {
    return i == j ? weight[i] * (weight[i] - 1.0) : weight[i] * weight[j];
  };
  {
    double total = 0.0;
    for (std::size_t i = 0; i < u; ++i) {
      total += pair_count(i, i) * 2.0 * p[i * u + i];
      p[i * u + i] *= 2.0;
      for (std::size_t j = i + 1; j < u; ++j) {
        const double s = p[i * u + j] + p[j * u + i];
        p[i * u + j] = p[j * u + i] = s;
        total += 2.0 * pair_count(i, j) * s;
      }
    }
    for (double& v : p) v = std::max(v / total, 1e-12);
  }
  double self_pairs = 0.0;
  for (std::size_t i = 0; i < u; ++i) self_pairs += pair_count(i, i);

  Embedding2D emb;
  emb.n = n;
  emb.perplexity = options.perplexity;
  emb.seed = options.seed;
  emb.iterations = options.iterations;
  std::vector<double> y(2 * u);
  Rng rng(derive_seed(options.seed, "tsne-init"));
  for (double& v : y) v = 1e-4 * rng.normal();

  std::vector<double> update(2 * u, 0.0);
  std::vector<double> gains(2 * u, 1.0);
  std::vector<double> grad(2 * u, 0.0);
  std::vector<double> num(u * u, 0.0);

  for (int iter = 0; iter < options.iterations && u > 1; ++iter) {
    const bool early = iter < options.exaggeration_iterations;
    const double exaggeration = early ? options.early_exaggeration : 1.0;
    const double momentum = early ? options.initial_momentum : options.final_momentum;

    // Coincident copies contribute a kernel value of 1 each.
    double qsum = self_pairs;
    for (std::size_t i = 0; i < u; ++i) {
      for (std::size_t j = i + 1; j < u; ++j) {
        const double dx = y[2 * i] - y[2 * j];
        const double dy = y[2 * i + 1] - y[2 * j + 1];
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * u + j] = num[j * u + i] = q;
        qsum += 2.0 * pair_count(i, j) * q;
      }
    }
    // Gradient seen by one copy of point i.
    for (std::size_t i = 0; i < u; ++i) {
      double gx = 0.0;
      double gy = 0.0;
      for (std::size_t j = 0; j < u; ++j) {
        if (j == i) continue;
        const double q = num[i * u + j];
        const double mult = weight[j] * (exaggeration * p[i * u + j] - q / qsum) * q;
        gx += mult * (y[2 * i] - y[2 * j]);
        gy += mult * (y[2 * i + 1] - y[2 * j + 1]);
      }
      grad[2 * i] = 4.0 * gx;
      grad[2 * i + 1] = 4.0 * gy;
    }
    for (std::size_t k = 0; k < 2 * u; ++k) {
      const bool same_sign = (grad[k] > 0.0) == (update[k] > 0.0);
      gains[k] = same_sign ? gains[k] * 0.8 : gains[k] + 0.2;
      gains[k] = std::max(gains[k], 0.01);
      update[k] = momentum * update[k] - options.learning_rate * gains[k] * grad[k];
      y[k] += update[k];
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < u; ++i) {
      mx += weight[i] * y[2 * i];
      my += weight[i] * y[2 * i + 1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < u; ++i) {
      y[2 * i] -= mx;
      y[2 * i + 1] -= my;
    }
  }
  if (u == 1) std::fill(y.begin(), y.end(), 0.0);
  for (double v : y) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "t-SNE diverged");
  }
  emb.coords.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    emb.coords[2 * i] = y[2 * group[i]];
    emb.coords[2 * i + 1] = y[2 * group[i] + 1];
  }
  return emb;
}

}  // namespace figkit
