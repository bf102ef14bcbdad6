#include "figkit/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "figkit/error.hpp"

namespace figkit {

std::vector<FeatureRange> pooled_ranges(std::span<const FeatureSampleSet> sets) {
  if (sets.empty()) throw Error(ErrorCode::EmptySet, "no sample sets to pool");
  const std::size_t f = sets.front().features;
  std::vector<FeatureRange> out(f);
  std::vector<bool> seen(f, false);
  for (const auto& s : sets) {
    if (s.features != f) {
      throw Error(ErrorCode::InvalidArgument, "sample sets disagree on the feature count");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t k = 0; k < f; ++k) {
        const double v = s.at(i, k);
        if (!seen[k]) {
          out[k] = {v, v};
          seen[k] = true;
        } else {
          out[k].lo = std::min(out[k].lo, v);
          out[k].hi = std::max(out[k].hi, v);
        }
      }
    }
  }
  return out;
}

int bin_index(double x, const FeatureRange& range, int bins) {
  const double span = range.hi - range.lo;
  if (!(span > 0.0)) return 0;
  const int b = static_cast<int>(std::floor(bins * ((x - range.lo) / span)));
  return std::clamp(b, 0, bins - 1);
}

ClassSignature class_signature(const FeatureSampleSet& set, std::span<const FeatureRange> ranges,
                               std::string corpus, std::string class_name, int bins) {
  if (set.size() == 0) {
    throw Error(ErrorCode::EmptyClass, "class '" + class_name + "' of '" + corpus + "' has no texels");
  }
  if (set.size() < 8) {
    throw Error(ErrorCode::TooFewSamples, "class '" + class_name + "' of '" + corpus +
                                              "' has fewer than 8 texels");
  }
  if (ranges.size() != set.features) {
    throw Error(ErrorCode::InvalidArgument, "one bin range per feature is required");
  }
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bins must be >= 1");
  ClassSignature sig;
  sig.corpus = std::move(corpus);
  sig.class_name = std::move(class_name);
  sig.features = set.features;
  sig.bins = bins;
  sig.samples = set.size();
  sig.histograms.assign(set.features * static_cast<std::size_t>(bins), 0.0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t f = 0; f < set.features; ++f) {
      const int b = bin_index(set.at(i, f), ranges[f], bins);
      sig.histograms[f * static_cast<std::size_t>(bins) + static_cast<std::size_t>(b)] += 1.0;
    }
  }
  return sig;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "pearson needs two vectors of equal length >= 2");
  }
  // Raw-sum form in extended precision: exact for integer-valued vectors
  // such as histogram counts.
  long double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double x = a[i];
    const long double y = b[i];
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  const long double n = static_cast<long double>(a.size());
  const long double va = n * saa - sa * sa;
  const long double vb = n * sbb - sb * sb;
  if (!(va > 0) || !(vb > 0)) {
    throw Error(ErrorCode::ZeroVarianceVector, "pearson input has zero variance");
  }
  const long double r = (n * sab - sa * sb) / std::sqrt(va * vb);
  return static_cast<double>(std::clamp(r, -1.0L, 1.0L));
}

double pearson_p_value(double r, std::size_t n) {
  if (n < 3) return 1.0;
  const double df = static_cast<double>(n) - 2.0;
  const double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  const double t2 = df * r2 / (1.0 - r2);
  // P(|T| > t) = I_{df / (df + t^2)}(df / 2, 1 / 2)
  return boost::math::ibeta(df / 2.0, 0.5, df / (df + t2));
}

CorrelationMatrix correlate(std::span<const ClassSignature> signatures) {
  if (signatures.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "correlate needs at least two signatures");
  }
  const auto& first = signatures.front();
  for (const auto& s : signatures) {
    if (s.features != first.features || s.bins != first.bins) {
      throw Error(ErrorCode::ShapeMismatch, "signatures use different histogram shapes");
    }
  }
  CorrelationMatrix m;
  m.size = signatures.size();
  m.r.assign(m.size * m.size, 0.0);
  m.p.assign(m.size * m.size, 0.0);
  for (const auto& s : signatures) m.labels.emplace_back(s.corpus, s.class_name);
  const std::size_t len = first.histograms.size();
  for (std::size_t i = 0; i < m.size; ++i) {
    m.r[i * m.size + i] = pearson(signatures[i].histograms, signatures[i].histograms);
    for (std::size_t j = i + 1; j < m.size; ++j) {
      const double r = pearson(signatures[i].histograms, signatures[j].histograms);
      const double p = pearson_p_value(r, len);
      m.r[i * m.size + j] = m.r[j * m.size + i] = r;
      m.p[i * m.size + j] = m.p[j * m.size + i] = p;
    }
  }
  return m;
}

InterclassMeans mean_interclass(const CorrelationMatrix& m, const std::string& corpus) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.size; ++i) {
    if (m.labels[i].first == corpus) idx.push_back(i);
  }
  if (idx.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "corpus '" + corpus + "' needs at least two classes");
  }
  InterclassMeans out;
  out.corpus = corpus;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < idx.size(); ++b) {
      if (a == b) continue;
      sum += m.at(idx[a], idx[b]);
      if (b > a) {
        total += m.at(idx[a], idx[b]);
        ++pairs;
      }
    }
    out.classes.push_back(m.labels[idx[a]].second);
    out.per_class.push_back(sum / static_cast<double>(idx.size() - 1));
  }
  out.overall = total / static_cast<double>(pairs);
  return out;
}

}  // namespace figkit
