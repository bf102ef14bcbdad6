#include "figkit/lbp.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace figkit {

namespace {

constexpr double kSnap = 1e-12;
// Interpolated samples are compared against the centre with this margin so
// that rounding in the bilinear weights cannot flip a bit.
constexpr double kCompareMargin = 1e-6;

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < kSnap ? r : v;
}

double bilinear(const GrayImage& img, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double tx = x - fx;
  const double ty = y - fy;
  const int x1 = tx > 0.0 ? x0 + 1 : x0;
  const int y1 = ty > 0.0 ? y0 + 1 : y0;
  const double top = (1.0 - tx) * img.at(x0, y0) + tx * img.at(x1, y0);
  const double bottom = (1.0 - tx) * img.at(x0, y1) + tx * img.at(x1, y1);
  return (1.0 - ty) * top + ty * bottom;
}

}  // namespace

CircularSampler::CircularSampler(int points, int radius) : points_(points), radius_(radius) {
  if (radius < 1 || points < 4 || points % 4 != 0 || points > 32) {
    throw Error(ErrorCode::InvalidArgument,
                "circular sampler needs radius >= 1 and 4 <= points <= 32, points % 4 == 0");
  }
  offsets_.resize(static_cast<std::size_t>(points));
  const int quarter = points / 4;
  for (int k = 0; k < quarter; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / points;
    offsets_[k] = {snap(radius * std::cos(angle)), snap(-radius * std::sin(angle))};
  }
  // (dx, dy) -> (dy, -dx) advances the angle by a quarter turn.
  for (int k = quarter; k < points; ++k) {
    const Offset prev = offsets_[k - quarter];
    offsets_[k] = {prev.dy, -prev.dx};
    if (offsets_[k].dx == 0.0) offsets_[k].dx = 0.0;  // drop -0.0
    if (offsets_[k].dy == 0.0) offsets_[k].dy = 0.0;
  }
}

std::uint32_t CircularSampler::code_at(const GrayImage& img, int x, int y) const {
  const double centre = img.at(x, y);
  std::uint32_t code = 0;
  for (int k = 0; k < points_; ++k) {
    const auto& o = offsets_[k];
    const double v = bilinear(img, x + o.dx, y + o.dy);
    if (v > centre + kCompareMargin) code |= (1u << k);
  }
  return code;
}

int popcount(std::uint32_t code) noexcept { return std::popcount(code); }

int circular_transitions(std::uint32_t code, int points) noexcept {
  int transitions = 0;
  for (int k = 0; k < points; ++k) {
    const auto a = (code >> k) & 1u;
    const auto b = (code >> ((k + 1) % points)) & 1u;
    transitions += static_cast<int>(a != b);
  }
  return transitions;
}

std::uint32_t canonical_rotation(std::uint32_t code, int points) noexcept {
  const std::uint32_t mask = points == 32 ? ~0u : ((1u << points) - 1u);
  std::uint32_t best = code & mask;
  std::uint32_t cur = best;
  for (int s = 1; s < points; ++s) {
    cur = ((cur >> 1) | ((cur & 1u) << (points - 1))) & mask;
    if (cur < best) best = cur;
  }
  return best;
}

}  // namespace figkit
