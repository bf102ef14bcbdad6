#pragma once

#include <cstdint>
#include <vector>

#include "figkit/image.hpp"

namespace figkit {

/// Circular neighbourhood of `points` samples on a circle of `radius` pixels,
/// read by bilinear interpolation. Offsets beyond the first quadrant are
/// produced by exact 90 degree rotation of the first-quadrant offsets, so a
/// texel rotated by a multiple of 90 degrees yields rotated codes
/// bit-for-bit.
class CircularSampler {
 public:
  CircularSampler(int points, int radius);

  int points() const noexcept { return points_; }
  int radius() const noexcept { return radius_; }

  /// Bit k is set when neighbour k is strictly brighter than the centre.
  /// Requires radius <= x < width - radius (same for y).
  std::uint32_t code_at(const GrayImage& img, int x, int y) const;

  struct Offset {
    double dx;
    double dy;
  };
  const std::vector<Offset>& offsets() const noexcept { return offsets_; }

 private:
  int points_;
  int radius_;
  std::vector<Offset> offsets_;
};

int popcount(std::uint32_t code) noexcept;

/// Number of 0/1 transitions around the circular bit string of length
/// `points`.
int circular_transitions(std::uint32_t code, int points) noexcept;

/// Rotation of `code` that places the longest run of zeros at the start of
/// the radial sequence (minimum value over all circular shifts).
std::uint32_t canonical_rotation(std::uint32_t code, int points) noexcept;

}  // namespace figkit
