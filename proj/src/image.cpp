#include "figkit/image.hpp"

#include <string>

namespace figkit {

namespace {

void check_dims(int width, int height, std::size_t got, std::size_t per_pixel) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "image dimensions must be positive, got " + std::to_string(width) +
                    "x" + std::to_string(height));
  }
  const std::size_t want =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * per_pixel;
  if (got != want) {
    throw Error(ErrorCode::InvalidArgument,
                "pixel buffer has " + std::to_string(got) + " values, expected " +
                    std::to_string(want));
  }
}

void check_window(int x, int y, int w, int h, int width, int height) {
  if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > width || y + h > height) {
    throw Error(ErrorCode::InvalidArgument, "crop window outside image");
  }
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::UnknownColor: return "UnknownColor";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::MixedOntologies: return "MixedOntologies";
    case ErrorCode::TexelTooSmall: return "TexelTooSmall";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::ZeroVarianceVector: return "ZeroVarianceVector";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  check_dims(width, height, static_cast<std::size_t>(width) * height * 3, 3);
  data_.resize(pixel_count() * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height, data_.size(), 3);
}

RgbImage RgbImage::crop(int x, int y, int w, int h) const {
  check_window(x, y, w, h, width_, height_);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h * 3);
  for (int row = 0; row < h; ++row) {
    const auto* src = data_.data() + index(x, y + row);
    std::copy(src, src + static_cast<std::size_t>(w) * 3,
              out.begin() + static_cast<std::ptrdiff_t>(row) * w * 3);
  }
  return RgbImage(w, h, std::move(out));
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height, static_cast<std::size_t>(width) * height, 1);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height, data_.size(), 1);
}

GrayImage GrayImage::crop(int x, int y, int w, int h) const {
  check_window(x, y, w, h, width_, height_);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h);
  for (int row = 0; row < h; ++row) {
    const auto* src = data_.data() + static_cast<std::size_t>(y + row) * width_ + x;
    std::copy(src, src + w, out.begin() + static_cast<std::ptrdiff_t>(row) * w);
  }
  return GrayImage(w, h, std::move(out));
}

RealPlane::RealPlane(int width, int height, double fill) : width_(width), height_(height) {
  check_dims(width, height, static_cast<std::size_t>(width) * height, 1);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

RealPlane::RealPlane(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height, data_.size(), 1);
}

RealPlane RealPlane::crop(int x, int y, int w, int h) const {
  check_window(x, y, w, h, width_, height_);
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int row = 0; row < h; ++row) {
    const auto* src = data_.data() + static_cast<std::size_t>(y + row) * width_ + x;
    std::copy(src, src + w, out.begin() + static_cast<std::ptrdiff_t>(row) * w);
  }
  return RealPlane(w, h, std::move(out));
}

ChannelPlanes split_channels(const RgbImage& img) {
  ChannelPlanes planes{RealPlane(img.width(), img.height()),
                       RealPlane(img.width(), img.height()),
                       RealPlane(img.width(), img.height())};
  const auto src = img.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) planes[c].data()[i] = src[i * 3 + c];
  }
  return planes;
}

}  // namespace figkit
