#include "vtpalm/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vtpalm {

RasterImage difference_image(const RasterImage& a, const RasterImage& b) {
  require(a.same_shape(b), ErrorKind::DimensionMismatch,
          "difference_image: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) + "x" +
              std::to_string(a.channels()) + " vs " + std::to_string(b.width()) + "x" +
              std::to_string(b.height()) + "x" + std::to_string(b.channels()));
  RasterImage out(a.width(), a.height(), 1);
  const std::size_t nc = a.channels();
  const auto da = a.data();
  const auto db = b.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < a.pixel_count(); ++p) {
    float sum = 0.0f;
    for (std::size_t c = 0; c < nc; ++c) sum += std::fabs(da[p * nc + c] - db[p * nc + c]);
    dst[p] = sum / static_cast<float>(nc);
  }
  return out;
}

RasterImage to_grayscale(const RasterImage& img) {
  if (img.channels() == 1) return img;
  RasterImage out(img.width(), img.height(), 1);
  const auto src = img.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    dst[p] = (src[3 * p] + src[3 * p + 1] + src[3 * p + 2]) / 3.0f;
  }
  return out;
}

ScalarField to_field(const RasterImage& gray) {
  require(gray.channels() == 1, ErrorKind::InvalidArgument, "to_field expects a single-channel image");
  return ScalarField(gray.width(), gray.height(), std::vector<double>(gray.data().begin(), gray.data().end()));
}

RasterImage field_to_gray(const ScalarField& field) {
  RasterImage out(field.width(), field.height(), 1);
  if (field.empty()) return out;
  const auto [lo, hi] = std::minmax_element(field.values().begin(), field.values().end());
  const double span = *hi - *lo;
  for (std::size_t i = 0; i < field.size(); ++i) {
    out.data()[i] = span > 0.0 ? static_cast<float>((field[i] - *lo) / span) : 0.0f;
  }
  return out;
}

RasterImage field_to_heat(const ScalarField& field) {
  // Blue (low) through green to red (high).
  const RasterImage gray = field_to_gray(field);
  RasterImage out(field.width(), field.height(), 3);
  for (std::size_t i = 0; i < gray.pixel_count(); ++i) {
    const float t = gray.data()[i];
    out.data()[3 * i + 0] = std::clamp(2.0f * t - 1.0f, 0.0f, 1.0f);
    out.data()[3 * i + 1] = 1.0f - std::fabs(2.0f * t - 1.0f);
    out.data()[3 * i + 2] = std::clamp(1.0f - 2.0f * t, 0.0f, 1.0f);
  }
  return out;
}

}  // namespace vtpalm
