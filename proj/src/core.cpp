#include "ltmu/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ltmu {

bool BoundingBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) &&
         w >= 0.0 && h >= 0.0;
}

std::vector<double> CueVector::flatten(bool include_response) const {
  std::vector<double> out;
  out.reserve(include_response ? kDim : kDimNoResponse);
  out.push_back(confidence);
  if (include_response) out.insert(out.end(), response_embed.begin(), response_embed.end());
  out.push_back(appearance);
  out.insert(out.end(), box_norm.begin(), box_norm.end());
  return out;
}

CueVector CueVector::from_flat(const std::vector<double>& v) {
  CueVector c;
  if (v.size() == kDim) {
    c.confidence = v[0];
    std::copy(v.begin() + 1, v.begin() + 9, c.response_embed.begin());
    c.appearance = v[9];
    std::copy(v.begin() + 10, v.end(), c.box_norm.begin());
  } else if (v.size() == kDimNoResponse) {
    c.confidence = v[0];
    c.appearance = v[1];
    std::copy(v.begin() + 2, v.end(), c.box_norm.begin());
  } else {
    throw std::invalid_argument("cue vector: expected 14 or 6 entries");
  }
  return c;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(a.x, b.x);
  const double iy = std::max(a.y, b.y);
  const double ix2 = std::min(a.x + a.w, b.x + b.w);
  const double iy2 = std::min(a.y + a.h, b.y + b.h);
  const double iw = std::max(0.0, ix2 - ix);
  const double ih = std::max(0.0, iy2 - iy);
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double center_distance(const BoundingBox& a, const BoundingBox& b) {
  const double dx = a.cx() - b.cx();
  const double dy = a.cy() - b.cy();
  return std::sqrt(dx * dx + dy * dy);
}

std::array<double, 4> normalize_box(const BoundingBox& b, const FrameDims& dims) {
  if (!(dims.width > 0.0) || !(dims.height > 0.0))
    throw std::invalid_argument("normalize_box: frame dims must be positive");
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return {clamp01(b.x / dims.width), clamp01(b.y / dims.height), clamp01(b.w / dims.width),
          clamp01(b.h / dims.height)};
}

}  // namespace ltmu
