#pragma once

#include <array>
#include <vector>

namespace ltmu {

// Axis-aligned box; (x, y) is the top-left corner.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }
  bool valid() const;
};

struct FrameDims {
  double width = 0.0;
  double height = 0.0;
};

// Per-frame cue vector x_t: confidence, response embedding, appearance
// distance and the frame-normalized box. Flattens to 14 entries
// (6 when the response embedding is dropped).
struct CueVector {
  double confidence = 0.0;
  std::array<double, 8> response_embed{};
  double appearance = 0.0;
  std::array<double, 4> box_norm{};

  static constexpr int kDim = 14;
  static constexpr int kDimNoResponse = 6;

  // Fixed layout [s_c, v_r(8), s_a, b(4)] or [s_c, s_a, b(4)].
  std::vector<double> flatten(bool include_response = true) const;
  static CueVector from_flat(const std::vector<double>& v);
};

// The last t_s cue vectors, oldest first.
struct TimeSliceWindow {
  std::vector<CueVector> vectors;

  int length() const { return static_cast<int>(vectors.size()); }
};

double iou(const BoundingBox& a, const BoundingBox& b);
double center_distance(const BoundingBox& a, const BoundingBox& b);

// [x/width, y/height, w/width, h/height], clamped to [0, 1].
std::array<double, 4> normalize_box(const BoundingBox& b, const FrameDims& dims);

}  // namespace ltmu
