#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "ltmu/core.hpp"
#include "ltmu/nn.hpp"
#include "ltmu/tensor.hpp"

namespace ltmu::cues {

// Non-negative 2-D score grid emitted by the local tracker.
struct ResponseMap {
  Tensor grid;  // shape [h, w]

  ResponseMap() = default;
  ResponseMap(int h, int w) : grid({h, w}) {}
  int height() const { return grid.shape[0]; }
  int width() const { return grid.shape[1]; }
  double& at(int y, int x) { return grid.at(y, x); }
  double at(int y, int x) const { return grid.at(y, x); }
};

// Two stride-2 conv layers with tanh, then global average pooling; maps a
// 50x50 response map to an 8-vector with entries in (-1, 1).
struct ResponseNetParams {
  Tensor conv1_w;  // [3, 3, 1, 4]
  Tensor conv1_b;  // [4]
  Tensor conv2_w;  // [3, 3, 4, 8]
  Tensor conv2_b;  // [8]

  static ResponseNetParams zeros();
  static ResponseNetParams init(Rng& rng, double scale);
};

// Identifies an image crop without carrying pixels: (sequence, frame, box).
// Providers resolve it however they can; the simulator uses its world state,
// a real provider would crop the frame.
struct PatchRef {
  std::uint64_t sequence_id = 0;
  int frame = 0;
  BoundingBox box;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dim() const = 0;
  // Deterministic per input; unit-normalized, fixed length.
  virtual std::vector<double> embed(const PatchRef& patch) const = 0;
};

// Ring buffer of the last t_s cue vectors.
class CueHistory {
 public:
  explicit CueHistory(int capacity) : capacity_(capacity) {}

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(buf_.size()); }
  void clear() { buf_.clear(); }

  // Appends v; yields the full window once t_s frames have been observed.
  std::optional<TimeSliceWindow> push_and_window(const CueVector& v);

 private:
  int capacity_;
  std::deque<CueVector> buf_;
};

double confidence_score(const ResponseMap& r);

ResponseMap resize_bilinear(const ResponseMap& r, int out_h = 50, int out_w = 50);

std::array<double, 8> response_vector(const ResponseMap& r, const ResponseNetParams& p);

double appearance_score(const std::vector<double>& current, const std::vector<double>& templ);

CueVector assemble_cue_vector(double conf, const std::array<double, 8>& respvec, double appear,
                              const std::array<double, 4>& box_norm);

// [h, w] grid viewed as a single-channel feature map [h, w, 1].
Tensor as_feature_map(const ResponseMap& r);

inline constexpr int kResizedSide = 50;

}  // namespace ltmu::cues
