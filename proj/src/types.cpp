#include "vctx/types.hpp"

#include <cmath>

namespace vctx {
namespace {

int isqrt_exact(int value) {
  int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(value))));
  return root * root == value ? root : -1;
}

}  // namespace

void EmbeddingGrid::validate() const {
  if (side < 1 || dim < 1) {
    throw InvalidArgumentError("embedding grid needs side >= 1 and dim >= 1");
  }
  if (data.size() != static_cast<std::size_t>(side) * side * dim) {
    throw InvalidArgumentError("embedding grid data size does not match side*side*dim");
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw InvalidArgumentError("embedding grid holds a non-finite value");
  }
}

void FrameSequence::validate() const {
  if (frames.empty()) throw InvalidArgumentError("frame sequence is empty");
  const int s = frames.front().side;
  const int d = frames.front().dim;
  for (const EmbeddingGrid& g : frames) {
    g.validate();
    if (g.side != s || g.dim != d) {
      throw InvalidArgumentError("frame sequence mixes grid shapes");
    }
  }
}

void SelectionSpec::validate() const {
  if (spatial_param < 1) throw InvalidArgumentError("spatial_param must be >= 1");
  if (target_frames < 1) throw InvalidArgumentError("target_frames must be >= 1");
  if (max_frames < 1) throw InvalidArgumentError("max_frames must be >= 1");
  if (target_frames > max_frames) {
    throw InvalidArgumentError("target_frames exceeds max_frames");
  }
}

void VisualContext::validate() const {
  if (frames_out < 1 || tokens_per_frame < 1 || dim < 1) {
    throw InvalidArgumentError("visual context needs positive shape");
  }
  if (isqrt_exact(tokens_per_frame) < 0) {
    throw InvalidArgumentError("tokens_per_frame must be a perfect square");
  }
  if (data.size() !=
      static_cast<std::size_t>(frames_out) * tokens_per_frame * dim) {
    throw InvalidArgumentError("visual context data size does not match shape");
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw InvalidArgumentError("visual context holds a non-finite value");
  }
}

void LossSample::validate() const {
  if (frames < 1 || tokens < 1) {
    throw DataError("loss sample needs frames >= 1 and tokens >= 1");
  }
  if (!std::isfinite(loss) || loss <= 0.0) {
    throw DataError("loss sample needs a finite positive loss");
  }
}

}  // namespace vctx
