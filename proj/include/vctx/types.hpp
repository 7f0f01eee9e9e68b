#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vctx {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid operator argument: stride/count out of range, malformed shape.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Math domain violation: nonpositive coordinate, degenerate exponents.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (files, logs, tables).
class DataError : public Error {
 public:
  using Error::Error;
};

// Request that cannot be served as asked (bad family/log combination, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

// One frame's square feature map: side x side cells of dim-dimensional
// embeddings, stored row-major with the embedding axis fastest.
struct EmbeddingGrid {
  int side = 0;
  int dim = 0;
  std::vector<double> data;

  EmbeddingGrid() = default;
  EmbeddingGrid(int side_, int dim_)
      : side(side_), dim(dim_),
        data(static_cast<std::size_t>(side_) * side_ * dim_, 0.0) {}

  static EmbeddingGrid constant(int side, int dim, double value) {
    EmbeddingGrid g(side, dim);
    for (double& v : g.data) v = value;
    return g;
  }

  std::size_t index(int row, int col, int k) const {
    return (static_cast<std::size_t>(row) * side + col) * dim + k;
  }
  double at(int row, int col, int k) const { return data[index(row, col, k)]; }
  double& at(int row, int col, int k) { return data[index(row, col, k)]; }

  void validate() const;
};

// An ordered list of frames sharing one grid shape.
struct FrameSequence {
  std::vector<EmbeddingGrid> frames;

  int size() const { return static_cast<int>(frames.size()); }
  int side() const { return frames.empty() ? 0 : frames.front().side; }
  int dim() const { return frames.empty() ? 0 : frames.front().dim; }

  void validate() const;
};

enum class SpatialMode { kSample, kPool };
enum class TemporalMode { kSample, kPool, kPool3d };

// How to reduce a frame sequence to a visual context: a temporal operator
// (choose/merge frames) combined with a spatial operator (choose/merge
// grid cells).
struct SelectionSpec {
  SpatialMode spatial_mode = SpatialMode::kPool;
  // Samples per side in sample mode, pooling stride in pool mode.
  int spatial_param = 1;
  TemporalMode temporal_mode = TemporalMode::kSample;
  int target_frames = 1;
  int max_frames = 128;

  void validate() const;
};

// The flattened visual input: frames_out frames of tokens_per_frame
// embeddings each. tokens_per_frame is always a perfect square.
struct VisualContext {
  int frames_out = 0;
  int tokens_per_frame = 0;
  int dim = 0;
  std::vector<double> data;

  VisualContext() = default;
  VisualContext(int frames, int tokens, int dim_)
      : frames_out(frames), tokens_per_frame(tokens), dim(dim_),
        data(static_cast<std::size_t>(frames) * tokens * dim_, 0.0) {}

  std::size_t index(int frame, int token, int k) const {
    return (static_cast<std::size_t>(frame) * tokens_per_frame + token) * dim + k;
  }
  double at(int frame, int token, int k) const { return data[index(frame, token, k)]; }
  double& at(int frame, int token, int k) { return data[index(frame, token, k)]; }

  std::int64_t total_tokens() const {
    return static_cast<std::int64_t>(frames_out) * tokens_per_frame;
  }

  void validate() const;
};

// One trained configuration and its measured language-modeling loss.
struct LossSample {
  std::int64_t frames = 0;
  std::int64_t tokens = 0;
  double loss = 0.0;

  void validate() const;
  bool operator==(const LossSample&) const = default;
};

}  // namespace vctx
