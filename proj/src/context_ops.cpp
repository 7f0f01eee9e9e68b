#include "vctx/context_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vctx {
namespace {

void check_stride(int side, int stride) {
  if (stride < 1 || stride > side) {
    throw InvalidArgumentError("invalid stride " + std::to_string(stride) +
                               " for grid side " + std::to_string(side));
  }
}

void check_count(int available, int count, const char* what) {
  if (count < 1 || count > available) {
    throw InvalidArgumentError(std::string("invalid ") + what + " count " +
                               std::to_string(count) + " (have " +
                               std::to_string(available) + ")");
  }
}

// Contiguous group boundaries that split `total` into `groups` parts whose
// sizes differ by at most one, larger parts first.
std::vector<int> group_offsets(int total, int groups) {
  std::vector<int> offsets(groups + 1, 0);
  const int base = total / groups;
  const int extra = total % groups;
  for (int g = 0; g < groups; ++g) {
    offsets[g + 1] = offsets[g] + base + (g < extra ? 1 : 0);
  }
  return offsets;
}

}  // namespace

int token_count_for_stride(int side, int stride) {
  if (side < 1) throw InvalidArgumentError("grid side must be >= 1");
  check_stride(side, stride);
  const int out_side = (side + stride - 1) / stride;
  return out_side * out_side;
}

std::vector<int> uniform_sample_indices(int n, int k) {
  if (n < 1) throw InvalidArgumentError("grid side must be >= 1");
  check_count(n, k, "sample");
  std::vector<int> indices(k);
  for (int i = 0; i < k; ++i) {
    indices[i] = static_cast<int>((2LL * i + 1) * n / (2LL * k));
  }
  return indices;
}

EmbeddingGrid sample_grid(const EmbeddingGrid& grid, int k) {
  grid.validate();
  const std::vector<int> idx = uniform_sample_indices(grid.side, k);
  EmbeddingGrid out(k, grid.dim);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      for (int d = 0; d < grid.dim; ++d) {
        out.at(r, c, d) = grid.at(idx[r], idx[c], d);
      }
    }
  }
  return out;
}

EmbeddingGrid spatial_mean_pool(const EmbeddingGrid& grid, int stride) {
  grid.validate();
  check_stride(grid.side, stride);
  const int n = grid.side;
  const int out_side = (n + stride - 1) / stride;
  EmbeddingGrid out(out_side, grid.dim);
  for (int a = 0; a < out_side; ++a) {
    const int r0 = a * stride;
    const int r1 = std::min(r0 + stride, n);
    for (int b = 0; b < out_side; ++b) {
      const int c0 = b * stride;
      const int c1 = std::min(c0 + stride, n);
      const double count = static_cast<double>(r1 - r0) * (c1 - c0);
      for (int d = 0; d < grid.dim; ++d) {
        double sum = 0.0;
        for (int r = r0; r < r1; ++r) {
          for (int c = c0; c < c1; ++c) sum += grid.at(r, c, d);
        }
        out.at(a, b, d) = sum / count;
      }
    }
  }
  return out;
}

FrameSequence uniform_sample_frames(const FrameSequence& source, int target) {
  source.validate();
  if (target < 1) throw InvalidArgumentError("target frame count must be >= 1");
  if (source.size() <= target) return source;
  FrameSequence out;
  out.frames.reserve(target);
  for (int i : uniform_sample_indices(source.size(), target)) {
    out.frames.push_back(source.frames[i]);
  }
  return out;
}

FrameSequence temporal_mean_pool(const FrameSequence& source, int target) {
  source.validate();
  check_count(source.size(), target, "target frame");
  if (target == source.size()) return source;
  const std::vector<int> offsets = group_offsets(source.size(), target);
  const int side = source.side();
  const int dim = source.dim();
  FrameSequence out;
  out.frames.reserve(target);
  for (int g = 0; g < target; ++g) {
    EmbeddingGrid mean(side, dim);
    const int count = offsets[g + 1] - offsets[g];
    for (int t = offsets[g]; t < offsets[g + 1]; ++t) {
      const EmbeddingGrid& frame = source.frames[t];
      for (std::size_t i = 0; i < mean.data.size(); ++i) mean.data[i] += frame.data[i];
    }
    for (double& v : mean.data) v /= count;
    out.frames.push_back(std::move(mean));
  }
  return out;
}

VisualContext pool3d(const FrameSequence& source, int stride, int target_frames) {
  source.validate();
  check_stride(source.side(), stride);
  check_count(source.size(), target_frames, "target frame");
  const int n = source.side();
  const int dim = source.dim();
  const int out_side = (n + stride - 1) / stride;
  const std::vector<int> offsets = group_offsets(source.size(), target_frames);

  VisualContext out(target_frames, out_side * out_side, dim);
  for (int g = 0; g < target_frames; ++g) {
    const int frame_count = offsets[g + 1] - offsets[g];
    for (int a = 0; a < out_side; ++a) {
      const int r0 = a * stride;
      const int r1 = std::min(r0 + stride, n);
      for (int b = 0; b < out_side; ++b) {
        const int c0 = b * stride;
        const int c1 = std::min(c0 + stride, n);
        const double count =
            static_cast<double>(frame_count) * (r1 - r0) * (c1 - c0);
        for (int d = 0; d < dim; ++d) {
          double sum = 0.0;
          for (int t = offsets[g]; t < offsets[g + 1]; ++t) {
            const EmbeddingGrid& frame = source.frames[t];
            for (int r = r0; r < r1; ++r) {
              for (int c = c0; c < c1; ++c) sum += frame.at(r, c, d);
            }
          }
          out.at(g, a * out_side + b, d) = sum / count;
        }
      }
    }
  }
  return out;
}

VisualContext to_visual_context(const FrameSequence& source) {
  source.validate();
  const int side = source.side();
  VisualContext out(source.size(), side * side, source.dim());
  std::size_t offset = 0;
  for (const EmbeddingGrid& frame : source.frames) {
    std::copy(frame.data.begin(), frame.data.end(), out.data.begin() + offset);
    offset += frame.data.size();
  }
  return out;
}

FrameSequence to_frame_sequence(const VisualContext& context) {
  context.validate();
  const int side = static_cast<int>(std::lround(std::sqrt(
      static_cast<double>(context.tokens_per_frame))));
  FrameSequence out;
  out.frames.reserve(context.frames_out);
  for (int t = 0; t < context.frames_out; ++t) {
    EmbeddingGrid g(side, context.dim);
    const std::size_t begin = context.index(t, 0, 0);
    std::copy(context.data.begin() + begin, context.data.begin() + begin + g.data.size(),
              g.data.begin());
    out.frames.push_back(std::move(g));
  }
  return out;
}

VisualContext apply_selection(const FrameSequence& source, const SelectionSpec& spec) {
  source.validate();
  spec.validate();
  if (spec.spatial_param > source.side()) {
    throw InvalidArgumentError("spatial_param exceeds the grid side");
  }

  if (spec.temporal_mode == TemporalMode::kPool3d) {
    if (spec.spatial_mode != SpatialMode::kPool) {
      throw InvalidArgumentError("3-D pooling requires the spatial pool mode");
    }
    FrameSequence staged = uniform_sample_frames(source, spec.max_frames);
    return pool3d(staged, spec.spatial_param, std::min(spec.target_frames, staged.size()));
  }

  FrameSequence frames;
  if (spec.temporal_mode == TemporalMode::kSample) {
    frames = uniform_sample_frames(source, spec.target_frames);
  } else {
    FrameSequence staged = uniform_sample_frames(source, spec.max_frames);
    frames = temporal_mean_pool(staged, std::min(spec.target_frames, staged.size()));
  }

  FrameSequence reduced;
  reduced.frames.reserve(frames.size());
  for (const EmbeddingGrid& frame : frames.frames) {
    reduced.frames.push_back(spec.spatial_mode == SpatialMode::kSample
                                 ? sample_grid(frame, spec.spatial_param)
                                 : spatial_mean_pool(frame, spec.spatial_param));
  }
  return to_visual_context(reduced);
}

}  // namespace vctx
