#pragma once

#include <vector>

#include "vctx/types.hpp"

namespace vctx {

// Tokens per frame left by p x p mean pooling on an n x n grid: ceil(n/p)^2.
int token_count_for_stride(int side, int stride);

// k window-center indices on [0, n): idx_i = floor((2i+1) * n / (2k)).
// Strictly increasing; the identity list when k == n.
std::vector<int> uniform_sample_indices(int n, int k);

// Keep the k x k subgrid at the uniform sample positions (copies, no
// arithmetic).
EmbeddingGrid sample_grid(const EmbeddingGrid& grid, int k);

// p x p mean pooling with stride p. Edge windows shorter than p average
// over their actual cell count, so the output side is ceil(n/p).
EmbeddingGrid spatial_mean_pool(const EmbeddingGrid& grid, int stride);

// Pick min(target, length) frames at uniform positions, order preserved.
FrameSequence uniform_sample_frames(const FrameSequence& source, int target);

// Partition the sequence into `target` contiguous groups (sizes differ by
// at most one, larger groups first) and mean each group element-wise.
FrameSequence temporal_mean_pool(const FrameSequence& source, int target);

// Joint temporal-group x spatial-window mean: every output cell divides
// once by the true cell count of its combined window.
VisualContext pool3d(const FrameSequence& source, int stride, int target_frames);

// Flatten a frame sequence into a visual context (side^2 tokens per frame).
VisualContext to_visual_context(const FrameSequence& source);

// Recover the square-grid frame sequence view of a visual context.
FrameSequence to_frame_sequence(const VisualContext& context);

// Compose the temporal and spatial operators requested by `spec`.
VisualContext apply_selection(const FrameSequence& source, const SelectionSpec& spec);

}  // namespace vctx
