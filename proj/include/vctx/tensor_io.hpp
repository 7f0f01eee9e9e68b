#pragma once

#include <filesystem>
#include <iosfwd>

#include "vctx/types.hpp"

namespace vctx {

// Plain-text frame tensor exchange: a "side dim frames" header line followed
// by side*side*dim reals per frame, row-major, whitespace separated. Lines
// starting with '#' before the header are ignored.
FrameSequence read_frame_sequence(std::istream& in);
FrameSequence read_frame_sequence(const std::filesystem::path& path);

void write_frame_sequence(std::ostream& out, const FrameSequence& seq);
void write_frame_sequence(const std::filesystem::path& path, const FrameSequence& seq);

}  // namespace vctx
