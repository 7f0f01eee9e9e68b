#include "vctx/tensor_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace vctx {
namespace {

std::string format_real(double value) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace

FrameSequence read_frame_sequence(std::istream& in) {
  std::string line;
  int side = 0, dim = 0, count = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream header(line);
    if (!(header >> side >> dim >> count)) {
      throw DataError("tensor header must be 'side dim frames'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw DataError("tensor file has no header line");
  if (side < 1 || dim < 1 || count < 1) {
    throw DataError("tensor header values must be positive");
  }

  FrameSequence seq;
  seq.frames.reserve(count);
  for (int t = 0; t < count; ++t) {
    EmbeddingGrid g(side, dim);
    for (double& v : g.data) {
      if (!(in >> v)) {
        throw DataError("tensor file ends before frame " + std::to_string(t + 1) +
                        " is complete");
      }
    }
    seq.frames.push_back(std::move(g));
  }
  double extra;
  if (in >> extra) throw DataError("tensor file has trailing values");
  seq.validate();
  return seq;
}

FrameSequence read_frame_sequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tensor file: " + path.string());
  try {
    return read_frame_sequence(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_frame_sequence(std::ostream& out, const FrameSequence& seq) {
  seq.validate();
  out << seq.side() << ' ' << seq.dim() << ' ' << seq.size() << '\n';
  for (const EmbeddingGrid& g : seq.frames) {
    for (int r = 0; r < g.side; ++r) {
      for (int c = 0; c < g.side; ++c) {
        for (int k = 0; k < g.dim; ++k) {
          if (c != 0 || k != 0) out << ' ';
          out << format_real(g.at(r, c, k));
        }
      }
      out << '\n';
    }
  }
}

void write_frame_sequence(const std::filesystem::path& path, const FrameSequence& seq) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write tensor file: " + path.string());
  write_frame_sequence(out, seq);
}

}  // namespace vctx
