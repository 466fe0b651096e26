#include <algorithm>

#include <fmt/format.h>

#include "braindec/error.hpp"
#include "braindec/io_util.hpp"
#include "braindec/train.hpp"

namespace braindec::models {
namespace {

constexpr char kMagic[4] = {'M', 'P', 'R', '1'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_checkpoint(std::ostream& out, const Model& model) {
  validate_model(model);
  out.write(kMagic, 4);
  write_le<std::uint32_t>(out, kVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.shape.arch));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.shape.readout));
  write_le<std::uint64_t>(out, model.shape.time_steps);
  write_le<std::uint64_t>(out, model.shape.channels);
  write_le<std::uint64_t>(out, model.shape.hidden);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.params.size()));
  for (const auto& block : model.params) {
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(block.value.rows()));
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(block.value.cols()));
    for (Eigen::Index r = 0; r < block.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < block.value.cols(); ++c) write_le<double>(out, block.value(r, c));
    }
  }
}

Model read_checkpoint(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || !std::equal(magic, magic + 4, kMagic)) throw Error("not a checkpoint file (bad magic)");
  const auto version = read_le<std::uint32_t>(in, "checkpoint version");
  if (version != kVersion) throw Error(fmt::format("unsupported checkpoint version {}", version));
  const auto arch = read_le<std::uint32_t>(in, "architecture tag");
  const auto readout = read_le<std::uint32_t>(in, "readout tag");
  if (arch > 1) throw Error(fmt::format("unknown architecture tag {}", arch));
  if (readout > 1) throw Error(fmt::format("unknown readout tag {}", readout));

  ModelShape shape;
  shape.arch = static_cast<Architecture>(arch);
  shape.readout = static_cast<LstmReadout>(readout);
  shape.time_steps = read_le<std::uint64_t>(in, "time steps");
  shape.channels = read_le<std::uint64_t>(in, "channels");
  shape.hidden = read_le<std::uint64_t>(in, "hidden size");

  Model model = zero_model(shape);
  const auto n_blocks = read_le<std::uint32_t>(in, "block count");
  if (n_blocks != model.params.size()) {
    throw Error(fmt::format("checkpoint has {} blocks, architecture needs {}", n_blocks, model.params.size()));
  }
  for (auto& block : model.params) {
    const auto rows = read_le<std::uint64_t>(in, "block rows");
    const auto cols = read_le<std::uint64_t>(in, "block cols");
    if (rows != static_cast<std::uint64_t>(block.value.rows()) || cols != static_cast<std::uint64_t>(block.value.cols())) {
      throw Error(fmt::format("block {} is [{} x {}] in the file, expected [{} x {}]", block.name, rows, cols,
                              block.value.rows(), block.value.cols()));
    }
    for (Eigen::Index r = 0; r < block.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < block.value.cols(); ++c) block.value(r, c) = read_le<double>(in, block.name);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error("trailing bytes after checkpoint payload");
  model.params.require_finite("value");
  return model;
}

}  // namespace braindec::models
