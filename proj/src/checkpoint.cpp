#include "trgr/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "trgr/dataset_io.hpp"
#include "trgr/errors.hpp"

namespace trgr {

namespace {
constexpr char kMagic[7] = {'T', 'R', 'G', 'R', 'M', 'D', 'L'};
}

void save_checkpoint(std::ostream& out, nn::RcnnModel& model) {
  out.write(kMagic, sizeof(kMagic));
  le::put_u16(out, kCheckpointVersion);
  le::put_u32(out, static_cast<std::uint32_t>(model.input_height()));
  le::put_u32(out, static_cast<std::uint32_t>(model.input_width()));
  le::put_u32(out, static_cast<std::uint32_t>(model.classes()));
  const auto specs = model.layer_specs();
  le::put_u32(out, static_cast<std::uint32_t>(specs.size()));
  for (const auto& s : specs) {
    out.put(static_cast<char>(s.kind));
    for (std::size_t v : {s.kh, s.kw, s.sh, s.sw, s.ph, s.pw, s.channels_out}) {
      le::put_u32(out, static_cast<std::uint32_t>(v));
    }
  }
  const auto params = model.parameters();
  le::put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    le::put_u32(out, static_cast<std::uint32_t>(p->value.rank()));
    for (auto d : p->value.shape()) le::put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : p->value.values()) le::put_f32(out, static_cast<float>(v));
  }
  if (!out) throw std::runtime_error("save_checkpoint: stream write failed");
}

nn::RcnnModel load_checkpoint(std::istream& in) {
  char magic[sizeof(kMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw FormatError("checkpoint: bad magic");
  const auto version = le::get_u16(in);
  if (version != kCheckpointVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  const std::size_t height = le::get_u32(in);
  const std::size_t width = le::get_u32(in);
  const std::size_t classes = le::get_u32(in);
  nn::RcnnModel model(height, width, classes, 0);

  const auto expected = model.layer_specs();
  const std::size_t layer_count = le::get_u32(in);
  if (layer_count != expected.size()) throw FormatError("checkpoint: layer table does not match architecture");
  for (std::size_t i = 0; i < layer_count; ++i) {
    nn::LayerSpec s;
    s.kind = static_cast<nn::LayerKind>(le::get_u8(in));
    s.kh = le::get_u32(in);
    s.kw = le::get_u32(in);
    s.sh = le::get_u32(in);
    s.sw = le::get_u32(in);
    s.ph = le::get_u32(in);
    s.pw = le::get_u32(in);
    s.channels_out = le::get_u32(in);
    if (!(s == expected[i])) {
      throw FormatError("checkpoint: layer " + std::to_string(i) + " (" + nn::to_string(s.kind) +
                        ") does not match architecture");
    }
  }

  auto params = model.parameters();
  const std::size_t tensor_count = le::get_u32(in);
  if (tensor_count != params.size()) throw FormatError("checkpoint: parameter count mismatch");
  for (auto* p : params) {
    const std::size_t rank = le::get_u32(in);
    nn::Shape shape(rank);
    for (auto& d : shape) d = le::get_u32(in);
    if (shape != p->value.shape()) {
      throw FormatError("checkpoint: tensor " + p->name + " has shape " + nn::shape_string(shape) +
                        ", expected " + nn::shape_string(p->value.shape()));
    }
    for (auto& v : p->value.values()) v = le::get_f32(in);
  }
  return model;
}

void save_checkpoint_file(const std::string& path, nn::RcnnModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  save_checkpoint(out, model);
}

nn::RcnnModel load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint file not found: " + path);
  return load_checkpoint(in);
}

}  // namespace trgr
