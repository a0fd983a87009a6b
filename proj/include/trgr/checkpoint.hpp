#pragma once

// Model checkpoint, little-endian:
//   "TRGRMDL" | u16 version=1 | u32 height | u32 width | u32 classes |
//   u32 layer_count | per layer: u8 kind, u32 kh kw sh sw ph pw channels_out |
//   u32 tensor_count | per tensor: u32 rank, u32 dims[rank], float32 values
// Tensors follow RcnnModel::parameters() order (running statistics included).

#include <iosfwd>
#include <string>

#include "trgr/nn/rcnn.hpp"

namespace trgr {

inline constexpr std::uint16_t kCheckpointVersion = 1;

void save_checkpoint(std::ostream& out, nn::RcnnModel& model);
nn::RcnnModel load_checkpoint(std::istream& in);

void save_checkpoint_file(const std::string& path, nn::RcnnModel& model);
nn::RcnnModel load_checkpoint_file(const std::string& path);

}  // namespace trgr
