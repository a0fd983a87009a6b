#pragma once

// Little-endian dataset container:
//   "TRGR" | u16 version=1 | u32 T | u32 S | u32 record_count |
//   per record: u16 label (0xFFFF vacant) | u64 episode_seed | T*S float32
// Magnitudes are written time-major and rounded to float32.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trgr/gait.hpp"

namespace trgr {

inline constexpr std::uint16_t kDatasetVersion = 1;

void write_dataset(std::ostream& out, const std::vector<CsiRecording>& recs);
std::vector<CsiRecording> read_dataset(std::istream& in);

void write_dataset_file(const std::string& path, const std::vector<CsiRecording>& recs);
/// Throws std::runtime_error naming the path if it cannot be opened.
std::vector<CsiRecording> read_dataset_file(const std::string& path);

namespace le {

void put_u16(std::ostream& out, std::uint16_t v);
void put_u32(std::ostream& out, std::uint32_t v);
void put_u64(std::ostream& out, std::uint64_t v);
void put_f32(std::ostream& out, float v);
std::uint8_t get_u8(std::istream& in);
std::uint16_t get_u16(std::istream& in);
std::uint32_t get_u32(std::istream& in);
std::uint64_t get_u64(std::istream& in);
float get_f32(std::istream& in);

}  // namespace le

}  // namespace trgr
