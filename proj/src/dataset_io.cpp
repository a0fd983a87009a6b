#include "trgr/dataset_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "trgr/errors.hpp"

namespace trgr {

namespace le {

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw FormatError("unexpected end of file");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void put_u16(std::ostream& out, std::uint16_t v) { put(out, v); }
void put_u32(std::ostream& out, std::uint32_t v) { put(out, v); }
void put_u64(std::ostream& out, std::uint64_t v) { put(out, v); }
void put_f32(std::ostream& out, float v) { put(out, std::bit_cast<std::uint32_t>(v)); }
std::uint8_t get_u8(std::istream& in) { return get<std::uint8_t>(in); }
std::uint16_t get_u16(std::istream& in) { return get<std::uint16_t>(in); }
std::uint32_t get_u32(std::istream& in) { return get<std::uint32_t>(in); }
std::uint64_t get_u64(std::istream& in) { return get<std::uint64_t>(in); }
float get_f32(std::istream& in) { return std::bit_cast<float>(get<std::uint32_t>(in)); }

}  // namespace le

void write_dataset(std::ostream& out, const std::vector<CsiRecording>& recs) {
  const std::uint32_t packets = recs.empty() ? 0 : static_cast<std::uint32_t>(recs.front().packets);
  const std::uint32_t subcarriers =
      recs.empty() ? 0 : static_cast<std::uint32_t>(recs.front().subcarriers);
  out.write("TRGR", 4);
  le::put_u16(out, kDatasetVersion);
  le::put_u32(out, packets);
  le::put_u32(out, subcarriers);
  le::put_u32(out, static_cast<std::uint32_t>(recs.size()));
  for (const auto& rec : recs) {
    if (rec.packets != packets || rec.subcarriers != subcarriers ||
        rec.magnitudes.size() != rec.packets * rec.subcarriers) {
      throw DimensionError("write_dataset: all recordings must share one T x S shape");
    }
    le::put_u16(out, rec.label);
    le::put_u64(out, rec.episode_seed);
    for (double v : rec.magnitudes) le::put_f32(out, static_cast<float>(v));
  }
  if (!out) throw std::runtime_error("write_dataset: stream write failed");
}

std::vector<CsiRecording> read_dataset(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TRGR", 4) != 0) throw FormatError("dataset: bad magic");
  const auto version = le::get_u16(in);
  if (version != kDatasetVersion) {
    throw FormatError("dataset: unsupported version " + std::to_string(version));
  }
  const std::size_t packets = le::get_u32(in);
  const std::size_t subcarriers = le::get_u32(in);
  const std::size_t count = le::get_u32(in);
  std::vector<CsiRecording> recs;
  recs.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    CsiRecording rec;
    rec.packets = packets;
    rec.subcarriers = subcarriers;
    rec.label = le::get_u16(in);
    rec.episode_seed = le::get_u64(in);
    rec.magnitudes.resize(packets * subcarriers);
    for (auto& v : rec.magnitudes) v = le::get_f32(in);
    recs.push_back(std::move(rec));
  }
  return recs;
}

void write_dataset_file(const std::string& path, const std::vector<CsiRecording>& recs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  write_dataset(out, recs);
}

std::vector<CsiRecording> read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("dataset file not found: " + path);
  return read_dataset(in);
}

}  // namespace trgr
