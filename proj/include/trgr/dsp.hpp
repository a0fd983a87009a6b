#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "trgr/gait.hpp"

namespace trgr {

struct FilterSpec {
  std::size_t window = 5;
};

/// Centered moving average. Near the edges the window is clipped to the
/// samples that exist, so (1,2,3,4,5) with window 3 gives (1.5,2,3,4,4.5).
/// Throws std::invalid_argument for an even or zero window.
std::vector<double> moving_average(std::span<const double> series, const FilterSpec& spec);

/// moving_average along time, independently per subcarrier.
CsiRecording denoise_recording(const CsiRecording& rec, const FilterSpec& spec);

/// Standardizes all T*S entries to mean 0 / std 1. Constant recordings map
/// to zeros.
CsiRecording normalize(const CsiRecording& rec);

struct DatasetSplit {
  std::vector<CsiRecording> train;
  std::vector<CsiRecording> test;
  std::uint64_t split_seed = 0;
};

/// round(2n/3) rounded half up.
std::size_t train_count_for(std::size_t n);

/// Stratified 2/3 : 1/3 split. Each class is shuffled with a stream derived
/// from split_seed; both halves keep the input order. Throws
/// std::invalid_argument if any class has fewer than 3 recordings.
DatasetSplit split_dataset(const std::vector<CsiRecording>& recs, std::uint64_t split_seed);

}  // namespace trgr
