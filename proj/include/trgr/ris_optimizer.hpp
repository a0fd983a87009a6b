#pragma once

// Configuration alternating optimization of a 1-bit RIS: sweeps over the
// grid columns then rows, proposing a whole-line flip at each step and
// keeping it only if the measured signal strength strictly improves.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "trgr/channel.hpp"
#include "trgr/codebook.hpp"

namespace trgr {

/// Signal-strength oracle. Measurements add zero-mean Gaussian noise with
/// std measurement_noise_std drawn from a stream seeded by `seed`.
struct ObjectiveProbe {
  std::function<double(const Codebook&)> evaluate;
  double measurement_noise_std = 0.0;
  std::uint64_t seed = 0;
};

/// Probe whose strength is the noiseless SNR of the RIS channel.
ObjectiveProbe make_snr_probe(RisChannel ris, NoiseSpec noise);

struct TraceStep {
  std::size_t outer = 0;  // t, 1-based
  std::size_t inner = 0;  // i, 1-based
  LineKind kind = LineKind::column;
  std::size_t index = 0;  // line index, 0-based
  /// Measured strength of the configuration in force after this step.
  double s_current = 0.0;
  bool accepted = false;
};

struct OptimizationTrace {
  std::vector<TraceStep> iterations;
  double initial_strength = 0.0;
  Codebook best_codebook;
  double best_strength = 0.0;
  /// Configuration assigned to the RIS when the sweeps end.
  Codebook final_codebook;

  std::string to_csv() const;
};

/// Runs `outer_iters` sweeps of C column visits followed by R row visits.
OptimizationTrace optimize(const ObjectiveProbe& probe, const Codebook& initial,
                           std::size_t outer_iters = 5);

struct BruteForceResult {
  Codebook codebook;
  double strength = 0.0;
};

inline constexpr std::size_t kBruteForceMaxElements = 20;

/// Exact maximizer over all 2^(rows*cols) codebooks (noiseless evaluate);
/// ties go to the smallest row-major binary value. Throws CapacityError
/// above kBruteForceMaxElements.
BruteForceResult brute_force(const ObjectiveProbe& probe, std::size_t rows, std::size_t cols);

/// True when the accepted strengths are strictly increasing and
/// best_strength is the running maximum of the recorded strengths.
bool trace_is_monotone(const OptimizationTrace& trace);

}  // namespace trgr
