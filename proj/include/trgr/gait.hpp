#pragma once

// Synthetic gait-modulated CSI. Each walking subject contributes a few
// dynamic paths whose amplitudes follow the gait cadence harmonics and
// whose phases rotate at a per-path Doppler rate.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trgr/channel.hpp"
#include "trgr/codebook.hpp"

namespace trgr {

inline constexpr std::uint16_t kVacantLabel = 0xFFFF;

struct SubjectProfile {
  std::uint16_t subject_id = 0;
  double cadence_hz = 1.0;
  /// Base amplitude of the torso path (path 0).
  double torso_amp = 0.4;
  /// Base amplitude of the limb paths (paths 1..P-1).
  double limb_amp = 0.2;
  /// Amplitude of cadence harmonic k+1.
  std::vector<double> harmonic_weights{0.5};
  /// Fixes the per-subject path delays, Doppler centres and harmonic phases.
  std::uint64_t signature_seed = 0;

  void validate() const;
};

struct ScenarioConfig {
  std::string name = "default";
  DirectChannel direct;
  RisChannel ris;
  double wall_attenuation_db = 0.0;
  std::size_t dynamic_path_count = 4;
  NoiseSpec noise;
  SubcarrierGrid grid;
  double packets_per_second = 50.0;
  double duration_s = 3.0;

  std::size_t packet_count() const;
  void validate() const;
};

/// One walking episode: T x S magnitudes stored time-major.
struct CsiRecording {
  std::size_t packets = 0;
  std::size_t subcarriers = 0;
  std::vector<double> magnitudes;
  std::uint16_t label = kVacantLabel;
  std::string scenario;
  std::uint64_t episode_seed = 0;

  double at(std::size_t t, std::size_t s) const { return magnitudes[t * subcarriers + s]; }
  double& at(std::size_t t, std::size_t s) { return magnitudes[t * subcarriers + s]; }
  bool vacant() const { return label == kVacantLabel; }
};

/// Human-induced taps at time t (seconds), before illumination scaling.
TapList dynamic_taps(const SubjectProfile& profile, std::size_t path_count, double t,
                     std::uint64_t episode_seed);

/// Renders one episode. std::nullopt renders the vacant room.
///
/// Static taps are the wall-attenuated direct taps plus the RIS taps for
/// `codebook`. The subject stands beyond the wall, so its dynamic taps are
/// scaled by the RMS magnitude of the static response (the through-wall
/// illumination level) before being added. Per-subcarrier AWGN is drawn
/// from (noise.seed, episode_seed).
CsiRecording render_recording(const std::optional<SubjectProfile>& profile,
                              const ScenarioConfig& scenario, const Codebook& codebook,
                              std::uint64_t episode_seed);

/// Order-independent seed for one episode.
std::uint64_t episode_seed_for(std::uint64_t base_seed, std::uint16_t subject_id, std::size_t index);

/// profiles.size() * episodes_per_subject recordings, subject-major order.
std::vector<CsiRecording> generate_dataset(const std::vector<SubjectProfile>& profiles,
                                           const ScenarioConfig& scenario,
                                           const Codebook& codebook,
                                           std::size_t episodes_per_subject,
                                           std::uint64_t base_seed);

/// Seeded subjects with distinct cadences, amplitudes and signatures.
std::vector<SubjectProfile> default_profiles(std::size_t count, std::uint64_t seed);

}  // namespace trgr
