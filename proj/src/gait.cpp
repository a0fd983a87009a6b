#include "trgr/gait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "trgr/errors.hpp"
#include "trgr/rng.hpp"

namespace trgr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Doppler centre magnitude range (Hz) at 50 packets/s.
constexpr double kDopplerMin = 2.0;
constexpr double kDopplerMax = 12.0;
// Path delays relative to the direct path.
constexpr double kDelayMin = 10e-9;
constexpr double kDelayMax = 90e-9;
// Episode-to-episode variability of a subject.
constexpr double kDopplerJitter = 0.08;
constexpr double kAmplitudeJitter = 0.08;
constexpr double kHarmonicPhaseJitter = 0.35;
constexpr double kCadenceJitter = 0.03;

struct PathState {
  double base_amp = 0.0;
  double delay = 0.0;
  double phase0 = 0.0;
  double doppler = 0.0;
  std::vector<double> harmonic_phase;
};

struct GaitState {
  double cadence = 1.0;
  std::vector<double> weights;
  std::vector<PathState> paths;
};

GaitState build_state(const SubjectProfile& profile, std::size_t path_count,
                      std::uint64_t episode_seed) {
  GaitState state;
  Rng episode(hash_values(profile.signature_seed, episode_seed, 0x45));
  state.cadence = profile.cadence_hz * (1.0 + kCadenceJitter * (2.0 * episode.uniform() - 1.0));
  state.weights = profile.harmonic_weights;
  // Gait start phase is shared by every path of one episode.
  const double start = episode.uniform(0.0, kTwoPi);

  state.paths.resize(path_count);
  for (std::size_t p = 0; p < path_count; ++p) {
    Rng signature(hash_values(profile.signature_seed, p, 0x53));
    Rng jitter(hash_values(profile.signature_seed, episode_seed, p, 0x4a));
    auto& path = state.paths[p];
    const double amp = p == 0 ? profile.torso_amp : profile.limb_amp;
    path.base_amp = amp * (1.0 + kAmplitudeJitter * (2.0 * jitter.uniform() - 1.0));
    path.delay = signature.uniform(kDelayMin, kDelayMax);
    path.phase0 = wrap_phase(signature.uniform(0.0, kTwoPi) + jitter.uniform(0.0, kTwoPi));
    const double sign = signature.uniform() < 0.5 ? -1.0 : 1.0;
    const double centre = sign * signature.uniform(kDopplerMin, kDopplerMax);
    path.doppler = centre * (1.0 + kDopplerJitter * (2.0 * jitter.uniform() - 1.0));
    path.harmonic_phase.resize(state.weights.size());
    for (std::size_t k = 0; k < state.weights.size(); ++k) {
      const double psi = signature.uniform(0.0, kTwoPi);
      path.harmonic_phase[k] =
          psi + static_cast<double>(k + 1) * start + kHarmonicPhaseJitter * jitter.normal();
    }
  }
  return state;
}

TapList taps_at(const GaitState& state, double t) {
  TapList taps;
  taps.reserve(state.paths.size());
  for (const auto& path : state.paths) {
    double modulation = 1.0;
    for (std::size_t k = 0; k < state.weights.size(); ++k) {
      modulation += state.weights[k] *
                    std::sin(kTwoPi * static_cast<double>(k + 1) * state.cadence * t +
                             path.harmonic_phase[k]);
    }
    const double amplitude = std::max(0.0, path.base_amp * modulation);
    taps.push_back(make_tap(amplitude, path.phase0 + kTwoPi * path.doppler * t, path.delay));
  }
  return taps;
}

}  // namespace

void SubjectProfile::validate() const {
  if (!(cadence_hz > 0.0)) throw std::invalid_argument("subject profile: cadence_hz must be > 0");
  if (torso_amp < 0.0 || limb_amp < 0.0) {
    throw std::invalid_argument("subject profile: amplitudes must be >= 0");
  }
  if (harmonic_weights.empty()) {
    throw std::invalid_argument("subject profile: harmonic_weights must be nonempty");
  }
  if (subject_id == kVacantLabel) throw std::invalid_argument("subject profile: id 0xFFFF is reserved");
}

std::size_t ScenarioConfig::packet_count() const {
  return static_cast<std::size_t>(std::llround(packets_per_second * duration_s));
}

void ScenarioConfig::validate() const {
  ris.validate();
  grid.validate();
  if (wall_attenuation_db < 0.0) throw std::invalid_argument("scenario: wall_attenuation_db must be >= 0");
  if (noise.variance < 0.0) throw std::invalid_argument("scenario: noise variance must be >= 0");
  if (!(packets_per_second > 0.0) || !(duration_s > 0.0) || packet_count() == 0) {
    throw std::invalid_argument("scenario: packet rate and duration must give at least one packet");
  }
}

TapList dynamic_taps(const SubjectProfile& profile, std::size_t path_count, double t,
                     std::uint64_t episode_seed) {
  if (t < 0.0) throw std::invalid_argument("dynamic_taps: t must be >= 0");
  profile.validate();
  return taps_at(build_state(profile, path_count, episode_seed), t);
}

CsiRecording render_recording(const std::optional<SubjectProfile>& profile,
                              const ScenarioConfig& scenario, const Codebook& codebook,
                              std::uint64_t episode_seed) {
  scenario.validate();
  if (profile) profile->validate();

  const double wall = std::pow(10.0, -scenario.wall_attenuation_db / 20.0);
  DirectChannel attenuated = scenario.direct;
  for (auto& tap : attenuated.taps) tap.amplitude *= wall;
  const TapList static_taps = combined_taps(attenuated, scenario.ris, codebook);
  const std::vector<Complex> static_response = frequency_response(static_taps, scenario.grid);

  double power = 0.0;
  for (const auto& h : static_response) power += std::norm(h);
  const double illumination = std::sqrt(power / static_cast<double>(static_response.size()));

  CsiRecording rec;
  rec.packets = scenario.packet_count();
  rec.subcarriers = scenario.grid.count;
  rec.magnitudes.resize(rec.packets * rec.subcarriers);
  rec.label = profile ? profile->subject_id : kVacantLabel;
  rec.scenario = scenario.name;
  rec.episode_seed = episode_seed;

  std::optional<GaitState> gait;
  if (profile) gait = build_state(*profile, scenario.dynamic_path_count, episode_seed);

  Rng noise(hash_values(scenario.noise.seed, episode_seed, 0x4e));
  for (std::size_t i = 0; i < rec.packets; ++i) {
    const double t = static_cast<double>(i) / scenario.packets_per_second;
    std::vector<Complex> response = static_response;
    if (gait) {
      TapList dyn = taps_at(*gait, t);
      for (auto& tap : dyn) tap.amplitude *= illumination;
      const auto dyn_response = frequency_response(dyn, scenario.grid);
      for (std::size_t k = 0; k < response.size(); ++k) response[k] += dyn_response[k];
    }
    for (std::size_t k = 0; k < response.size(); ++k) {
      Complex h = response[k];
      if (scenario.noise.variance > 0.0) h += noise.circular_normal(scenario.noise.variance);
      rec.at(i, k) = std::abs(h);
    }
  }
  return rec;
}

std::uint64_t episode_seed_for(std::uint64_t base_seed, std::uint16_t subject_id, std::size_t index) {
  return hash_values(base_seed, subject_id, index);
}

std::vector<CsiRecording> generate_dataset(const std::vector<SubjectProfile>& profiles,
                                           const ScenarioConfig& scenario,
                                           const Codebook& codebook,
                                           std::size_t episodes_per_subject,
                                           std::uint64_t base_seed) {
  if (episodes_per_subject < 1) throw std::invalid_argument("generate_dataset: episodes_per_subject must be >= 1");
  std::vector<CsiRecording> out;
  out.reserve(profiles.size() * episodes_per_subject);
  for (const auto& profile : profiles) {
    for (std::size_t e = 0; e < episodes_per_subject; ++e) {
      out.push_back(render_recording(profile, scenario, codebook,
                                     episode_seed_for(base_seed, profile.subject_id, e)));
    }
  }
  return out;
}

std::vector<SubjectProfile> default_profiles(std::size_t count, std::uint64_t seed) {
  std::vector<SubjectProfile> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(hash_values(seed, i, 0x50));
    SubjectProfile p;
    p.subject_id = static_cast<std::uint16_t>(i);
    // Spread cadences over 0.8-1.2 Hz so neighbours stay distinguishable.
    const double slot = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.5;
    p.cadence_hz = 0.8 + 0.4 * slot + rng.uniform(-0.03, 0.03);
    p.torso_amp = rng.uniform(0.3, 0.6);
    p.limb_amp = rng.uniform(0.1, 0.3);
    p.harmonic_weights = {rng.uniform(0.3, 0.7), rng.uniform(0.1, 0.4), rng.uniform(0.0, 0.2)};
    p.signature_seed = hash_values(seed, i, 0x53);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace trgr
