#include "trgr/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "trgr/errors.hpp"
#include "trgr/rng.hpp"

namespace trgr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

void require_same_size(const RisChannel& ris, const Codebook& codebook, const char* op) {
  ris.validate();
  if (codebook.size() != ris.size()) {
    throw DimensionError(std::string(op) + ": codebook has " + std::to_string(codebook.size()) +
                         " elements, RIS channel has " + std::to_string(ris.size()));
  }
}

}  // namespace

double wrap_phase(double phase) {
  double p = std::fmod(phase, kTwoPi);
  if (p < 0.0) p += kTwoPi;
  // fmod of a tiny negative value can round back up to exactly 2pi.
  if (p >= kTwoPi) p = 0.0;
  return p;
}

MultipathComponent make_tap(double amplitude, double phase, double delay) {
  require_finite(amplitude, "tap amplitude");
  require_finite(phase, "tap phase");
  require_finite(delay, "tap delay");
  if (delay < 0.0) throw std::invalid_argument("tap delay must be >= 0");
  if (amplitude < 0.0) {
    amplitude = -amplitude;
    phase += std::numbers::pi;
  }
  return {amplitude, wrap_phase(phase), delay};
}

void RisChannel::validate() const {
  if (ris_to_rx.size() != tx_to_ris.size() || path_delays.size() != tx_to_ris.size()) {
    throw DimensionError("RIS channel: tx_to_ris/ris_to_rx/path_delays lengths " +
                         std::to_string(tx_to_ris.size()) + "/" + std::to_string(ris_to_rx.size()) +
                         "/" + std::to_string(path_delays.size()));
  }
}

void SubcarrierGrid::validate() const {
  if (count < 1) throw std::invalid_argument("subcarrier grid needs at least one subcarrier");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("subcarrier grid bandwidth must be > 0");
}

double SubcarrierGrid::frequency(std::size_t k) const {
  if (count == 1) return center_frequency;
  return center_frequency - bandwidth / 2.0 +
         static_cast<double>(k) * bandwidth / static_cast<double>(count - 1);
}

TapList combined_taps(const DirectChannel& direct, const RisChannel& ris, const Codebook& codebook) {
  require_same_size(ris, codebook, "combined_taps");
  TapList taps = direct.taps;
  taps.reserve(direct.taps.size() + ris.size());
  for (std::size_t n = 0; n < ris.size(); ++n) {
    const double amplitude =
        std::abs(ris.tx_to_ris[n]) * std::abs(ris.ris_to_rx[n]) * RisChannel::amplitude_shift;
    const double theta = codebook.bit(n) ? std::numbers::pi : 0.0;
    const double phase = std::arg(ris.tx_to_ris[n]) + std::arg(ris.ris_to_rx[n]) + theta;
    taps.push_back(make_tap(amplitude, phase, ris.path_delays[n]));
  }
  return taps;
}

std::vector<Complex> frequency_response(const TapList& taps, const SubcarrierGrid& grid) {
  grid.validate();
  std::vector<Complex> response(grid.count, Complex{0.0, 0.0});
  for (const auto& tap : taps) {
    if (tap.amplitude == 0.0) continue;
    const Complex base = std::polar(tap.amplitude, tap.phase);
    if (tap.delay == 0.0) {
      for (auto& v : response) v += base;
      continue;
    }
    for (std::size_t k = 0; k < grid.count; ++k) {
      // Reduce the rotation in cycles first: f*tau can be ~1e3 at 5.8 GHz.
      const double cycles = grid.frequency(k) * tap.delay;
      const double frac = cycles - std::floor(cycles);
      response[k] += base * std::polar(1.0, -kTwoPi * frac);
    }
  }
  return response;
}

Complex effective_gain(const RisChannel& ris, const Codebook& codebook) {
  require_same_size(ris, codebook, "effective_gain");
  Complex sum{0.0, 0.0};
  for (std::size_t n = 0; n < ris.size(); ++n) {
    sum += ris.ris_to_rx[n] * codebook.phase_factor(n) * ris.tx_to_ris[n];
  }
  return sum * RisChannel::amplitude_shift;
}

Complex received_signal(const RisChannel& ris, const Codebook& codebook, Complex x,
                        const NoiseSpec& noise) {
  if (noise.variance < 0.0) throw std::invalid_argument("noise variance must be >= 0");
  const Complex signal = effective_gain(ris, codebook) * x;
  if (noise.variance == 0.0) return signal;
  Rng rng(noise.seed);
  return signal + rng.circular_normal(noise.variance);
}

double snr(const RisChannel& ris, const Codebook& codebook, const NoiseSpec& noise) {
  if (!(noise.variance > 0.0)) {
    throw std::invalid_argument("snr: noise variance must be > 0");
  }
  return std::norm(effective_gain(ris, codebook)) / noise.variance;
}

ChannelDescription make_rich_scattering_channel(const RichScatteringSpec& spec) {
  ChannelDescription out;
  Rng rng(hash_values(spec.seed, 0x5243));

  // Exponential power-delay profile normalized to direct_power.
  if (spec.direct_paths > 0) {
    std::vector<double> delays(spec.direct_paths);
    std::vector<Complex> gains(spec.direct_paths);
    double total = 0.0;
    const double decay = spec.direct_max_delay / 3.0;
    for (std::size_t m = 0; m < spec.direct_paths; ++m) {
      delays[m] = m == 0 ? 0.0 : rng.uniform(0.0, spec.direct_max_delay);
      const double mean_power = std::exp(-delays[m] / std::max(decay, 1e-15));
      gains[m] = rng.circular_normal(mean_power);
      total += mean_power;
    }
    const double scale = std::sqrt(spec.direct_power / total);
    for (std::size_t m = 0; m < spec.direct_paths; ++m) {
      const Complex g = gains[m] * scale;
      out.direct.taps.push_back(make_tap(std::abs(g), std::arg(g), delays[m]));
    }
  }

  const std::size_t n = spec.ris_rows * spec.ris_cols;
  out.ris.tx_to_ris.resize(n);
  out.ris.ris_to_rx.resize(n);
  out.ris.path_delays.assign(n, spec.ris_delay);
  for (std::size_t i = 0; i < n; ++i) out.ris.tx_to_ris[i] = rng.circular_normal(spec.element_power);
  for (std::size_t i = 0; i < n; ++i) out.ris.ris_to_rx[i] = rng.circular_normal(spec.element_power);
  return out;
}

void to_json(nlohmann::json& j, const ChannelDescription& channel) {
  nlohmann::json direct = nlohmann::json::array();
  for (const auto& tap : channel.direct.taps) direct.push_back({tap.amplitude, tap.phase, tap.delay});
  auto complex_list = [](const std::vector<Complex>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : v) arr.push_back({c.real(), c.imag()});
    return arr;
  };
  j = nlohmann::json{
      {"direct", direct},
      {"ris",
       {{"tx_to_ris", complex_list(channel.ris.tx_to_ris)},
        {"ris_to_rx", complex_list(channel.ris.ris_to_rx)},
        {"delays", channel.ris.path_delays}}},
      {"noise", {{"variance", channel.noise.variance}, {"seed", channel.noise.seed}}},
  };
}

void from_json(const nlohmann::json& j, ChannelDescription& channel) {
  channel = ChannelDescription{};
  for (const auto& tap : j.value("direct", nlohmann::json::array())) {
    if (!tap.is_array() || tap.size() != 3) throw FormatError("channel JSON: direct taps are [amp, phase, delay]");
    channel.direct.taps.push_back(
        make_tap(tap[0].get<double>(), tap[1].get<double>(), tap[2].get<double>()));
  }
  auto complex_list = [](const nlohmann::json& arr) {
    std::vector<Complex> v;
    for (const auto& c : arr) {
      if (!c.is_array() || c.size() != 2) throw FormatError("channel JSON: complex gains are [re, im]");
      v.emplace_back(c[0].get<double>(), c[1].get<double>());
    }
    return v;
  };
  if (j.contains("ris")) {
    const auto& ris = j.at("ris");
    channel.ris.tx_to_ris = complex_list(ris.value("tx_to_ris", nlohmann::json::array()));
    channel.ris.ris_to_rx = complex_list(ris.value("ris_to_rx", nlohmann::json::array()));
    channel.ris.path_delays = ris.value("delays", std::vector<double>{});
    channel.ris.validate();
  }
  if (j.contains("noise")) {
    channel.noise.variance = j.at("noise").value("variance", 0.0);
    channel.noise.seed = j.at("noise").value("seed", std::uint64_t{0});
    if (channel.noise.variance < 0.0) throw FormatError("channel JSON: noise variance must be >= 0");
  }
}

}  // namespace trgr
