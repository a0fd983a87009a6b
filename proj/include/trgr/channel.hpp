#pragma once

// Multipath channel model: tapped-delay-line impulse response with a direct
// (wall-obstructed) part and a per-element RIS part, plus the narrowband
// received signal and SNR used as the RIS optimization objective.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "trgr/codebook.hpp"

namespace trgr {

using Complex = std::complex<double>;

/// One propagation path: amplitude >= 0, phase in [0, 2pi), delay >= 0 seconds.
struct MultipathComponent {
  double amplitude = 0.0;
  double phase = 0.0;
  double delay = 0.0;

  friend bool operator==(const MultipathComponent&, const MultipathComponent&) = default;
};

using TapList = std::vector<MultipathComponent>;

/// Builds a tap in canonical form. A negative amplitude is folded into the
/// phase; negative delays and non-finite values are rejected.
MultipathComponent make_tap(double amplitude, double phase, double delay);

/// Wraps an angle to [0, 2pi).
double wrap_phase(double phase);

/// Paths from Tx to Rx that bypass the RIS. Empty means fully blocked.
struct DirectChannel {
  TapList taps;
};

/// Rank-1 RIS channel: element n couples Tx->RIS gain tx_to_ris[n] and
/// RIS->Rx gain ris_to_rx[n], arriving with delay path_delays[n].
struct RisChannel {
  static constexpr double amplitude_shift = 1.0;

  std::vector<Complex> tx_to_ris;
  std::vector<Complex> ris_to_rx;
  std::vector<double> path_delays;

  std::size_t size() const { return tx_to_ris.size(); }
  /// Throws DimensionError when the three lists disagree.
  void validate() const;
};

struct NoiseSpec {
  double variance = 0.0;
  std::uint64_t seed = 0;
};

/// Uniform grid of S subcarriers spanning center +- bandwidth/2.
struct SubcarrierGrid {
  std::size_t count = 256;
  double center_frequency = 5.8e9;
  double bandwidth = 160e6;

  void validate() const;
  double frequency(std::size_t k) const;
};

/// JSON document form: {direct, ris: {tx_to_ris, ris_to_rx, delays}, noise}.
struct ChannelDescription {
  DirectChannel direct;
  RisChannel ris;
  NoiseSpec noise;
};

/// Direct taps followed by one tap per RIS element.
TapList combined_taps(const DirectChannel& direct, const RisChannel& ris, const Codebook& codebook);

/// H(f_k) = sum_i a_i e^{j phi_i} e^{-j 2 pi f_k tau_i}.
std::vector<Complex> frequency_response(const TapList& taps, const SubcarrierGrid& grid);

/// Noiseless effective gain h * Phi * H.
Complex effective_gain(const RisChannel& ris, const Codebook& codebook);

/// y = h Phi H x + w with w drawn from the seeded AWGN stream.
Complex received_signal(const RisChannel& ris, const Codebook& codebook, Complex x,
                        const NoiseSpec& noise);

/// rho = |h Phi H|^2 / sigma^2. Throws std::invalid_argument for sigma^2 == 0.
double snr(const RisChannel& ris, const Codebook& codebook, const NoiseSpec& noise);

/// Parameters for a seeded i.i.d. Rayleigh ("rich scattering") channel.
struct RichScatteringSpec {
  std::size_t ris_rows = 16;
  std::size_t ris_cols = 16;
  std::size_t direct_paths = 6;
  /// Total expected power of the direct taps before wall loss.
  double direct_power = 1.0;
  /// Expected power of a single element product tx_to_ris[n]*ris_to_rx[n]
  /// is element_power^2.
  double element_power = 1.0 / 16.0;
  double direct_max_delay = 100e-9;
  double ris_delay = 20e-9;
  std::uint64_t seed = 1;
};

/// Direct taps get an exponential power-delay profile; RIS element gains are
/// circular Gaussian with a common path delay.
ChannelDescription make_rich_scattering_channel(const RichScatteringSpec& spec);

void to_json(nlohmann::json& j, const ChannelDescription& channel);
void from_json(const nlohmann::json& j, ChannelDescription& channel);

}  // namespace trgr
