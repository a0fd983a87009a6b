#include <doctest.h>

#include <cmath>
#include <numbers>

#include "trgr/gait.hpp"
#include "trgr/ris_optimizer.hpp"

using namespace trgr;

namespace {

constexpr double kPi = std::numbers::pi;

ScenarioConfig small_scenario(double variance, double wall_db = 30.0, std::size_t subcarriers = 32) {
  RichScatteringSpec rs;
  rs.ris_rows = 4;
  rs.ris_cols = 4;
  rs.seed = 3;
  const auto ch = make_rich_scattering_channel(rs);
  ScenarioConfig sc;
  sc.name = "test";
  sc.direct = ch.direct;
  sc.ris = ch.ris;
  sc.wall_attenuation_db = wall_db;
  sc.noise = {variance, 21};
  sc.grid.count = subcarriers;
  return sc;
}

std::vector<double> series(const CsiRecording& r, std::size_t s) {
  std::vector<double> v(r.packets);
  for (std::size_t t = 0; t < r.packets; ++t) v[t] = r.at(t, s);
  return v;
}

double variance(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double q = 0.0;
  for (double v : x) q += (v - m) * (v - m);
  return q / static_cast<double>(x.size());
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// |DFT| of the mean-removed series at bins 1..T/2.
std::vector<double> dft_magnitudes(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(n);
  std::vector<double> out;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double w = 2.0 * kPi * static_cast<double>(k * t) / static_cast<double>(n);
      re += (x[t] - m) * std::cos(w);
      im -= (x[t] - m) * std::sin(w);
    }
    out.push_back(std::hypot(re, im));
  }
  return out;
}

// Fluctuation spectrum averaged over subcarriers; invariant to gait start phase.
std::vector<double> fluctuation_spectrum(const CsiRecording& r) {
  std::vector<double> acc(r.packets / 2, 0.0);
  for (std::size_t s = 0; s < r.subcarriers; ++s) {
    const auto mags = dft_magnitudes(series(r, s));
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += mags[k];
  }
  return acc;
}

}  // namespace

TEST_CASE("dynamic_taps with zero amplitudes are all zero") {
  SubjectProfile p;
  p.torso_amp = 0.0;
  p.limb_amp = 0.0;
  for (double t : {0.0, 0.37, 2.9}) {
    const TapList taps = dynamic_taps(p, 4, t, 5);
    CHECK(taps.size() == 4);
    for (const auto& tap : taps) CHECK(tap.amplitude == 0.0);
  }
}

TEST_CASE("dynamic_taps is deterministic and seed dependent") {
  const auto profiles = default_profiles(2, 1);
  CHECK(dynamic_taps(profiles[0], 4, 1.25, 9) == dynamic_taps(profiles[0], 4, 1.25, 9));
  CHECK(dynamic_taps(profiles[0], 4, 1.25, 9) != dynamic_taps(profiles[0], 4, 1.25, 10));
  CHECK(dynamic_taps(profiles[0], 4, 1.25, 9) != dynamic_taps(profiles[1], 4, 1.25, 9));
  // Delays are a per-subject signature, not per-episode.
  const auto a = dynamic_taps(profiles[0], 4, 0.5, 1);
  const auto b = dynamic_taps(profiles[0], 4, 2.0, 2);
  for (std::size_t p = 0; p < 4; ++p) CHECK(a[p].delay == b[p].delay);
  CHECK(dynamic_taps(profiles[0], 0, 0.5, 1).empty());
}

TEST_CASE("dynamic tap amplitude has its dominant spectral peak at the cadence") {
  SubjectProfile p;
  p.cadence_hz = 1.0;
  p.harmonic_weights = {0.5};
  for (std::uint64_t episode = 0; episode < 10; ++episode) {
    for (std::size_t path = 0; path < 3; ++path) {
      std::vector<double> amp;
      for (std::size_t i = 0; i < 150; ++i) amp.push_back(dynamic_taps(p, 3, i / 50.0, episode)[path].amplitude);
      for (double a : amp) CHECK(a >= 0.0);
      const auto mags = dft_magnitudes(amp);
      const auto peak = std::max_element(mags.begin(), mags.end()) - mags.begin();
      // bin k+1 of a 3 s window is (k+1)/3 Hz
      CHECK((peak + 1) / 3.0 == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("vacant recordings at zero noise are constant in time") {
  const auto sc = small_scenario(0.0);
  const auto rec = render_recording(std::nullopt, sc, Codebook(4, 4), 7);
  CHECK(rec.packets == 150);
  CHECK(rec.subcarriers == 32);
  CHECK(rec.vacant());
  for (std::size_t t = 1; t < rec.packets; ++t)
    for (std::size_t s = 0; s < rec.subcarriers; ++s) CHECK(rec.at(t, s) == rec.at(0, s));
}

TEST_CASE("a subject with no dynamic paths renders as the vacant room") {
  auto sc = small_scenario(0.0);
  sc.dynamic_path_count = 0;
  const auto profiles = default_profiles(1, 4);
  const auto subject = render_recording(profiles[0], sc, Codebook(4, 4), 7);
  const auto vacant = render_recording(std::nullopt, sc, Codebook(4, 4), 7);
  CHECK(subject.magnitudes == vacant.magnitudes);
  CHECK(subject.label == profiles[0].subject_id);
}

TEST_CASE("recordings have the configured shape and non-negative entries") {
  auto sc = small_scenario(0.5);
  sc.packets_per_second = 20.0;
  sc.duration_s = 2.0;
  const auto rec = render_recording(default_profiles(1, 2)[0], sc, Codebook(4, 4), 3);
  CHECK(rec.packets == 40);
  CHECK(rec.magnitudes.size() == 40 * 32);
  for (double m : rec.magnitudes) CHECK(m >= 0.0);
  CHECK_THROWS(render_recording(std::nullopt, sc, Codebook(2, 2), 3));
}

TEST_CASE("subject presence raises the temporal variance over the vacant room") {
  const auto sc = small_scenario(0.0);
  const auto profiles = default_profiles(4, 8);
  const auto vacant = render_recording(std::nullopt, sc, Codebook(4, 4), 1);
  for (const auto& p : profiles) {
    const auto rec = render_recording(p, sc, Codebook(4, 4), 1);
    for (std::size_t s = 0; s < sc.grid.count; ++s) {
      CHECK(variance(series(rec, s)) > variance(series(vacant, s)));
    }
  }
}

TEST_CASE("episodes of one subject are more alike than episodes of different subjects") {
  const auto sc = small_scenario(0.0, 30.0, 64);
  const auto profiles = default_profiles(4, 9);
  double same = 0.0, other = 0.0;
  std::size_t wins = 0;
  const std::size_t trials = 20;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto& a = profiles[i % 4];
    const auto& b = profiles[(i + 1) % 4];
    const auto spec_a = fluctuation_spectrum(render_recording(a, sc, Codebook(4, 4), 11 + 100 * i));
    const auto spec_a2 = fluctuation_spectrum(render_recording(a, sc, Codebook(4, 4), 12 + 100 * i));
    const auto spec_b = fluctuation_spectrum(render_recording(b, sc, Codebook(4, 4), 13 + 100 * i));
    const double ca = correlation(spec_a, spec_a2);
    const double cb = correlation(spec_a, spec_b);
    same += ca;
    other += cb;
    wins += ca > cb;
  }
  CHECK(same / trials > other / trials);
  CHECK(wins >= 15);
}

TEST_CASE("generate_dataset balance, ordering and determinism") {
  const auto sc = small_scenario(0.2, 30.0, 8);
  const auto profiles = default_profiles(4, 5);
  const auto recs = generate_dataset(profiles, sc, Codebook(4, 4), 50, 77);
  REQUIRE(recs.size() == 200);
  std::vector<std::size_t> counts(4, 0);
  for (const auto& r : recs) ++counts.at(r.label);
  CHECK(counts == std::vector<std::size_t>{50, 50, 50, 50});
  for (std::size_t i = 0; i < 200; ++i) {
    CHECK(recs[i].label == profiles[i / 50].subject_id);
    CHECK(recs[i].episode_seed == episode_seed_for(77, profiles[i / 50].subject_id, i % 50));
    CHECK(recs[i].scenario == "test");
  }
  const auto again = generate_dataset(profiles, sc, Codebook(4, 4), 50, 77);
  for (std::size_t i = 0; i < 200; ++i) CHECK(again[i].magnitudes == recs[i].magnitudes);

  const auto single = generate_dataset({profiles[2]}, sc, Codebook(4, 4), 1, 77);
  REQUIRE(single.size() == 1);
  CHECK(single[0].label == profiles[2].subject_id);
  // Episode seeds do not depend on the position in the profile list.
  CHECK(single[0].magnitudes == recs[100].magnitudes);
}

TEST_CASE("profiles validate their invariants") {
  SubjectProfile p;
  CHECK_NOTHROW(p.validate());
  p.cadence_hz = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SubjectProfile{};
  p.harmonic_weights.clear();
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SubjectProfile{};
  p.limb_amp = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  const auto profiles = default_profiles(4, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(profiles[i].subject_id == i);
    // Cadence slots 0.8, 0.933, 1.067, 1.2 Hz with a small per-subject offset.
    CHECK(profiles[i].cadence_hz == doctest::Approx(0.8 + 0.4 * i / 3.0).epsilon(0.04));
    if (i > 0) CHECK(profiles[i].cadence_hz > profiles[i - 1].cadence_hz);
  }
}

TEST_CASE("optimized codebook raises mean per-subcarrier SNR behind a heavy wall") {
  const auto sc = small_scenario(0.05, 40.0, 32);
  const auto trace = optimize(make_snr_probe(sc.ris, {1.0, 0}), Codebook(4, 4));
  const auto profiles = default_profiles(2, 3);
  auto mean_snr = [&](const Codebook& cb) {
    double total = 0.0;
    for (const auto& p : profiles) {
      const auto rec = render_recording(p, sc, cb, 19);
      double power = 0.0;
      for (double m : rec.magnitudes) power += m * m;
      total += power / static_cast<double>(rec.magnitudes.size()) / sc.noise.variance;
    }
    return total / static_cast<double>(profiles.size());
  };
  CHECK(mean_snr(trace.best_codebook) > mean_snr(Codebook(4, 4)));
}
