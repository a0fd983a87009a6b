#include "trgr/ris_optimizer.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "trgr/errors.hpp"
#include "trgr/rng.hpp"

namespace trgr {

ObjectiveProbe make_snr_probe(RisChannel ris, NoiseSpec noise) {
  ris.validate();
  ObjectiveProbe probe;
  probe.evaluate = [ris = std::move(ris), noise](const Codebook& cb) { return snr(ris, cb, noise); };
  return probe;
}

std::string OptimizationTrace::to_csv() const {
  std::ostringstream out;
  out << "t,i,kind,index,s_current,accepted\n";
  out << std::setprecision(17);
  for (const auto& s : iterations) {
    out << s.outer << ',' << s.inner << ',' << to_string(s.kind) << ',' << s.index << ','
        << s.s_current << ',' << (s.accepted ? 1 : 0) << '\n';
  }
  return out.str();
}

OptimizationTrace optimize(const ObjectiveProbe& probe, const Codebook& initial,
                           std::size_t outer_iters) {
  if (outer_iters < 1) throw std::invalid_argument("optimize: outer_iters must be >= 1");
  if (!probe.evaluate) throw std::invalid_argument("optimize: probe has no evaluate function");

  Rng noise(hash_values(probe.seed, 0x4f505449));
  auto measure = [&](const Codebook& cb) {
    double s = probe.evaluate(cb);
    if (probe.measurement_noise_std > 0.0) s += probe.measurement_noise_std * noise.normal();
    return s;
  };

  OptimizationTrace trace;
  Codebook current = initial;
  trace.initial_strength = measure(current);
  trace.best_codebook = current;
  trace.best_strength = trace.initial_strength;

  const bool noiseless = probe.measurement_noise_std == 0.0;
  double s_current = trace.initial_strength;
  const std::size_t visits = current.cols() + current.rows();
  for (std::size_t t = 1; t <= outer_iters; ++t) {
    for (std::size_t i = 1; i <= visits; ++i) {
      TraceStep step;
      step.outer = t;
      step.inner = i;
      if (i <= current.cols()) {
        step.kind = LineKind::column;
        step.index = i - 1;
      } else {
        step.kind = LineKind::row;
        step.index = i - 1 - current.cols();
      }

      // A noiseless probe returns the same value on re-measurement.
      if (!noiseless) s_current = measure(current);
      if (s_current > trace.best_strength) {
        trace.best_strength = s_current;
        trace.best_codebook = current;
      }

      Codebook candidate = line_flip(current, step.kind, step.index);
      const double s_candidate = measure(candidate);
      if (s_candidate > s_current) {
        current = std::move(candidate);
        s_current = s_candidate;
        step.accepted = true;
        if (s_current > trace.best_strength) {
          trace.best_strength = s_current;
          trace.best_codebook = current;
        }
      }
      step.s_current = s_current;
      trace.iterations.push_back(step);
    }
  }
  trace.final_codebook = current;
  return trace;
}

BruteForceResult brute_force(const ObjectiveProbe& probe, std::size_t rows, std::size_t cols) {
  const std::size_t n = rows * cols;
  if (n > kBruteForceMaxElements) {
    throw CapacityError("brute_force: " + std::to_string(n) + " elements exceeds cap of " +
                        std::to_string(kBruteForceMaxElements));
  }
  if (!probe.evaluate) throw std::invalid_argument("brute_force: probe has no evaluate function");
  BruteForceResult best{Codebook(rows, cols), probe.evaluate(Codebook(rows, cols))};
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t v = 1; v < total; ++v) {
    Codebook cb = Codebook::from_binary_value(rows, cols, v);
    const double s = probe.evaluate(cb);
    if (s > best.strength) best = {std::move(cb), s};
  }
  return best;
}

bool trace_is_monotone(const OptimizationTrace& trace) {
  double last_accepted = trace.initial_strength;
  double running_max = trace.initial_strength;
  for (const auto& s : trace.iterations) {
    if (s.accepted) {
      if (!(s.s_current > last_accepted)) return false;
      last_accepted = s.s_current;
    }
    running_max = std::max(running_max, s.s_current);
  }
  return trace.best_strength == running_max;
}

}  // namespace trgr
