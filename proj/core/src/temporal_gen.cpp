#include "tensorgen/temporal_gen.hpp"

#include <cmath>

#include "tensorgen/errors.hpp"

namespace tensorgen {

namespace {

constexpr std::uint64_t kWalkTag = 0x776c6bULL;

// Fractional part mapped into [0, 1); guards the x-just-below-zero case
// where x - floor(x) rounds up to 1.0.
inline double phase_fraction(double x) {
  const double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

}  // namespace

std::string to_string(Waveform w) {
  switch (w) {
    case Waveform::sine: return "sine";
    case Waveform::cosine: return "cosine";
    case Waveform::square: return "square";
    case Waveform::sawtooth: return "sawtooth";
  }
  return "unknown";
}

Waveform waveform_from_string(const std::string& name) {
  if (name == "sine") return Waveform::sine;
  if (name == "cosine") return Waveform::cosine;
  if (name == "square") return Waveform::square;
  if (name == "sawtooth") return Waveform::sawtooth;
  throw ParameterError("unknown waveform '" + name + "'");
}

Matrix gen_periodic(Index t_len, std::span<const WaveSpec> waves) {
  if (t_len < 2) {
    throw ParameterError("periodic factors need at least two time steps");
  }
  if (waves.empty()) {
    throw ParameterError("periodic factors need at least one wave");
  }
  for (const auto& w : waves) {
    if (!(w.frequency > 0.0) || !std::isfinite(w.frequency)) {
      throw ParameterError("wave frequency must be positive and finite");
    }
    if (!std::isfinite(w.amplitude) || !std::isfinite(w.phase)) {
      throw ParameterError("wave amplitude and phase must be finite");
    }
  }
  Matrix m(t_len, static_cast<Index>(waves.size()));
  for (Index c = 0; c < m.cols(); ++c) {
    const auto& w = waves[static_cast<std::size_t>(c)];
    for (Index t = 0; t < t_len; ++t) {
      const double turns =
          w.frequency * static_cast<double>(t) / static_cast<double>(t_len) +
          w.phase / (2.0 * M_PI);
      double value = 0.0;
      switch (w.waveform) {
        case Waveform::sine:
          value = std::sin(2.0 * M_PI * turns);
          break;
        case Waveform::cosine:
          value = std::cos(2.0 * M_PI * turns);
          break;
        case Waveform::square:
          value = phase_fraction(turns) < 0.5 ? 1.0 : -1.0;
          break;
        case Waveform::sawtooth:
          value = 2.0 * phase_fraction(turns) - 1.0;
          break;
      }
      m(t, c) = w.amplitude * value;
    }
  }
  return m;
}

std::vector<double> seasonal_preset(const std::string& name, Index cycle_length) {
  if (cycle_length < 1) {
    throw ParameterError("cycle_length must be positive");
  }
  const auto bump = [](double x, double center, double width) {
    const double z = (x - center) / width;
    return std::exp(-0.5 * z * z);
  };
  const auto length = static_cast<double>(cycle_length);
  std::vector<double> pattern(static_cast<std::size_t>(cycle_length));
  if (name == "single_peak") {
    for (Index i = 0; i < cycle_length; ++i) {
      pattern[static_cast<std::size_t>(i)] =
          bump(static_cast<double>(i), length / 2.0, length / 6.0);
    }
  } else if (name == "double_peak") {
    for (Index i = 0; i < cycle_length; ++i) {
      const auto x = static_cast<double>(i);
      pattern[static_cast<std::size_t>(i)] =
          bump(x, length / 3.0, length / 10.0) + bump(x, 2.0 * length / 3.0, length / 10.0);
    }
  } else {
    throw ParameterError("unknown seasonal preset '" + name + "'");
  }
  return pattern;
}

Vector gen_seasonal(Index t_len, const SeasonalSpec& spec) {
  if (t_len < 1) {
    throw ParameterError("seasonal factors need at least one time step");
  }
  if (spec.cycle_length < 1) {
    throw ParameterError("cycle_length must be positive");
  }
  if (spec.cycle_length > t_len) {
    throw ParameterError("cycle_length exceeds the time window");
  }
  if (static_cast<Index>(spec.pattern.size()) != spec.cycle_length) {
    throw ParameterError("seasonal pattern length must equal cycle_length");
  }
  if (!std::isfinite(spec.growth_rate)) {
    throw ParameterError("growth_rate must be finite");
  }
  Vector v(t_len);
  for (Index t = 0; t < t_len; ++t) {
    const Index cycle = t / spec.cycle_length;
    const Index pos = t % spec.cycle_length;
    v[t] = spec.pattern[static_cast<std::size_t>(pos)] *
           std::pow(1.0 + spec.growth_rate, static_cast<double>(cycle));
  }
  return v;
}

Matrix gen_streaming(Index t_len, Index cols, double epsilon,
                     const Eigen::RowVectorXd& init, const RngStream& rng) {
  if (t_len < 1 || cols < 1) {
    throw ParameterError("streaming factors need t_len >= 1 and cols >= 1");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ParameterError("epsilon must be within [0, 1]");
  }
  if (init.size() != cols) {
    throw ParameterError("streaming init row length must equal cols");
  }
  Matrix m(t_len, cols);
  m.row(0) = init;
  RngStream walk = rng.substream({kWalkTag});
  for (Index t = 1; t < t_len; ++t) {
    for (Index c = 0; c < cols; ++c) {
      m(t, c) = (1.0 - epsilon) * m(t - 1, c) + epsilon * walk.normal();
    }
  }
  return m;
}

}  // namespace tensorgen
