#pragma once

#include <span>
#include <string>
#include <vector>

#include "tensorgen/rng.hpp"
#include "tensorgen/tensor.hpp"

namespace tensorgen {

enum class Waveform { sine, cosine, square, sawtooth };

std::string to_string(Waveform w);
Waveform waveform_from_string(const std::string& name);

/// One periodic column: amplitude * wave(2*pi*(frequency*t/T) + phase).
/// `frequency` counts cycles across the whole window of T steps.
struct WaveSpec {
  Waveform waveform = Waveform::sine;
  double frequency = 1.0;
  double amplitude = 1.0;
  double phase = 0.0;
};

/// T x |waves| matrix, column r sampled from waves[r] at t = 0..T-1.
/// Square is +amplitude on the first half of each cycle and -amplitude on
/// the second; sawtooth ramps linearly from -amplitude to +amplitude.
Matrix gen_periodic(Index t_len, std::span<const WaveSpec> waves);

/// Repeating pattern of length `cycle_length`, scaled by (1+growth_rate)
/// once per completed cycle. A trailing partial cycle is truncated.
struct SeasonalSpec {
  Index cycle_length = 1;
  std::vector<double> pattern;  // length == cycle_length
  double growth_rate = 0.0;
};

/// Materialize a named preset pattern ("single_peak" or "double_peak") as
/// Gaussian bumps over one cycle.
std::vector<double> seasonal_preset(const std::string& name, Index cycle_length);

/// Column of length T: pattern[t mod L] * (1+g)^floor(t/L).
Vector gen_seasonal(Index t_len, const SeasonalSpec& spec);

/// Random-walk rows: row 0 is `init`, then
/// row t+1 = (1-epsilon)*row t + epsilon*w_t with w_t standard normal.
/// epsilon = 0 freezes the walk; epsilon = 1 gives i.i.d. rows.
Matrix gen_streaming(Index t_len, Index cols, double epsilon,
                     const Eigen::RowVectorXd& init, const RngStream& rng);

}  // namespace tensorgen
