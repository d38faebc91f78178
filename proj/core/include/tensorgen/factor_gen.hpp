#pragma once

#include <span>
#include <string>
#include <vector>

#include "tensorgen/rng.hpp"
#include "tensorgen/tensor.hpp"

namespace tensorgen {

/// Parameters of the gamma factor generator. The column shape parameter is
/// drawn once per column as |Normal(mu, sigma2)|; sigma2 is a variance.
struct GammaParams {
  double mu = 0.1;
  double sigma2 = 0.1;
  double theta = 0.01;
};

enum class FactorMethod { gamma, multi_normal, uniform, orthogonal, stochastic, binary };

std::string to_string(FactorMethod method);
FactorMethod factor_method_from_string(const std::string& name);

/// Runtime description of one non-temporal factor generator.
struct FactorParams {
  FactorMethod method = FactorMethod::uniform;
  GammaParams gamma{};
  std::vector<double> mus;     // multi_normal per-column means; empty = all 0
  std::vector<double> sigmas;  // multi_normal per-column std devs; empty = all 1
};

// Every generator is a pure function of (arguments, rng seed): the stream
// handle is never consumed directly, only tagged substreams derived from it.
// Column c of any generated matrix depends only on the parent stream and c,
// so changing the column count never perturbs earlier columns.

/// Non-negative entries, i.i.d. Gamma(k_c, theta) per column with
/// k_c = |Normal(mu, sigma2)| drawn once per column (redrawn if exactly 0).
Matrix gen_gamma(Index rows, Index cols, const GammaParams& params, const RngStream& rng);

/// Column c i.i.d. Normal(mus[c], sigmas[c]^2). Spans must be empty (defaults)
/// or have exactly `cols` entries; negative sigmas are rejected.
Matrix gen_multi_normal(Index rows, Index cols, std::span<const double> mus,
                        std::span<const double> sigmas, const RngStream& rng);

/// Standard normal entries (the multi-normal defaults).
Matrix gen_multi_normal(Index rows, Index cols, const RngStream& rng);

/// i.i.d. Uniform[0,1) entries.
Matrix gen_uniform(Index rows, Index cols, const RngStream& rng);

/// Haar-uniform orthonormal columns: Gaussian matrix + QR, each column signed
/// by the corresponding diagonal entry of the triangular factor.
/// Requires rows >= cols.
Matrix gen_orthogonal(Index rows, Index cols, const RngStream& rng);

/// Uniform[0,1) matrix with every column rescaled to sum to one.
Matrix gen_stochastic(Index rows, Index cols, const RngStream& rng);

/// Exactly one 1 per row, in a uniformly chosen column; all other entries 0.
Matrix gen_binary(Index rows, Index cols, const RngStream& rng);

/// Dispatch on FactorParams::method.
Matrix gen_factor(Index rows, Index cols, const FactorParams& params, const RngStream& rng);

enum class WeightMethod { ones, uniform, normal, custom };

std::string to_string(WeightMethod method);
WeightMethod weight_method_from_string(const std::string& name);

/// Component weights for a CP model, or the flattened core for a Tucker
/// model (the caller reshapes row-major). custom_values is used only with
/// WeightMethod::custom and must then match `length`.
Vector gen_weights(WeightMethod method, Index length, std::span<const double> custom_values,
                   const RngStream& rng);

}  // namespace tensorgen
