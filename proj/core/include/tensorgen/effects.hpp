#pragma once

#include <string>
#include <vector>

#include "tensorgen/factor_gen.hpp"
#include "tensorgen/rng.hpp"
#include "tensorgen/tensor.hpp"

namespace tensorgen {

// ---------------------------------------------------------------------------
// Change points on a temporal factor column

enum class ChangePointClass { singular_outlier, temporary_change, structural_shift };

std::string to_string(ChangePointClass c);

/// Additive offset on rows [start, end] (inclusive) of one column.
struct ChangePointSpec {
  Index column = 0;
  Index start = 0;
  Index end = 0;
  double magnitude = 0.0;
};

struct ChangePointResult {
  Matrix factor;
  ChangePointClass classification;
};

ChangePointResult apply_change_point(const Matrix& factor, const ChangePointSpec& spec);

/// Default offset used when a config omits the magnitude: three sample
/// standard deviations of the target column.
double default_change_magnitude(const Matrix& factor, Index column);

// ---------------------------------------------------------------------------
// Anomaly injection: replace a contiguous block with a small CP tensor

/// Half-open per-mode range [begin, end).
struct IndexRange {
  Index begin = 0;
  Index end = 0;
};

struct AnomalySpec {
  std::vector<IndexRange> block;  // one range per mode, all non-empty
  Index rank = 1;
  double amplitude = 1.0;  // > 0; target block norm = amplitude * replaced norm
  FactorParams generator{};
  WeightMethod weight_method = WeightMethod::ones;
  std::vector<double> weight_values;
};

struct AnomalyResult {
  DenseTensor tensor;
  double replaced_norm = 0.0;  // Frobenius norm of the overwritten block
  double injected_norm = 0.0;  // Frobenius norm of the block written in
  double scale = 1.0;          // applied to the reconstructed block
  CpModel block_model;
};

/// The replaced block is rescaled to amplitude * ||old block||_F; when the old
/// block has zero norm the target falls back to
/// amplitude * ||host||_F * sqrt(block volume / host volume).
/// Entries outside the block are bit-identical to the input.
AnomalyResult inject_anomaly(const DenseTensor& host, const AnomalySpec& spec,
                             const RngStream& rng);

// ---------------------------------------------------------------------------
// Noise

struct AwgnResult {
  DenseTensor tensor;
  double sigma = 0.0;
  double signal_power = 0.0;  // ||t||_F^2 / numel, measured before adding noise
};

/// Additive white Gaussian noise with sigma = sqrt(P / 10^(snr_db/10)) where
/// P is the measured per-entry signal power. snr_db = +infinity is the
/// disabled sentinel and returns the input unchanged.
AwgnResult add_awgn(const DenseTensor& t, double snr_db, const RngStream& rng);

struct SparseNoiseResult {
  DenseTensor tensor;
  double sigma = 0.0;
  double signal_power = 0.0;
  std::vector<Index> positions;  // sorted linear indices that received noise
};

/// Noise at exactly round(density * numel) uniformly chosen positions; sigma
/// is calibrated from the whole tensor's power exactly as add_awgn.
SparseNoiseResult add_sparse_noise(const DenseTensor& t, double snr_db, double density,
                                   const RngStream& rng);

struct FactorNoiseResult {
  std::vector<Matrix> factors;
  std::vector<double> sigmas;  // per mode: eta * ||U||_F / sqrt(numel(U))
};

/// Elementwise Gaussian perturbation of every factor, scaled relative to each
/// factor's own Frobenius norm; modes use independent substreams.
FactorNoiseResult add_factor_noise(const std::vector<Matrix>& factors, double eta,
                                   const RngStream& rng);

// ---------------------------------------------------------------------------
// Constraints

/// Factors: elementwise absolute value (keeps magnitude structure).
std::vector<Matrix> apply_nonneg(const std::vector<Matrix>& factors);

/// Tensor: clamp at zero (abs of a reconstructed tensor has no model meaning).
DenseTensor apply_nonneg(const DenseTensor& t);

/// Matrix with unit-norm columns whose Gram matrix is exactly
/// (1-c)*I + c*ones: every pair of columns has congruence (cosine) c.
/// Requires rows >= cols and c inside (-1/(cols-1), 1).
Matrix impose_congruence(Index rows, Index cols, double c, const RngStream& rng);

/// Jointly Gaussian columns with population pairwise Pearson correlation c.
/// Requires rows >= 2 and c inside (-1/(cols-1), 1).
Matrix impose_correlation(Index rows, Index cols, double c, const RngStream& rng);

struct NormalizeResult {
  DenseTensor tensor;
  double original_norm = 0.0;
  double scale = 1.0;  // multiplier applied, 1/original_norm
};

/// Rescale to unit Frobenius norm; rejects the zero tensor.
NormalizeResult normalize_tensor(const DenseTensor& t);

/// Flip factor column signs so the largest-magnitude entry of every column
/// leads non-negative, compensating through the last mode and finally the
/// weights. Reconstruction is bit-identical.
CpModel sign_fix(const CpModel& model);

// ---------------------------------------------------------------------------
// Sparsity

struct SparsifyMatrixResult {
  Matrix matrix;
  std::vector<Index> positions;  // zeroed entries, row-major r*cols + c, sorted
};

/// Zero exactly round(drop_fraction * nnz) currently non-zero entries, chosen
/// uniformly without replacement. Surviving entries are bit-identical.
SparsifyMatrixResult sparsify(const Matrix& m, double drop_fraction, const RngStream& rng);

struct SparsifyTensorResult {
  DenseTensor tensor;
  std::vector<Index> positions;  // zeroed linear indices, sorted
};

SparsifyTensorResult sparsify(const DenseTensor& t, double drop_fraction, const RngStream& rng);

/// Sample an integer count tensor entrywise from Poisson(rates); zero counts
/// are dropped from the coordinate list. Rates must be finite and >= 0.
SparseTensor poisson_sample(const DenseTensor& rates, const RngStream& rng);

struct PoissonCountResult {
  SparseTensor counts;
  CpModel rate_model;
};

/// Gamma-distributed factors -> CP rate tensor -> entrywise Poisson counts.
/// Returns the counts and the ground-truth rate model.
PoissonCountResult gen_poisson_count(const Shape& shape, Index rank,
                                     const GammaParams& params, const RngStream& rng);

}  // namespace tensorgen
