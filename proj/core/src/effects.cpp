#include "tensorgen/effects.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_set>
#include <utility>

#include "tensorgen/errors.hpp"

namespace tensorgen {

namespace {

constexpr std::uint64_t kModeTag = 0x6d6f6465ULL;
constexpr std::uint64_t kWeightTag = 0x77676874ULL;
constexpr std::uint64_t kNoiseTag = 0x6e6f6973ULL;
constexpr std::uint64_t kPositionTag = 0x706f7321ULL;
constexpr std::uint64_t kBasisTag = 0x62617369ULL;
constexpr std::uint64_t kCountTag = 0x636e7473ULL;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ParameterError(std::string(what) + " must be finite");
}

/// Floyd's algorithm: k distinct values from {0, ..., n-1}, returned sorted.
std::vector<Index> sample_without_replacement(Index n, Index k, RngStream& rng) {
  std::unordered_set<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  for (Index j = n - k; j < n; ++j) {
    const Index pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(pick).second) chosen.insert(j);
  }
  std::vector<Index> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

double tensor_power(const DenseTensor& t) {
  double sum = 0.0;
  for (Index p = 0; p < t.numel(); ++p) sum += t[p] * t[p];
  return sum / static_cast<double>(t.numel());
}

double snr_sigma(double snr_db, double power) {
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
    throw ParameterError("snr_db must be a number or +inf");
  if (power <= 0.0)
    throw NumericalError("signal power is zero; the noise level cannot be calibrated");
  return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

}  // namespace

// ---------------------------------------------------------------------------
// Change points

std::string to_string(ChangePointClass c) {
  switch (c) {
    case ChangePointClass::singular_outlier: return "singular_outlier";
    case ChangePointClass::temporary_change: return "temporary_change";
    case ChangePointClass::structural_shift: return "structural_shift";
  }
  throw ParameterError("unknown change point class");
}

ChangePointResult apply_change_point(const Matrix& factor, const ChangePointSpec& spec) {
  const Index rows = factor.rows();
  const Index cols = factor.cols();
  if (spec.column < 0 || spec.column >= cols)
    throw ParameterError("change point column out of range");
  if (spec.start < 0 || spec.end >= rows || spec.start > spec.end)
    throw ParameterError("change point window must satisfy 0 <= start <= end < rows");
  require_finite(spec.magnitude, "change point magnitude");

  ChangePointResult result;
  result.factor = factor;
  for (Index t = spec.start; t <= spec.end; ++t)
    result.factor(t, spec.column) += spec.magnitude;

  if (spec.start == spec.end)
    result.classification = ChangePointClass::singular_outlier;
  else if (spec.end == rows - 1)
    result.classification = ChangePointClass::structural_shift;
  else
    result.classification = ChangePointClass::temporary_change;
  return result;
}

double default_change_magnitude(const Matrix& factor, Index column) {
  const Index rows = factor.rows();
  if (column < 0 || column >= factor.cols())
    throw ParameterError("change point column out of range");
  if (rows < 2) return 0.0;
  const auto col = factor.col(column);
  const double mean = col.mean();
  const double var = (col.array() - mean).square().sum() / static_cast<double>(rows - 1);
  return 3.0 * std::sqrt(var);
}

// ---------------------------------------------------------------------------
// Anomalies

AnomalyResult inject_anomaly(const DenseTensor& host, const AnomalySpec& spec,
                             const RngStream& rng) {
  const Shape& shape = host.shape();
  const Index order = shape.order();
  if (static_cast<Index>(spec.block.size()) != order)
    throw ParameterError("anomaly block must give one index range per mode");
  std::vector<Index> block_dims(spec.block.size());
  for (Index n = 0; n < order; ++n) {
    const IndexRange& r = spec.block[static_cast<std::size_t>(n)];
    if (r.begin < 0 || r.end > shape.dim(n) || r.begin >= r.end)
      throw ParameterError("anomaly block range is empty or outside the tensor");
    block_dims[static_cast<std::size_t>(n)] = r.end - r.begin;
  }
  if (spec.rank < 1) throw ParameterError("anomaly rank must be >= 1");
  require_finite(spec.amplitude, "anomaly amplitude");
  if (spec.amplitude <= 0.0) throw ParameterError("anomaly amplitude must be > 0");

  Shape block_shape(block_dims);
  AnomalyResult result;
  result.block_model.factors.reserve(static_cast<std::size_t>(order));
  for (Index n = 0; n < order; ++n) {
    auto mode_rng = rng.substream({kModeTag, static_cast<std::uint64_t>(n)});
    result.block_model.factors.push_back(
        gen_factor(block_shape.dim(n), spec.rank, spec.generator, mode_rng));
  }
  result.block_model.lambda =
      gen_weights(spec.weight_method, spec.rank, spec.weight_values, rng.substream({kWeightTag}));

  DenseTensor block = cp_reconstruct(result.block_model);

  // Norm of the host entries about to be overwritten.
  const std::vector<Index> strides = shape.strides();
  Index base = 0;
  for (Index n = 0; n < order; ++n)
    base += spec.block[static_cast<std::size_t>(n)].begin * strides[static_cast<std::size_t>(n)];

  std::vector<Index> offset(static_cast<std::size_t>(order), 0);
  double replaced_sq = 0.0;
  for (Index p = 0; p < block_shape.numel(); ++p) {
    Index host_linear = base;
    for (Index n = 0; n < order; ++n)
      host_linear += offset[static_cast<std::size_t>(n)] * strides[static_cast<std::size_t>(n)];
    const double v = host[host_linear];
    replaced_sq += v * v;
    for (Index n = order - 1; n >= 0; --n) {
      auto& o = offset[static_cast<std::size_t>(n)];
      if (++o < block_shape.dim(n)) break;
      o = 0;
    }
  }
  result.replaced_norm = std::sqrt(replaced_sq);

  double target = spec.amplitude * result.replaced_norm;
  if (result.replaced_norm == 0.0) {
    const double volume_ratio =
        static_cast<double>(block_shape.numel()) / static_cast<double>(shape.numel());
    target = spec.amplitude * frobenius_norm(host) * std::sqrt(volume_ratio);
  }
  const double raw_norm = frobenius_norm(block);
  result.scale = raw_norm > 0.0 ? target / raw_norm : 1.0;
  if (!std::isfinite(result.scale))
    throw NumericalError("anomaly rescaling produced a non-finite factor");

  // Fold the scale into the ground-truth weights so the recorded model
  // reconstructs exactly what was written.
  result.block_model.lambda *= result.scale;

  result.tensor = host;
  std::fill(offset.begin(), offset.end(), 0);
  double injected_sq = 0.0;
  for (Index p = 0; p < block_shape.numel(); ++p) {
    Index host_linear = base;
    for (Index n = 0; n < order; ++n)
      host_linear += offset[static_cast<std::size_t>(n)] * strides[static_cast<std::size_t>(n)];
    const double v = block[p] * result.scale;
    result.tensor[host_linear] = v;
    injected_sq += v * v;
    for (Index n = order - 1; n >= 0; --n) {
      auto& o = offset[static_cast<std::size_t>(n)];
      if (++o < block_shape.dim(n)) break;
      o = 0;
    }
  }
  result.injected_norm = std::sqrt(injected_sq);
  return result;
}

// ---------------------------------------------------------------------------
// Noise

AwgnResult add_awgn(const DenseTensor& t, double snr_db, const RngStream& rng) {
  AwgnResult result;
  result.signal_power = tensor_power(t);
  if (snr_db == std::numeric_limits<double>::infinity()) {
    result.tensor = t;
    result.sigma = 0.0;
    return result;
  }
  result.sigma = snr_sigma(snr_db, result.signal_power);
  result.tensor = t;
  auto noise = rng.substream({kNoiseTag});
  for (Index p = 0; p < result.tensor.numel(); ++p)
    result.tensor[p] += result.sigma * noise.normal();
  return result;
}

SparseNoiseResult add_sparse_noise(const DenseTensor& t, double snr_db, double density,
                                   const RngStream& rng) {
  require_finite(density, "sparse noise density");
  if (density <= 0.0 || density > 1.0)
    throw ParameterError("sparse noise density must be within (0, 1]");

  SparseNoiseResult result;
  result.signal_power = tensor_power(t);
  if (snr_db == std::numeric_limits<double>::infinity()) {
    result.tensor = t;
    result.sigma = 0.0;
    return result;
  }
  result.sigma = snr_sigma(snr_db, result.signal_power);
  result.tensor = t;

  const Index k = static_cast<Index>(std::llround(density * static_cast<double>(t.numel())));
  if (k == 0) return result;
  auto pos_rng = rng.substream({kPositionTag});
  result.positions = sample_without_replacement(t.numel(), k, pos_rng);
  auto noise = rng.substream({kNoiseTag});
  for (Index p : result.positions) result.tensor[p] += result.sigma * noise.normal();
  return result;
}

FactorNoiseResult add_factor_noise(const std::vector<Matrix>& factors, double eta,
                                   const RngStream& rng) {
  require_finite(eta, "factor noise level");
  if (eta < 0.0) throw ParameterError("factor noise level must be >= 0");

  FactorNoiseResult result;
  result.factors = factors;
  result.sigmas.resize(factors.size(), 0.0);
  if (eta == 0.0) return result;
  for (std::size_t n = 0; n < factors.size(); ++n) {
    Matrix& u = result.factors[n];
    const double numel = static_cast<double>(u.rows()) * static_cast<double>(u.cols());
    if (numel == 0.0) continue;
    const double sigma = eta * u.norm() / std::sqrt(numel);
    result.sigmas[n] = sigma;
    if (sigma == 0.0) continue;
    auto noise = rng.substream({kModeTag, static_cast<std::uint64_t>(n)});
    for (Index r = 0; r < u.rows(); ++r)
      for (Index c = 0; c < u.cols(); ++c) u(r, c) += sigma * noise.normal();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Constraints

std::vector<Matrix> apply_nonneg(const std::vector<Matrix>& factors) {
  std::vector<Matrix> out;
  out.reserve(factors.size());
  for (const Matrix& u : factors) out.push_back(u.cwiseAbs());
  return out;
}

DenseTensor apply_nonneg(const DenseTensor& t) {
  DenseTensor out = t;
  for (Index p = 0; p < out.numel(); ++p) out[p] = std::max(out[p], 0.0);
  return out;
}

namespace {

/// Lower Cholesky factor of K = (1-c)I + c*ones. The admissible interval
/// (-1/(R-1), 1) is exactly where K is positive definite.
Matrix equicorrelation_chol(Index cols, double c) {
  require_finite(c, "column parameter c");
  if (cols >= 2 && (c <= -1.0 / static_cast<double>(cols - 1) || c >= 1.0))
    throw ParameterError(
        "column parameter c must lie in (-1/(R-1), 1) for a positive definite Gram matrix");
  Matrix k = Matrix::Constant(cols, cols, c);
  k.diagonal().setConstant(1.0);
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success)
    throw NumericalError("Cholesky factorization of the Gram matrix failed");
  return llt.matrixL();
}

}  // namespace

Matrix impose_congruence(Index rows, Index cols, double c, const RngStream& rng) {
  if (cols < 1) throw ParameterError("column count must be >= 1");
  if (rows < cols)
    throw ParameterError("congruent columns require rows >= cols");
  const Matrix l = equicorrelation_chol(cols, c);
  const Matrix q = gen_orthogonal(rows, cols, rng.substream({kBasisTag}));
  return q * l.transpose();
}

Matrix impose_correlation(Index rows, Index cols, double c, const RngStream& rng) {
  if (cols < 1) throw ParameterError("column count must be >= 1");
  if (rows < 2) throw ParameterError("correlated columns require rows >= 2");
  const Matrix l = equicorrelation_chol(cols, c);
  const Matrix z = gen_multi_normal(rows, cols, rng.substream({kBasisTag}));
  return z * l.transpose();
}

NormalizeResult normalize_tensor(const DenseTensor& t) {
  NormalizeResult result;
  result.original_norm = frobenius_norm(t);
  if (result.original_norm == 0.0)
    throw NumericalError("the zero tensor cannot be normalized");
  result.scale = 1.0 / result.original_norm;
  result.tensor = t;
  for (Index p = 0; p < result.tensor.numel(); ++p) result.tensor[p] /= result.original_norm;
  return result;
}

namespace {

bool column_leads_negative(const Matrix& u, Index col) {
  Index arg = 0;
  double best = -1.0;
  for (Index r = 0; r < u.rows(); ++r) {
    const double mag = std::abs(u(r, col));
    if (mag > best) {
      best = mag;
      arg = r;
    }
  }
  return u(arg, col) < 0.0;
}

}  // namespace

CpModel sign_fix(const CpModel& model) {
  model.validate();
  CpModel out = model;
  const Index order = out.order();
  const Index last = order - 1;
  for (Index r = 0; r < out.rank(); ++r) {
    for (Index n = 0; n < last; ++n) {
      if (column_leads_negative(out.factors[static_cast<std::size_t>(n)], r)) {
        out.factors[static_cast<std::size_t>(n)].col(r) *= -1.0;
        out.factors[static_cast<std::size_t>(last)].col(r) *= -1.0;
      }
    }
    if (column_leads_negative(out.factors[static_cast<std::size_t>(last)], r)) {
      out.factors[static_cast<std::size_t>(last)].col(r) *= -1.0;
      out.lambda[r] = -out.lambda[r];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparsity

namespace {

void require_drop_fraction(double f) {
  require_finite(f, "drop fraction");
  if (f < 0.0 || f >= 1.0) throw ParameterError("drop fraction must be within [0, 1)");
}

}  // namespace

SparsifyMatrixResult sparsify(const Matrix& m, double drop_fraction, const RngStream& rng) {
  require_drop_fraction(drop_fraction);
  SparsifyMatrixResult result;
  result.matrix = m;
  std::vector<Index> nonzero;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      if (m(r, c) != 0.0) nonzero.push_back(r * m.cols() + c);
  const Index k = static_cast<Index>(
      std::llround(drop_fraction * static_cast<double>(nonzero.size())));
  if (k == 0) return result;
  auto pos_rng = rng.substream({kPositionTag});
  for (Index i : sample_without_replacement(static_cast<Index>(nonzero.size()), k, pos_rng)) {
    const Index p = nonzero[static_cast<std::size_t>(i)];
    result.matrix(p / m.cols(), p % m.cols()) = 0.0;
    result.positions.push_back(p);
  }
  return result;
}

SparsifyTensorResult sparsify(const DenseTensor& t, double drop_fraction, const RngStream& rng) {
  require_drop_fraction(drop_fraction);
  SparsifyTensorResult result;
  result.tensor = t;
  std::vector<Index> nonzero;
  for (Index p = 0; p < t.numel(); ++p)
    if (t[p] != 0.0) nonzero.push_back(p);
  const Index k = static_cast<Index>(
      std::llround(drop_fraction * static_cast<double>(nonzero.size())));
  if (k == 0) return result;
  auto pos_rng = rng.substream({kPositionTag});
  for (Index i : sample_without_replacement(static_cast<Index>(nonzero.size()), k, pos_rng)) {
    const Index p = nonzero[static_cast<std::size_t>(i)];
    result.tensor[p] = 0.0;
    result.positions.push_back(p);
  }
  return result;
}

SparseTensor poisson_sample(const DenseTensor& rates, const RngStream& rng) {
  for (Index p = 0; p < rates.numel(); ++p) {
    const double rate = rates[p];
    if (!std::isfinite(rate) || rate < 0.0)
      throw NumericalError("Poisson rates must be finite and non-negative");
  }
  auto draws = rng.substream({kCountTag});
  std::vector<SparseEntry> entries;
  for (Index p = 0; p < rates.numel(); ++p) {
    const double rate = rates[p];
    if (rate == 0.0) continue;
    const std::int64_t count = draws.poisson(rate);
    if (count == 0) continue;
    entries.push_back({rates.shape().unravel(p), static_cast<double>(count)});
  }
  return SparseTensor(rates.shape(), std::move(entries));
}

PoissonCountResult gen_poisson_count(const Shape& shape, Index rank,
                                     const GammaParams& params, const RngStream& rng) {
  if (rank < 1) throw ParameterError("rank must be >= 1");
  PoissonCountResult result;
  result.rate_model.factors.reserve(static_cast<std::size_t>(shape.order()));
  for (Index n = 0; n < shape.order(); ++n) {
    auto mode_rng = rng.substream({kModeTag, static_cast<std::uint64_t>(n)});
    result.rate_model.factors.push_back(gen_gamma(shape.dim(n), rank, params, mode_rng));
  }
  result.rate_model.lambda = Vector::Ones(rank);
  const DenseTensor rates = cp_reconstruct(result.rate_model);
  result.counts = poisson_sample(rates, rng);
  return result;
}

}  // namespace tensorgen
