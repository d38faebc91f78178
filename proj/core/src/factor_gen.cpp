#include "tensorgen/factor_gen.hpp"

#include <cmath>
#include <string>

#include "tensorgen/errors.hpp"

namespace tensorgen {

namespace {

constexpr std::uint64_t kColumnTag = 0x636f6cULL;  // per-column fill
constexpr std::uint64_t kRowTag = 0x726f77ULL;     // per-row choices (binary)

void check_dims(Index rows, Index cols) {
  if (rows < 1 || cols < 1) {
    throw ParameterError("factor matrices need at least one row and one column");
  }
}

}  // namespace

std::string to_string(FactorMethod method) {
  switch (method) {
    case FactorMethod::gamma: return "gamma";
    case FactorMethod::multi_normal: return "multi_normal";
    case FactorMethod::uniform: return "uniform";
    case FactorMethod::orthogonal: return "orthogonal";
    case FactorMethod::stochastic: return "stochastic";
    case FactorMethod::binary: return "binary";
  }
  return "unknown";
}

FactorMethod factor_method_from_string(const std::string& name) {
  if (name == "gamma") return FactorMethod::gamma;
  if (name == "multi_normal") return FactorMethod::multi_normal;
  if (name == "uniform") return FactorMethod::uniform;
  if (name == "orthogonal") return FactorMethod::orthogonal;
  if (name == "stochastic") return FactorMethod::stochastic;
  if (name == "binary") return FactorMethod::binary;
  throw ParameterError("unknown factor method '" + name + "'");
}

Matrix gen_gamma(Index rows, Index cols, const GammaParams& params, const RngStream& rng) {
  check_dims(rows, cols);
  if (!(params.sigma2 >= 0.0) || !std::isfinite(params.sigma2)) {
    throw ParameterError("gamma sigma2 must be a non-negative variance");
  }
  if (!(params.theta > 0.0) || !std::isfinite(params.theta)) {
    throw ParameterError("gamma theta must be positive");
  }
  if (!std::isfinite(params.mu)) {
    throw ParameterError("gamma mu must be finite");
  }
  const double sigma = std::sqrt(params.sigma2);
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    RngStream col = rng.substream({kColumnTag, static_cast<std::uint64_t>(c)});
    double shape = 0.0;
    do {
      shape = std::abs(params.mu + sigma * col.normal());
    } while (shape == 0.0);
    for (Index r = 0; r < rows; ++r) {
      m(r, c) = col.gamma(shape, params.theta);
    }
  }
  return m;
}

Matrix gen_multi_normal(Index rows, Index cols, std::span<const double> mus,
                        std::span<const double> sigmas, const RngStream& rng) {
  check_dims(rows, cols);
  if (!mus.empty() && static_cast<Index>(mus.size()) != cols) {
    throw ParameterError("multi_normal mus must have one entry per column");
  }
  if (!sigmas.empty() && static_cast<Index>(sigmas.size()) != cols) {
    throw ParameterError("multi_normal sigmas must have one entry per column");
  }
  for (const double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ParameterError("multi_normal sigmas must be non-negative");
    }
  }
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    const double mu = mus.empty() ? 0.0 : mus[static_cast<std::size_t>(c)];
    const double sigma = sigmas.empty() ? 1.0 : sigmas[static_cast<std::size_t>(c)];
    RngStream col = rng.substream({kColumnTag, static_cast<std::uint64_t>(c)});
    for (Index r = 0; r < rows; ++r) {
      m(r, c) = mu + sigma * col.normal();
    }
  }
  return m;
}

Matrix gen_multi_normal(Index rows, Index cols, const RngStream& rng) {
  return gen_multi_normal(rows, cols, {}, {}, rng);
}

Matrix gen_uniform(Index rows, Index cols, const RngStream& rng) {
  check_dims(rows, cols);
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    RngStream col = rng.substream({kColumnTag, static_cast<std::uint64_t>(c)});
    for (Index r = 0; r < rows; ++r) {
      m(r, c) = col.uniform();
    }
  }
  return m;
}

Matrix gen_orthogonal(Index rows, Index cols, const RngStream& rng) {
  check_dims(rows, cols);
  if (rows < cols) {
    throw ParameterError("orthogonal factors require rows >= cols");
  }
  const Matrix gauss = gen_multi_normal(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  return q;
}

Matrix gen_stochastic(Index rows, Index cols, const RngStream& rng) {
  Matrix m = gen_uniform(rows, cols, rng);
  for (Index c = 0; c < cols; ++c) {
    double sum = m.col(c).sum();
    if (sum == 0.0) {
      // Probability ~0; continue the column's stream past the used draws.
      RngStream col = rng.substream({kColumnTag, static_cast<std::uint64_t>(c)});
      for (Index r = 0; r < rows; ++r) {
        (void)col.uniform();
      }
      do {
        for (Index r = 0; r < rows; ++r) {
          m(r, c) = col.uniform();
        }
        sum = m.col(c).sum();
      } while (sum == 0.0);
    }
    m.col(c) /= sum;
  }
  return m;
}

Matrix gen_binary(Index rows, Index cols, const RngStream& rng) {
  check_dims(rows, cols);
  Matrix m = Matrix::Zero(rows, cols);
  RngStream choices = rng.substream({kRowTag});
  for (Index r = 0; r < rows; ++r) {
    m(r, static_cast<Index>(choices.below(static_cast<std::uint64_t>(cols)))) = 1.0;
  }
  return m;
}

Matrix gen_factor(Index rows, Index cols, const FactorParams& params, const RngStream& rng) {
  switch (params.method) {
    case FactorMethod::gamma:
      return gen_gamma(rows, cols, params.gamma, rng);
    case FactorMethod::multi_normal:
      return gen_multi_normal(rows, cols, params.mus, params.sigmas, rng);
    case FactorMethod::uniform:
      return gen_uniform(rows, cols, rng);
    case FactorMethod::orthogonal:
      return gen_orthogonal(rows, cols, rng);
    case FactorMethod::stochastic:
      return gen_stochastic(rows, cols, rng);
    case FactorMethod::binary:
      return gen_binary(rows, cols, rng);
  }
  throw ParameterError("unknown factor method");
}

std::string to_string(WeightMethod method) {
  switch (method) {
    case WeightMethod::ones: return "ones";
    case WeightMethod::uniform: return "uniform";
    case WeightMethod::normal: return "normal";
    case WeightMethod::custom: return "custom";
  }
  return "unknown";
}

WeightMethod weight_method_from_string(const std::string& name) {
  if (name == "ones") return WeightMethod::ones;
  if (name == "uniform") return WeightMethod::uniform;
  if (name == "normal") return WeightMethod::normal;
  if (name == "custom") return WeightMethod::custom;
  throw ParameterError("unknown weight method '" + name + "'");
}

Vector gen_weights(WeightMethod method, Index length, std::span<const double> custom_values,
                   const RngStream& rng) {
  if (length < 1) {
    throw ParameterError("weight vectors need at least one entry");
  }
  Vector v(length);
  switch (method) {
    case WeightMethod::ones:
      v.setOnes();
      break;
    case WeightMethod::uniform: {
      RngStream s = rng.substream({kColumnTag, 0});
      for (Index i = 0; i < length; ++i) {
        v[i] = s.uniform();
      }
      break;
    }
    case WeightMethod::normal: {
      RngStream s = rng.substream({kColumnTag, 0});
      for (Index i = 0; i < length; ++i) {
        v[i] = s.normal();
      }
      break;
    }
    case WeightMethod::custom: {
      if (static_cast<Index>(custom_values.size()) != length) {
        throw ParameterError("custom weights: got " + std::to_string(custom_values.size()) +
                             " values, expected " + std::to_string(length));
      }
      for (Index i = 0; i < length; ++i) {
        v[i] = custom_values[static_cast<std::size_t>(i)];
      }
      break;
    }
  }
  return v;
}

}  // namespace tensorgen
