#pragma once

#include <optional>

#include "tensorgen/config.hpp"
#include "tensorgen/manifest.hpp"
#include "tensorgen/tensor.hpp"

namespace tensorgen {

/// A generated dataset: the tensor in its chosen representation (exactly one
/// of dense/sparse is set), the ground-truth model (exactly one of cp/tucker),
/// and the manifest recording how everything was made.
struct Dataset {
  std::optional<DenseTensor> dense;
  std::optional<SparseTensor> sparse;
  std::optional<CpModel> cp;
  std::optional<TuckerModel> tucker;
  Manifest manifest;

  const Shape& shape() const;
  Index nnz() const;    // stored non-zero entries
  double norm() const;  // Frobenius norm of the stored tensor
};

/// Run the full deterministic pipeline described by a config: per-mode
/// factors, factor-stage effects, model assembly, model-stage effects,
/// reconstruction, tensor-stage effects, representation. Every random draw
/// comes from a substream derived from (seed, fixed tags), so the same
/// config and seed always produce the same dataset bit for bit.
Dataset generate(const GenConfig& config);

}  // namespace tensorgen
