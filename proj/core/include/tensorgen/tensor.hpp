#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tensorgen {

using Index = std::int64_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Extent of a tensor: one positive size per mode, at least two modes.
/// The element count is validated to fit the platform index range.
class Shape {
 public:
  Shape() = default;
  explicit Shape(std::vector<Index> dims);

  Index order() const noexcept { return static_cast<Index>(dims_.size()); }
  Index dim(Index mode) const { return dims_.at(static_cast<std::size_t>(mode)); }
  const std::vector<Index>& dims() const noexcept { return dims_; }
  Index numel() const noexcept { return numel_; }

  /// Row-major strides (last mode fastest).
  std::vector<Index> strides() const;

  /// Row-major linearization of a (0-based) index tuple; bounds-checked.
  Index linear_index(std::span<const Index> index) const;

  /// Inverse of linear_index.
  std::vector<Index> unravel(Index linear) const;

  bool operator==(const Shape& other) const noexcept { return dims_ == other.dims_; }

 private:
  std::vector<Index> dims_;
  Index numel_ = 0;
};

/// Dense N-way array of float64 in row-major order.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape);  // zero-filled
  DenseTensor(Shape shape, std::vector<double> values);

  const Shape& shape() const noexcept { return shape_; }
  Index numel() const noexcept { return shape_.numel(); }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  const std::vector<double>& values() const noexcept { return values_; }

  double operator[](Index linear) const { return values_[static_cast<std::size_t>(linear)]; }
  double& operator[](Index linear) { return values_[static_cast<std::size_t>(linear)]; }

  double at(std::span<const Index> index) const { return values_[static_cast<std::size_t>(shape_.linear_index(index))]; }
  double& at(std::span<const Index> index) { return values_[static_cast<std::size_t>(shape_.linear_index(index))]; }

  bool all_finite() const;

 private:
  Shape shape_;
  std::vector<double> values_;
};

struct SparseEntry {
  std::vector<Index> index;
  double value = 0.0;
};

/// Coordinate-list sparse tensor. Entries are kept sorted lexicographically
/// by index tuple; duplicates and explicit zeros are rejected.
class SparseTensor {
 public:
  SparseTensor() = default;
  explicit SparseTensor(Shape shape) : shape_(std::move(shape)) {}
  SparseTensor(Shape shape, std::vector<SparseEntry> entries);

  const Shape& shape() const noexcept { return shape_; }
  const std::vector<SparseEntry>& entries() const noexcept { return entries_; }
  Index nnz() const noexcept { return static_cast<Index>(entries_.size()); }

  DenseTensor to_dense() const;

 private:
  Shape shape_;
  std::vector<SparseEntry> entries_;
};

/// Rank-R model: per-mode factor matrices (I_n x R) plus R component weights.
struct CpModel {
  std::vector<Matrix> factors;
  Vector lambda;

  Index order() const noexcept { return static_cast<Index>(factors.size()); }
  Index rank() const noexcept { return static_cast<Index>(lambda.size()); }
  Shape shape() const;

  /// Throws StructuralError if factor column counts or weight length disagree.
  void validate() const;
};

/// Core-coupled model: per-mode factor matrices (I_n x R_n) plus a dense
/// core tensor of shape (R_1, ..., R_N).
struct TuckerModel {
  std::vector<Matrix> factors;
  DenseTensor core;

  Index order() const noexcept { return static_cast<Index>(factors.size()); }
  std::vector<Index> ranks() const;
  Shape shape() const;

  void validate() const;
};

/// Dense reconstruction x(i_1..i_N) = sum_r lambda_r * prod_n U_n(i_n, r).
/// Summation order is fixed (components outermost) for reproducibility.
DenseTensor cp_reconstruct(const CpModel& model);

/// Dense reconstruction x(i..) = sum over core entries g(r..) * prod_n U_n(i_n, r_n),
/// core scanned in row-major order.
DenseTensor tucker_reconstruct(const TuckerModel& model);

double frobenius_norm(const DenseTensor& t);
double frobenius_norm(const SparseTensor& t);

/// Rescale every factor column to unit Euclidean norm, absorbing the norms
/// into the weights. Reconstruction is preserved. Throws DegenerateModelError
/// on an all-zero column.
CpModel normalize_cp(const CpModel& model);

/// Coordinate view keeping entries with |value| > zero_tol.
SparseTensor to_sparse(const DenseTensor& t, double zero_tol = 0.0);

}  // namespace tensorgen
