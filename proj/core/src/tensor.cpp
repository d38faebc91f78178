#include "tensorgen/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "tensorgen/errors.hpp"

namespace tensorgen {

Shape::Shape(std::vector<Index> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) {
    throw StructuralError("a tensor needs at least two modes, got " +
                          std::to_string(dims_.size()));
  }
  Index count = 1;
  for (std::size_t n = 0; n < dims_.size(); ++n) {
    const Index d = dims_[n];
    if (d < 1) {
      throw StructuralError("mode " + std::to_string(n) + " has non-positive size " +
                            std::to_string(d));
    }
    if (count > std::numeric_limits<Index>::max() / d) {
      throw StructuralError("element count overflows the index range");
    }
    count *= d;
  }
  numel_ = count;
}

std::vector<Index> Shape::strides() const {
  std::vector<Index> s(dims_.size(), 1);
  for (auto n = static_cast<Index>(dims_.size()) - 2; n >= 0; --n) {
    s[static_cast<std::size_t>(n)] =
        s[static_cast<std::size_t>(n + 1)] * dims_[static_cast<std::size_t>(n + 1)];
  }
  return s;
}

Index Shape::linear_index(std::span<const Index> index) const {
  if (static_cast<Index>(index.size()) != order()) {
    throw StructuralError("index tuple order mismatch");
  }
  Index linear = 0;
  for (std::size_t n = 0; n < dims_.size(); ++n) {
    const Index i = index[n];
    if (i < 0 || i >= dims_[n]) {
      throw StructuralError("index " + std::to_string(i) + " out of range for mode " +
                            std::to_string(n) + " of size " + std::to_string(dims_[n]));
    }
    linear = linear * dims_[n] + i;
  }
  return linear;
}

std::vector<Index> Shape::unravel(Index linear) const {
  if (linear < 0 || linear >= numel_) {
    throw StructuralError("linear index out of range");
  }
  std::vector<Index> index(dims_.size());
  for (auto n = static_cast<Index>(dims_.size()) - 1; n >= 0; --n) {
    const Index d = dims_[static_cast<std::size_t>(n)];
    index[static_cast<std::size_t>(n)] = linear % d;
    linear /= d;
  }
  return index;
}

DenseTensor::DenseTensor(Shape shape)
    : shape_(std::move(shape)), values_(static_cast<std::size_t>(shape_.numel()), 0.0) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (static_cast<Index>(values_.size()) != shape_.numel()) {
    throw StructuralError("value buffer length " + std::to_string(values_.size()) +
                          " does not match element count " + std::to_string(shape_.numel()));
  }
}

bool DenseTensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

SparseTensor::SparseTensor(Shape shape, std::vector<SparseEntry> entries)
    : shape_(std::move(shape)), entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    shape_.linear_index(e.index);  // bounds check
    if (e.value == 0.0) {
      throw StructuralError("sparse tensors store non-zero values only");
    }
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  const auto dup = std::adjacent_find(
      entries_.begin(), entries_.end(),
      [](const SparseEntry& a, const SparseEntry& b) { return a.index == b.index; });
  if (dup != entries_.end()) {
    throw StructuralError("duplicate sparse index tuple");
  }
}

DenseTensor SparseTensor::to_dense() const {
  DenseTensor out(shape_);
  for (const auto& e : entries_) {
    out.at(e.index) = e.value;
  }
  return out;
}

Shape CpModel::shape() const {
  std::vector<Index> dims;
  dims.reserve(factors.size());
  for (const auto& f : factors) {
    dims.push_back(f.rows());
  }
  return Shape(dims);
}

void CpModel::validate() const {
  if (factors.size() < 2) {
    throw StructuralError("a model needs at least two factor matrices");
  }
  if (lambda.size() < 1) {
    throw StructuralError("weight vector must have at least one component");
  }
  for (std::size_t n = 0; n < factors.size(); ++n) {
    if (factors[n].cols() != lambda.size()) {
      throw StructuralError("factor " + std::to_string(n) + " has " +
                            std::to_string(factors[n].cols()) + " columns, expected " +
                            std::to_string(lambda.size()));
    }
    if (factors[n].rows() < 1) {
      throw StructuralError("factor " + std::to_string(n) + " has no rows");
    }
  }
}

std::vector<Index> TuckerModel::ranks() const {
  std::vector<Index> r;
  r.reserve(factors.size());
  for (const auto& f : factors) {
    r.push_back(f.cols());
  }
  return r;
}

Shape TuckerModel::shape() const {
  std::vector<Index> dims;
  dims.reserve(factors.size());
  for (const auto& f : factors) {
    dims.push_back(f.rows());
  }
  return Shape(dims);
}

void TuckerModel::validate() const {
  if (factors.size() < 2) {
    throw StructuralError("a model needs at least two factor matrices");
  }
  if (core.shape().order() != order()) {
    throw StructuralError("core order " + std::to_string(core.shape().order()) +
                          " does not match factor count " + std::to_string(order()));
  }
  for (std::size_t n = 0; n < factors.size(); ++n) {
    if (core.shape().dim(static_cast<Index>(n)) != factors[n].cols()) {
      throw StructuralError("core mode " + std::to_string(n) + " has size " +
                            std::to_string(core.shape().dim(static_cast<Index>(n))) +
                            ", expected factor column count " +
                            std::to_string(factors[n].cols()));
    }
    if (factors[n].rows() < 1) {
      throw StructuralError("factor " + std::to_string(n) + " has no rows");
    }
  }
}

namespace {

// Row-major odometer step; returns false after the last tuple wraps to zero.
inline bool advance(std::vector<Index>& index, const std::vector<Index>& dims) {
  for (auto n = static_cast<Index>(dims.size()) - 1; n >= 0; --n) {
    auto& i = index[static_cast<std::size_t>(n)];
    if (++i < dims[static_cast<std::size_t>(n)]) {
      return true;
    }
    i = 0;
  }
  return false;
}

}  // namespace

DenseTensor cp_reconstruct(const CpModel& model) {
  model.validate();
  const Shape shape = model.shape();
  const auto& dims = shape.dims();
  const Index n_modes = model.order();
  DenseTensor out(shape);
  double* v = out.data();
  std::vector<Index> index(static_cast<std::size_t>(n_modes), 0);
  for (Index r = 0; r < model.rank(); ++r) {
    std::fill(index.begin(), index.end(), 0);
    for (Index p = 0; p < shape.numel(); ++p) {
      double term = model.lambda[r];
      for (Index n = 0; n < n_modes; ++n) {
        term *= model.factors[static_cast<std::size_t>(n)](index[static_cast<std::size_t>(n)], r);
      }
      v[p] += term;
      advance(index, dims);
    }
  }
  return out;
}

DenseTensor tucker_reconstruct(const TuckerModel& model) {
  model.validate();
  const Shape shape = model.shape();
  const auto& dims = shape.dims();
  const auto& core_dims = model.core.shape().dims();
  const Index n_modes = model.order();
  DenseTensor out(shape);
  double* v = out.data();
  std::vector<Index> core_index(static_cast<std::size_t>(n_modes), 0);
  std::vector<Index> index(static_cast<std::size_t>(n_modes), 0);
  for (Index q = 0; q < model.core.numel(); ++q) {
    const double g = model.core[q];
    std::fill(index.begin(), index.end(), 0);
    for (Index p = 0; p < shape.numel(); ++p) {
      double term = g;
      for (Index n = 0; n < n_modes; ++n) {
        term *= model.factors[static_cast<std::size_t>(n)](index[static_cast<std::size_t>(n)],
                                                           core_index[static_cast<std::size_t>(n)]);
      }
      v[p] += term;
      advance(index, dims);
    }
    advance(core_index, core_dims);
  }
  return out;
}

double frobenius_norm(const DenseTensor& t) {
  double sum = 0.0;
  for (Index p = 0; p < t.numel(); ++p) {
    sum += t[p] * t[p];
  }
  return std::sqrt(sum);
}

double frobenius_norm(const SparseTensor& t) {
  double sum = 0.0;
  for (const auto& e : t.entries()) {
    sum += e.value * e.value;
  }
  return std::sqrt(sum);
}

CpModel normalize_cp(const CpModel& model) {
  model.validate();
  CpModel out = model;
  for (Index r = 0; r < out.rank(); ++r) {
    double weight = 1.0;
    for (auto& factor : out.factors) {
      const double norm = factor.col(r).norm();
      if (norm == 0.0) {
        throw DegenerateModelError("cannot normalize an all-zero factor column");
      }
      factor.col(r) /= norm;
      weight *= norm;
    }
    out.lambda[r] *= weight;
  }
  return out;
}

SparseTensor to_sparse(const DenseTensor& t, double zero_tol) {
  if (zero_tol < 0.0) {
    throw ParameterError("zero_tol must be non-negative");
  }
  std::vector<SparseEntry> entries;
  for (Index p = 0; p < t.numel(); ++p) {
    if (std::abs(t[p]) > zero_tol) {
      entries.push_back({t.shape().unravel(p), t[p]});
    }
  }
  return SparseTensor(t.shape(), std::move(entries));
}

}  // namespace tensorgen
