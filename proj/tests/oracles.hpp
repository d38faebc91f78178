#pragma once

// Reference implementations kept deliberately naive and separate from the
// library code paths, so the two can disagree when one of them is wrong.

#include <cstddef>
#include <cmath>
#include <vector>

#include "tensorgen/tensor.hpp"

namespace oracle {

using tensorgen::CpModel;
using tensorgen::DenseTensor;
using tensorgen::Index;
using tensorgen::Shape;
using tensorgen::TuckerModel;

/// Advance a mixed-radix counter one step; false once it wraps to all zeros.
inline bool advance(std::vector<Index>& idx, const std::vector<Index>& dims) {
  for (std::size_t n = dims.size(); n-- > 0;) {
    if (++idx[n] < dims[n]) return true;
    idx[n] = 0;
  }
  return false;
}

inline DenseTensor cp_dense(const CpModel& model) {
  const Shape shape = model.shape();
  DenseTensor out(shape);
  std::vector<Index> idx(static_cast<std::size_t>(shape.order()), 0);
  Index linear = 0;
  do {
    double value = 0.0;
    for (Index r = 0; r < model.rank(); ++r) {
      double term = model.lambda[r];
      for (std::size_t n = 0; n < idx.size(); ++n) term *= model.factors[n](idx[n], r);
      value += term;
    }
    out[linear++] = value;
  } while (advance(idx, shape.dims()));
  return out;
}

inline DenseTensor tucker_dense(const TuckerModel& model) {
  const Shape shape = model.shape();
  const std::vector<Index> ranks = model.ranks();
  DenseTensor out(shape);
  std::vector<Index> idx(static_cast<std::size_t>(shape.order()), 0);
  Index linear = 0;
  do {
    double value = 0.0;
    std::vector<Index> r(ranks.size(), 0);
    Index core_linear = 0;
    do {
      double term = model.core[core_linear++];
      for (std::size_t n = 0; n < idx.size(); ++n) term *= model.factors[n](idx[n], r[n]);
      value += term;
    } while (advance(r, ranks));
    out[linear++] = value;
  } while (advance(idx, shape.dims()));
  return out;
}

inline double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
  double worst = 0.0;
  for (Index i = 0; i < a.numel(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size());
}

inline double lag1_autocorr(const std::vector<double>& xs) {
  const double m = mean(xs);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    den += (xs[t] - m) * (xs[t] - m);
    if (t + 1 < xs.size()) num += (xs[t] - m) * (xs[t + 1] - m);
  }
  return num / den;
}

/// Centered Pearson correlation of two equal-length samples.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a);
  const double mb = mean(b);
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(va * vb);
}

}  // namespace oracle
