#include "multirank/kernels.hpp"

// Reference kernels. Plain loops, no reassociation; the SIMD variants are
// checked against these.

namespace multirank::kernels {
namespace {

double reduce_sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sum_where_scalar(const double* x, const std::uint8_t* mask, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) acc += x[i];
  }
  return acc;
}

void scale_scalar(double* x, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

void scale_where_scalar(double* x, const std::uint8_t* mask, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) x[i] *= c;
  }
}

void axpy_where_scalar(double* y, const std::uint8_t* mask, std::size_t n, double a) {
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) y[i] += a;
  }
}

void edge_combine_scalar(const double* pos_above, const double* neg_above, std::size_t n,
                         double neg_total, double pos_total, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = pos_above[i] * neg_total - pos_total * neg_above[i];
  }
}

void threshold_ge_scalar(const double* value, const std::uint8_t* present, std::size_t n,
                         double threshold, std::uint8_t fallback, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = present[i] ? static_cast<std::uint8_t>(value[i] >= threshold) : fallback;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{
      "scalar",           reduce_sum_scalar, sum_where_scalar,    scale_scalar,
      scale_where_scalar, axpy_where_scalar, edge_combine_scalar, threshold_ge_scalar,
  };
  return ops;
}

}  // namespace multirank::kernels
