#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace multirank::kernels {

// Data-parallel primitives behind the boosting update, the renormalization,
// the candidate-edge scan of the stump search, and batch stump evaluation.
//
// The scalar table is the reference. SIMD variants must agree bit-for-bit on
// the elementwise ops (scale, scale_where, axpy_where, edge_combine,
// threshold_ge) and within reassociation tolerance on the reductions
// (reduce_sum, sum_where). Equivalence is enforced by tests/test_kernels.
struct Ops {
  const char* name;

  double (*reduce_sum)(const double* x, std::size_t n);
  // sum of x[i] over mask[i] != 0
  double (*sum_where)(const double* x, const std::uint8_t* mask, std::size_t n);
  // x[i] *= c
  void (*scale)(double* x, std::size_t n, double c);
  // x[i] *= c where mask[i] != 0
  void (*scale_where)(double* x, const std::uint8_t* mask, std::size_t n, double c);
  // y[i] += a where mask[i] != 0
  void (*axpy_where)(double* y, const std::uint8_t* mask, std::size_t n, double a);
  // out[i] = pos_above[i] * neg_total - pos_total * neg_above[i]
  void (*edge_combine)(const double* pos_above, const double* neg_above, std::size_t n,
                       double neg_total, double pos_total, double* out);
  // out[i] = present[i] ? (value[i] >= threshold) : fallback
  void (*threshold_ge)(const double* value, const std::uint8_t* present, std::size_t n,
                       double threshold, std::uint8_t fallback, std::uint8_t* out);
};

const Ops& scalar_ops();

bool avx2_supported();     // build supports it and the CPU reports it
const Ops& avx2_ops();     // valid only when avx2_supported()

// Active table. Defaults to the best supported variant; force() overrides
// with "auto", "scalar" or "avx2" (throws UsageError when unavailable).
const Ops& active();
void force(const std::string& which);

}  // namespace multirank::kernels
