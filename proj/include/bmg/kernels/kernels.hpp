#pragma once

#include <cstddef>
#include <cstdint>

// Trace-table inner loops. Every variant performs the same multiplies and adds
// in the same order per element, so results match the scalar reference bit for bit.

namespace bmg::kernels {

struct KernelTable {
  const char* name;
  /// out[i] = src[parent[i]] * row[idx[i]]
  void (*gather2_mul)(double* out, const double* src, const std::int32_t* parent, const double* row,
                      const std::int32_t* idx, std::size_t n);
  /// acc[i] += col[idx[i]] * w[i]
  void (*gather_mul_add)(double* acc, const double* col, const std::int32_t* idx, const double* w, std::size_t n);
  /// acc[i] += s * x[i]
  void (*scale_add)(double* acc, double s, const double* x, std::size_t n);
  /// max_i x[i]; -inf for n = 0
  double (*max_value)(const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Best variant for this CPU. BMG_KERNELS=scalar forces the reference path.
const KernelTable& active_kernels();

}  // namespace bmg::kernels
