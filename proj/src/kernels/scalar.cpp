#include <limits>

#include "bmg/kernels/kernels.hpp"

namespace bmg::kernels {
namespace {

void gather2_mul(double* out, const double* src, const std::int32_t* parent, const double* row,
                 const std::int32_t* idx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = src[parent[i]] * row[idx[i]];
}

void gather_mul_add(double* acc, const double* col, const std::int32_t* idx, const double* w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double prod = col[idx[i]] * w[i];
    acc[i] = acc[i] + prod;
  }
}

void scale_add(double* acc, double s, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double prod = s * x[i];
    acc[i] = acc[i] + prod;
  }
}

double max_value(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", gather2_mul, gather_mul_add, scale_add, max_value};
  return table;
}

}  // namespace bmg::kernels
