#include "climd/kernels.hpp"

#include <arm_neon.h>

namespace climd::kernels::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void affine_neon(const double* weight, const double* bias, const double* x, double* y,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = bias[r] + dot_neon(weight + r * cols, x, cols);
}

void affine_transpose_acc_neon(const double* weight, const double* x, double* y, std::size_t rows,
                               std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_neon(x[r], weight + r * cols, y, cols);
}

void rank1_update_neon(double* weight, double alpha, const double* a, const double* b,
                       std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_neon(alpha * a[r], b, weight + r * cols, cols);
}

constexpr KernelTable kNeon{
    Isa::neon, dot_neon, affine_neon, affine_transpose_acc_neon, rank1_update_neon, axpy_neon,
};

}  // namespace

const KernelTable& neon_table() { return kNeon; }

}  // namespace climd::kernels::detail
