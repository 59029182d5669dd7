#include "climd/kernels.hpp"

namespace climd::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void affine_scalar(const double* weight, const double* bias, const double* x, double* y,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = bias[r] + dot_scalar(weight + r * cols, x, cols);
  }
}

void affine_transpose_acc_scalar(const double* weight, const double* x, double* y, std::size_t rows,
                                 std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double xr = x[r];
    const double* row = weight + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
  }
}

void rank1_update_scalar(double* weight, double alpha, const double* a, const double* b,
                         std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double ar = alpha * a[r];
    double* row = weight + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += ar * b[c];
  }
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

constexpr KernelTable kScalar{
    Isa::scalar, dot_scalar, affine_scalar, affine_transpose_acc_scalar, rank1_update_scalar,
    axpy_scalar,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace climd::kernels
