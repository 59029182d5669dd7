#pragma once

// Double-precision inner-loop kernels with a scalar reference and SIMD
// variants chosen once at runtime from the host CPU.
//
// Matrices are row-major, `rows x cols`, contiguous.
//
// The environment variable CLIMD_SIMD (scalar | avx2 | neon) pins the
// variant; an unavailable request falls back to scalar.

#include <cstddef>
#include <span>
#include <string_view>

namespace climd::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y = W x + bias
  void (*affine)(const double* weight, const double* bias, const double* x, double* y,
                 std::size_t rows, std::size_t cols);
  // y += W^T x
  void (*affine_transpose_acc)(const double* weight, const double* x, double* y, std::size_t rows,
                               std::size_t cols);
  // W += alpha * a b^T
  void (*rank1_update)(double* weight, double alpha, const double* a, const double* b,
                       std::size_t rows, std::size_t cols);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();
bool isa_available(Isa isa);
/// Table for `isa`; throws ValidationError if the host cannot run it.
const KernelTable& table_for(Isa isa);

/// The table every call below goes through.
const KernelTable& active();
void set_active(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
void affine(std::span<const double> weight, std::span<const double> bias,
            std::span<const double> x, std::span<double> y);
void affine_transpose_acc(std::span<const double> weight, std::span<const double> x,
                          std::span<double> y);
void rank1_update(std::span<double> weight, double alpha, std::span<const double> a,
                  std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace detail {
#if defined(CLIMD_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(CLIMD_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace climd::kernels
