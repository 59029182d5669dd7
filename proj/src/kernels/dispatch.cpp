#include <atomic>
#include <cstdlib>
#include <string>

#include "climd/error.hpp"
#include "climd/kernels.hpp"

namespace climd::kernels {
namespace {

bool host_has_avx2() {
#if defined(CLIMD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_available() {
  if (const char* env = std::getenv("CLIMD_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_table();
    if (want == "avx2" && isa_available(Isa::avx2)) return &table_for(Isa::avx2);
    if (want == "neon" && isa_available(Isa::neon)) return &table_for(Isa::neon);
    return &scalar_table();
  }
  if (isa_available(Isa::avx2)) return &table_for(Isa::avx2);
  if (isa_available(Isa::neon)) return &table_for(Isa::neon);
  return &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{best_available()};
  return slot;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ValidationError(std::string("kernel size mismatch in ") + what);
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return host_has_avx2();
    case Isa::neon:
#if defined(CLIMD_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_available(isa)) {
    throw ValidationError("SIMD variant not available on this host: " + std::string(isa_name(isa)));
  }
  switch (isa) {
#if defined(CLIMD_HAVE_AVX2)
    case Isa::avx2:
      return detail::avx2_table();
#endif
#if defined(CLIMD_HAVE_NEON)
    case Isa::neon:
      return detail::neon_table();
#endif
    default:
      return scalar_table();
  }
}

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) { active_slot().store(&table_for(isa), std::memory_order_relaxed); }

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  return active().dot(a.data(), b.data(), a.size());
}

void affine(std::span<const double> weight, std::span<const double> bias,
            std::span<const double> x, std::span<double> y) {
  require_same_size(bias.size(), y.size(), "affine");
  require_same_size(weight.size(), y.size() * x.size(), "affine");
  active().affine(weight.data(), bias.data(), x.data(), y.data(), y.size(), x.size());
}

void affine_transpose_acc(std::span<const double> weight, std::span<const double> x,
                          std::span<double> y) {
  require_same_size(weight.size(), x.size() * y.size(), "affine_transpose_acc");
  active().affine_transpose_acc(weight.data(), x.data(), y.data(), x.size(), y.size());
}

void rank1_update(std::span<double> weight, double alpha, std::span<const double> a,
                  std::span<const double> b) {
  require_same_size(weight.size(), a.size() * b.size(), "rank1_update");
  active().rank1_update(weight.data(), alpha, a.data(), b.data(), a.size(), b.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size(), "axpy");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace climd::kernels
