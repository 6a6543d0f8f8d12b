#include <cstdlib>
#include <string>

#include "sfdel/errors.hpp"
#include "sfdel/nudft_kernels.hpp"

namespace sfdel::kernels {

bool avx2_available() {
#if defined(SFDEL_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

struct Selection {
  NudftFn fn;
  const char* name;
};

Selection select_impl() {
  const char* env = std::getenv("SFDEL_KERNEL");
  const std::string want = env ? env : "";
  if (want == "scalar") return {nudft_scalar, "scalar"};
  if (want == "avx2") {
#if defined(SFDEL_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
    if (avx2_available()) return {nudft_avx2, "avx2"};
#endif
    throw KernelError("SFDEL_KERNEL=avx2 requested but AVX2 is unavailable");
  }
  if (!want.empty())
    throw KernelError("SFDEL_KERNEL must be 'scalar' or 'avx2'");
#if defined(SFDEL_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
  if (avx2_available()) return {nudft_avx2, "avx2"};
#endif
  return {nudft_scalar, "scalar"};
}

}  // namespace

NudftFn select_kernel() { return select_impl().fn; }

const char* selected_kernel_name() { return select_impl().name; }

}  // namespace sfdel::kernels
