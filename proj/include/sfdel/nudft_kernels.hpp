#pragma once

#include <cstddef>

namespace sfdel::kernels {

// Accumulates, for each frequency k,
//   out_re[k] = sum_j values[j] * cos(w_k . s_j)
//   out_im[k] = sum_j values[j] * sin(w_k . s_j)
// over sites in fixed index order (deterministic summation).
//
// sites:    n x d, row-major physical coordinates
// freqs_cm: coordinate-major frequency block; coordinate i of frequency k is
//           freqs_cm[i * stride + k] for k in [0, nfreq)
// Contract: |w_k . s_j| must stay well below 2^51 (range reduction limit);
// every realistic grid/window combination is orders of magnitude below that.
using NudftFn = void (*)(const double* sites, const double* values,
                         std::size_t n, std::size_t d, const double* freqs_cm,
                         std::size_t nfreq, std::size_t stride, double* out_re,
                         double* out_im);

// Portable reference: one libm cos/sin call per (site, frequency) pair.
void nudft_scalar(const double* sites, const double* values, std::size_t n,
                  std::size_t d, const double* freqs_cm, std::size_t nfreq,
                  std::size_t stride, double* out_re, double* out_im);

#if defined(__x86_64__) || defined(_M_X64)
// AVX2+FMA variant: four frequencies per vector, vectorized sin/cos with
// Cody-Waite range reduction.  Matches the scalar kernel to ~1e-13 relative.
void nudft_avx2(const double* sites, const double* values, std::size_t n,
                std::size_t d, const double* freqs_cm, std::size_t nfreq,
                std::size_t stride, double* out_re, double* out_im);
#endif

// True when the running CPU can execute the AVX2 variant.
bool avx2_available();

// Kernel to use: the widest supported variant, overridable with
// SFDEL_KERNEL=scalar|avx2 (the environment is consulted on every call;
// throws KernelError if the requested variant cannot run here).
NudftFn select_kernel();
const char* selected_kernel_name();

}  // namespace sfdel::kernels
