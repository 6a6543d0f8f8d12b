#include "sfdel/nudft_kernels.hpp"

#include <cmath>

namespace sfdel::kernels {

// Reference kernel.  Direct evaluation with one libm call pair per
// (site, frequency); no phase recurrences, so each value is independent and
// the result does not depend on how the frequency range is chunked.
void nudft_scalar(const double* sites, const double* values, std::size_t n,
                  std::size_t d, const double* freqs_cm, std::size_t nfreq,
                  std::size_t stride, double* out_re, double* out_im) {
  for (std::size_t k = 0; k < nfreq; ++k) {
    double acc_re = 0.0;
    double acc_im = 0.0;
    if (d == 2) {
      const double wx = freqs_cm[k];
      const double wy = freqs_cm[stride + k];
      for (std::size_t j = 0; j < n; ++j) {
        const double ph = sites[2 * j] * wx + sites[2 * j + 1] * wy;
        acc_re += values[j] * std::cos(ph);
        acc_im += values[j] * std::sin(ph);
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        double ph = 0.0;
        for (std::size_t i = 0; i < d; ++i)
          ph += sites[j * d + i] * freqs_cm[i * stride + k];
        acc_re += values[j] * std::cos(ph);
        acc_im += values[j] * std::sin(ph);
      }
    }
    out_re[k] = acc_re;
    out_im[k] = acc_im;
  }
}

}  // namespace sfdel::kernels
