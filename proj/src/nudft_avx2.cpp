#include "sfdel/nudft_kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace sfdel::kernels {

namespace {

// Vectorized sin/cos for four doubles.
//
// Range reduction: q = round(x * 2/pi) via the add-magic-constant trick, then
// r = x - q*pi/2 with the constant split in two (Cody-Waite) and applied with
// FMA, which keeps r accurate for |x| up to ~2^50.  The quadrant q mod 4
// selects/signs the two polynomial kernels.  Polynomials are the classic
// double-precision minimax sets on |r| <= pi/4 (error ~1-2 ulp, comfortably
// inside the 1e-13 kernel-equivalence budget).
constexpr double kTwoOverPi = 6.36619772367581382433e-01;
constexpr double kPio2Hi = 1.57079632679489655800e+00;
constexpr double kPio2Lo = 6.12323399573676603587e-17;
constexpr double kMagic = 6755399441055744.0;  // 1.5 * 2^52

constexpr double S1 = -1.66666666666666324348e-01;
constexpr double S2 = 8.33333333332248946124e-03;
constexpr double S3 = -1.98412698298579493134e-04;
constexpr double S4 = 2.75573137070700676789e-06;
constexpr double S5 = -2.50507602534068634195e-08;
constexpr double S6 = 1.58969099521155010221e-10;

constexpr double C1 = 4.16666666666666019037e-02;
constexpr double C2 = -1.38888888888741095749e-03;
constexpr double C3 = 2.48015872894767294178e-05;
constexpr double C4 = -2.75573143513906633035e-07;
constexpr double C5 = 2.08757232129817482790e-09;
constexpr double C6 = -1.13596475577881948265e-11;

inline void sincos4(__m256d x, __m256d* sin_out, __m256d* cos_out) {
  const __m256d magic = _mm256_set1_pd(kMagic);
  __m256d qf = _mm256_fmadd_pd(x, _mm256_set1_pd(kTwoOverPi), magic);
  const __m256i qi = _mm256_castpd_si256(qf);  // low bits hold round(x*2/pi)
  qf = _mm256_sub_pd(qf, magic);

  __m256d r = _mm256_fnmadd_pd(qf, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(qf, _mm256_set1_pd(kPio2Lo), r);

  const __m256d z = _mm256_mul_pd(r, r);

  // sin(r) = r + r*z*(S1 + z*(... S6))
  __m256d ps = _mm256_set1_pd(S6);
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(S5));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(S4));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(S3));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(S2));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(S1));
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

  // cos(r) = 1 - z/2 + z*z*(C1 + z*(... C6))
  __m256d pc = _mm256_set1_pd(C6);
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(C5));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(C4));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(C3));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(C2));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(C1));
  __m256d cos_r = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc,
                                  _mm256_fnmadd_pd(z, _mm256_set1_pd(0.5),
                                                   _mm256_set1_pd(1.0)));

  // Quadrant selection: q&1 swaps sin/cos, q&2 flips the sin sign,
  // (q&1)^(q&2) pattern flips the cos sign.
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256i swap_i = _mm256_cmpeq_epi64(_mm256_and_si256(qi, one), one);
  const __m256i flip_i = _mm256_cmpeq_epi64(_mm256_and_si256(qi, two), two);
  const __m256d swap = _mm256_castsi256_pd(swap_i);
  const __m256d flip = _mm256_castsi256_pd(flip_i);
  const __m256d sign_bit = _mm256_set1_pd(-0.0);

  __m256d s = _mm256_blendv_pd(sin_r, cos_r, swap);
  __m256d c = _mm256_blendv_pd(cos_r, sin_r, swap);

  // sin(x): negate when q&2.
  s = _mm256_xor_pd(s, _mm256_and_pd(flip, sign_bit));
  // cos(x): negate when exactly one of q&1, q&2 is set.
  const __m256d cneg = _mm256_xor_pd(swap, flip);
  c = _mm256_xor_pd(c, _mm256_and_pd(cneg, sign_bit));

  *sin_out = s;
  *cos_out = c;
}

}  // namespace

void nudft_avx2(const double* sites, const double* values, std::size_t n,
                std::size_t d, const double* freqs_cm, std::size_t nfreq,
                std::size_t stride, double* out_re, double* out_im) {
  std::size_t k = 0;
  for (; k + 4 <= nfreq; k += 4) {
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    if (d == 2) {
      const __m256d wx = _mm256_loadu_pd(freqs_cm + k);
      const __m256d wy = _mm256_loadu_pd(freqs_cm + stride + k);
      for (std::size_t j = 0; j < n; ++j) {
        const __m256d sx = _mm256_set1_pd(sites[2 * j]);
        const __m256d sy = _mm256_set1_pd(sites[2 * j + 1]);
        const __m256d ph = _mm256_fmadd_pd(sx, wx, _mm256_mul_pd(sy, wy));
        __m256d s, c;
        sincos4(ph, &s, &c);
        const __m256d z = _mm256_set1_pd(values[j]);
        acc_re = _mm256_fmadd_pd(z, c, acc_re);
        acc_im = _mm256_fmadd_pd(z, s, acc_im);
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        __m256d ph = _mm256_setzero_pd();
        for (std::size_t i = 0; i < d; ++i)
          ph = _mm256_fmadd_pd(_mm256_set1_pd(sites[j * d + i]),
                               _mm256_loadu_pd(freqs_cm + i * stride + k), ph);
        __m256d s, c;
        sincos4(ph, &s, &c);
        const __m256d z = _mm256_set1_pd(values[j]);
        acc_re = _mm256_fmadd_pd(z, c, acc_re);
        acc_im = _mm256_fmadd_pd(z, s, acc_im);
      }
    }
    _mm256_storeu_pd(out_re + k, acc_re);
    _mm256_storeu_pd(out_im + k, acc_im);
  }
  if (k < nfreq)
    nudft_scalar(sites, values, n, d, freqs_cm + k, nfreq - k, stride,
                 out_re + k, out_im + k);
}

}  // namespace sfdel::kernels

#endif  // x86_64
