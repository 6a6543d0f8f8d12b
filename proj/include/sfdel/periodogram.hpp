#pragma once

#include <complex>

#include "sfdel/frequency_grid.hpp"
#include "sfdel/sampling.hpp"

namespace sfdel {

// Periodogram of an irregularly spaced sample over a frequency grid.
//   raw_k       = | lambda^{d/2} n^{-1} sum_j (Z_j - center) e^{i w_k . s_j} |^2
//   corrected_k = raw_k - n^{-1} lambda^d sigma_hat0   (edge-bias correction)
//   sigma_hat0  = n^{-1} sum_j (Z_j - Zbar)^2          (always mean-centered)
//   c_n         = n / lambda^d                          (sites per unit volume)
struct PeriodogramSet {
  FrequencyGrid grid;
  Eigen::VectorXd raw;
  Eigen::VectorXd corrected;
  double sigma_hat0 = 0.0;
  double c_n = 0.0;
  bool centered = true;
};

// Discrete Fourier transform lambda^{d/2} n^{-1} sum_j Z_j e^{i w . s_j} at a
// single frequency, optionally mean-centering the values first.
std::complex<double> dft(const SiteSample& sample, const Eigen::VectorXd& omega,
                         bool center = true);

// Full periodogram over the grid.  Requires values present and n >= 2.  The
// frequency loop may be split across n_threads; per-frequency sums always run
// in fixed site order, so the result is identical for any thread count.
PeriodogramSet periodogram(const SiteSample& sample, const FrequencyGrid& grid,
                           bool center = true, int n_threads = 1);

}  // namespace sfdel
