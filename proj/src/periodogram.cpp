#include "sfdel/periodogram.hpp"

#include <cmath>
#include <thread>
#include <vector>

#include "sfdel/errors.hpp"
#include "sfdel/nudft_kernels.hpp"

namespace sfdel {

std::complex<double> dft(const SiteSample& sample, const Eigen::VectorXd& omega,
                         bool center) {
  if (!sample.has_values()) throw UsageError("dft: sample carries no values");
  const int n = sample.n();
  const int d = sample.dim();
  if (omega.size() != d) throw UsageError("dft: frequency dimension mismatch");

  const double mean = center ? sample.values.mean() : 0.0;
  double re = 0.0, im = 0.0;
  for (int j = 0; j < n; ++j) {
    double ph = 0.0;
    for (int i = 0; i < d; ++i) ph += sample.sites(j, i) * omega[i];
    const double z = sample.values[j] - mean;
    re += z * std::cos(ph);
    im += z * std::sin(ph);
  }
  const double scale =
      std::pow(sample.lambda, 0.5 * static_cast<double>(d)) / static_cast<double>(n);
  return {scale * re, scale * im};
}

PeriodogramSet periodogram(const SiteSample& sample, const FrequencyGrid& grid,
                           bool center, int n_threads) {
  if (!sample.has_values()) throw UsageError("periodogram: sample carries no values");
  const int n = sample.n();
  const int d = sample.dim();
  if (n < 2) throw UsageError("periodogram: need at least two sites");
  if (grid.d != d) throw UsageError("periodogram: grid dimension mismatch");
  if (sample.values.size() != n)
    throw UsageError("periodogram: value/site count mismatch");
  if (n_threads < 1) n_threads = 1;

  const Eigen::Index N = grid.size();
  const double mean = sample.values.mean();
  std::vector<double> z(static_cast<std::size_t>(n));
  double ss = 0.0;
  for (int j = 0; j < n; ++j) {
    const double dev = sample.values[j] - mean;
    z[static_cast<std::size_t>(j)] = center ? dev : sample.values[j];
    ss += dev * dev;
  }
  const double sigma_hat0 = ss / static_cast<double>(n);

  // Coordinate-major frequency copy for the kernels.
  std::vector<double> freqs_cm(static_cast<std::size_t>(N) * static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    for (Eigen::Index k = 0; k < N; ++k)
      freqs_cm[static_cast<std::size_t>(i) * static_cast<std::size_t>(N) +
               static_cast<std::size_t>(k)] = grid.frequencies(k, i);

  std::vector<double> re(static_cast<std::size_t>(N)), im(static_cast<std::size_t>(N));
  const kernels::NudftFn kernel = kernels::select_kernel();
  const auto run_range = [&](std::size_t k0, std::size_t k1) {
    kernel(sample.sites.data(), z.data(), static_cast<std::size_t>(n),
           static_cast<std::size_t>(d), freqs_cm.data() + k0, k1 - k0,
           static_cast<std::size_t>(N), re.data() + k0, im.data() + k0);
  };

  if (n_threads == 1 || N < 256) {
    run_range(0, static_cast<std::size_t>(N));
  } else {
    const std::size_t total = static_cast<std::size_t>(N);
    const std::size_t chunk = (total + static_cast<std::size_t>(n_threads) - 1) /
                              static_cast<std::size_t>(n_threads);
    std::vector<std::thread> pool;
    for (std::size_t k0 = 0; k0 < total; k0 += chunk)
      pool.emplace_back(run_range, k0, std::min(total, k0 + chunk));
    for (auto& t : pool) t.join();
  }

  PeriodogramSet out;
  out.grid = grid;
  out.centered = center;
  out.sigma_hat0 = sigma_hat0;
  const double lambda_d = std::pow(sample.lambda, static_cast<double>(d));
  out.c_n = static_cast<double>(n) / lambda_d;
  const double scale = lambda_d / (static_cast<double>(n) * static_cast<double>(n));
  const double bias = lambda_d * sigma_hat0 / static_cast<double>(n);
  out.raw.resize(N);
  out.corrected.resize(N);
  for (Eigen::Index k = 0; k < N; ++k) {
    const double a = re[static_cast<std::size_t>(k)];
    const double b = im[static_cast<std::size_t>(k)];
    out.raw[k] = scale * (a * a + b * b);
    out.corrected[k] = out.raw[k] - bias;
  }
  return out;
}

}  // namespace sfdel
