#include "sfdel/frequency_grid.hpp"

#include <cmath>

#include "sfdel/errors.hpp"

namespace sfdel {

FrequencyGrid build_grid(double lambda, double kappa, double eta, double cstar,
                         int d, std::size_t max_points) {
  if (!(lambda >= 1.0)) throw GridError("grid: lambda must be >= 1");
  if (!(cstar > 0.0)) throw GridError("grid: cstar must be positive");
  if (d < 1) throw GridError("grid: dimension must be >= 1");
  if (!(kappa > 0.0 && kappa < eta && eta <= 1.0))
    throw GridError("grid: need 0 < kappa < eta <= 1");
  if (eta == 1.0)
    warn("grid: eta = 1 sits on the boundary of the admissible growth range");

  // eta == 1 avoids pow() so that integral products stay exact.
  const double extent = cstar * (eta == 1.0 ? lambda : std::pow(lambda, eta));
  const long j_max = static_cast<long>(std::floor(extent));
  const std::size_t per_axis = static_cast<std::size_t>(2 * j_max + 1);

  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    if (total > max_points / per_axis + 1)
      throw GridError("grid: size exceeds the configured maximum");
    total *= per_axis;
  }
  if (total > max_points)
    throw GridError("grid: size exceeds the configured maximum");

  FrequencyGrid grid;
  grid.d = d;
  grid.lambda = lambda;
  grid.kappa = kappa;
  grid.eta = eta;
  grid.cstar = cstar;
  grid.spacing = std::pow(lambda, -kappa);
  grid.j_max = j_max;
  grid.frequencies.resize(static_cast<Eigen::Index>(total), d);

  std::vector<long> j(static_cast<std::size_t>(d), -j_max);
  for (Eigen::Index row = 0; row < grid.frequencies.rows(); ++row) {
    for (int i = 0; i < d; ++i)
      grid.frequencies(row, i) = static_cast<double>(j[static_cast<std::size_t>(i)]) * grid.spacing;
    // lexicographic advance, last coordinate fastest
    for (int i = d - 1; i >= 0; --i) {
      auto& ji = j[static_cast<std::size_t>(i)];
      if (++ji <= j_max) break;
      ji = -j_max;
    }
  }
  return grid;
}

}  // namespace sfdel
