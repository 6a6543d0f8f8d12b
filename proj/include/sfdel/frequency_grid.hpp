#pragma once

#include <cstddef>

#include "sfdel/sampling.hpp"

namespace sfdel {

// Expanding lattice of evaluation frequencies: all points j * lambda^{-kappa}
// with integer j in [-J, J]^d, J = floor(cstar * lambda^eta).  Rows are
// ordered lexicographically in j (last coordinate fastest), so the grid is
// symmetric (for every row w the row -w is present) and contains the origin.
struct FrequencyGrid {
  int d = 2;
  double lambda = 1.0;
  double kappa = 0.1;
  double eta = 1.0;
  double cstar = 1.0;
  double spacing = 1.0;  // lambda^{-kappa}
  long j_max = 0;        // floor(cstar * lambda^eta)
  RowMatrixXd frequencies;  // N x d

  [[nodiscard]] Eigen::Index size() const { return frequencies.rows(); }
};

// Build the grid.  Requires lambda >= 1, 0 < kappa < eta <= 1 and cstar > 0.
// eta == 1 (the boundary of the admissible growth range) is accepted with a
// warning on stderr.  Throws GridError when the grid would exceed max_points.
FrequencyGrid build_grid(double lambda, double kappa, double eta, double cstar,
                         int d, std::size_t max_points = (std::size_t{1} << 24));

}  // namespace sfdel
