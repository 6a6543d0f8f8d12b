#pragma once

#include <functional>

#include <Eigen/Dense>

namespace sfdel {

// Adaptive tensor quadrature over the centered box [-half_width, half_width]^d
// (d = 1 or 2).  Each panel is estimated with nested Gauss-Legendre rules
// (5 and 9 points per axis); panels whose rule disagreement exceeds their
// share of abs_tol are split in half per axis until the budget or depth cap
// is reached.  Deterministic traversal order.
struct QuadratureSpec {
  double half_width = 2000.0;
  double abs_tol = 1e-5;
  long max_panels = 400000;
  int min_depth = 3;
  int max_depth = 26;
};

struct QuadratureResult {
  Eigen::VectorXd value;
  double error_estimate = 0.0;  // sum of accepted panel disagreements
  bool converged = true;        // false when the budget ran out first
  long panels = 0;
};

// f(x, out): writes the out_dim integrand components at point x (length d).
QuadratureResult adaptive_integrate(
    const std::function<void(const double* x, double* out)>& f, int d,
    int out_dim, const QuadratureSpec& spec);

// Nodes/weights of the m-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int m, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace sfdel
