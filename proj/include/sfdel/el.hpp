#pragma once

#include <Eigen/Dense>

#include "sfdel/estimating.hpp"
#include "sfdel/periodogram.hpp"

namespace sfdel {

// Empirical likelihood over N rows g_1..g_N (each a p-vector):
//   maximize prod_k (N p_k)  s.t.  p_k >= 0, sum p_k = 1, sum p_k g_k = 0.
// neg_log_ratio = -log of the maximized ratio = sum_k log(1 + beta.g_k) at
// the optimal multiplier beta; zero iff the rows already average to zero.
struct ELProblem {
  Eigen::MatrixXd g;  // N x p, N > p >= 1, all entries finite
};

enum class ELStatus { Converged, Infeasible, MaxIterations };

struct ELSolution {
  ELStatus status = ELStatus::Infeasible;
  Eigen::VectorXd beta;     // Lagrange multiplier (p)
  Eigen::VectorXd weights;  // probabilities p_k (N); empty unless Converged
  double neg_log_ratio = 0.0;  // +infinity sentinel when not Converged
  double residual = 0.0;       // ||sum_k p_k g_k|| at the solution
  int iterations = 0;
};

// Damped Newton on the convex dual D(beta) = -sum_k log*(1 + beta.g_k) where
// log* is log on [1/N, inf) extended quadratically below 1/N.  Infeasible
// problems (zero outside the convex hull of the rows) terminate at a dual
// stationary point with some 1 + beta.g_k < 1/N and are reported as such.
ELSolution solve_el(const ELProblem& problem, double tol = 1e-10,
                    int max_iter = 100);

// Convenience: assemble rows g_k = G_theta(w_k) * corrected_k over the
// periodogram grid and solve.
ELSolution el_at(const Eigen::VectorXd& theta, const EstimatingFunction& fn,
                 const PeriodogramSet& pgram, double tol = 1e-10,
                 int max_iter = 100);

// The N x p row matrix used by el_at (exposed for diagnostics and tests).
Eigen::MatrixXd assemble_el_rows(const Eigen::VectorXd& theta,
                                 const EstimatingFunction& fn,
                                 const PeriodogramSet& pgram);

}  // namespace sfdel
