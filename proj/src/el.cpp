#include "sfdel/el.hpp"

#include <cmath>
#include <limits>

#include "sfdel/errors.hpp"

namespace sfdel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log on [1/N, inf) extended quadratically below 1/N so the dual objective is
// defined and convex everywhere (the extension matches value and two
// derivatives at 1/N).
struct PseudoLog {
  double inv_n;   // 1/N
  double n;       // N
  double log_inv_n;

  explicit PseudoLog(Eigen::Index rows)
      : inv_n(1.0 / static_cast<double>(rows)),
        n(static_cast<double>(rows)),
        log_inv_n(std::log(1.0 / static_cast<double>(rows))) {}

  [[nodiscard]] double value(double z) const {
    if (z >= inv_n) return std::log(z);
    const double nz = n * z;
    return log_inv_n - 1.5 + 2.0 * nz - 0.5 * nz * nz;
  }
  [[nodiscard]] double d1(double z) const {
    if (z >= inv_n) return 1.0 / z;
    return n * (2.0 - n * z);
  }
  [[nodiscard]] double d2(double z) const {
    if (z >= inv_n) return -1.0 / (z * z);
    return -n * n;
  }
};

}  // namespace

ELSolution solve_el(const ELProblem& problem, double tol, int max_iter) {
  const Eigen::MatrixXd& g = problem.g;
  const Eigen::Index N = g.rows();
  const Eigen::Index p = g.cols();
  if (p < 1 || N <= p)
    throw UsageError("solve_el: need N rows > p >= 1 columns");
  if (!g.allFinite()) throw UsageError("solve_el: rows must be finite");

  ELSolution sol;
  sol.beta = Eigen::VectorXd::Zero(p);
  sol.neg_log_ratio = kInf;

  const double max_row_norm = g.rowwise().norm().maxCoeff();
  if (max_row_norm == 0.0) {
    // Every row zero: the constraint is vacuous and uniform weights are optimal.
    sol.status = ELStatus::Converged;
    sol.weights = Eigen::VectorXd::Constant(N, 1.0 / static_cast<double>(N));
    sol.neg_log_ratio = 0.0;
    sol.residual = 0.0;
    return sol;
  }

  const PseudoLog plog(N);
  const double resid_tol = tol * (1.0 + max_row_norm);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd z(N), grad(p), step(p), z_trial(N);
  Eigen::MatrixXd hess(p, p);

  const auto dual_value = [&](const Eigen::VectorXd& zz) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < N; ++k) v -= plog.value(zz[k]);
    return v;
  };

  // Interior + constraint check; fills sol.residual with ||sum_k p_k g_k||.
  // The weights-sum test is essential: when zero lies outside the convex hull
  // of the rows the dual decreases along an unbounded ray on which the
  // gradient (and hence sum_k p_k g_k) also vanishes, but sum_k p_k -> 0
  // instead of 1, which is what distinguishes divergence from convergence.
  const auto feasible_at = [&](const Eigen::VectorXd& zz) {
    const double floor = plog.inv_n * (1.0 - 1e-9);
    if (zz.minCoeff() < floor) return false;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(p);
    double sum_p = 0.0;
    for (Eigen::Index k = 0; k < N; ++k) {
      const double pk = 1.0 / (plog.n * zz[k]);
      r += pk * g.row(k).transpose();
      sum_p += pk;
    }
    sol.residual = r.norm();
    return sol.residual <= resid_tol && std::abs(sum_p - 1.0) <= 1e-6;
  };

  // Divergence signature: flat gradient far from the simplex.
  const auto diverged_at = [&](const Eigen::VectorXd& zz) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(p);
    double sum_p = 0.0;
    for (Eigen::Index k = 0; k < N; ++k) {
      r += (plog.d1(zz[k]) / plog.n) * g.row(k).transpose();
      sum_p += plog.d1(zz[k]) / plog.n;
    }
    return r.norm() <= resid_tol && sum_p < 0.5;
  };

  z = Eigen::VectorXd::Ones(N) + g * beta;
  double dval = dual_value(z);

  ELStatus status = ELStatus::MaxIterations;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (feasible_at(z)) {
      status = ELStatus::Converged;
      break;
    }
    if (diverged_at(z) ||
        beta.norm() * (1.0 + max_row_norm) > 1e13) {
      status = ELStatus::Infeasible;
      break;
    }

    grad.setZero();
    hess.setZero();
    for (Eigen::Index k = 0; k < N; ++k) {
      const double d1 = plog.d1(z[k]);
      const double d2 = plog.d2(z[k]);
      grad.noalias() -= d1 * g.row(k).transpose();
      hess.noalias() -= d2 * (g.row(k).transpose() * g.row(k));
    }

    // Newton direction with escalating diagonal regularization.
    const double trace = hess.trace();
    bool solved = false;
    for (double reg : {0.0, 1e-12, 1e-8}) {
      Eigen::MatrixXd h = hess;
      if (reg > 0.0) h.diagonal().array() += reg * trace;
      step = h.ldlt().solve(-grad);
      if (step.allFinite() &&
          (h * step + grad).norm() <= 1e-6 * (grad.norm() + 1e-300)) {
        solved = true;
        break;
      }
    }
    if (!solved) {
      status = ELStatus::Infeasible;
      break;
    }

    // Backtracking line search (halving) with an Armijo condition.  The
    // absolute slack of a few ulps of the objective keeps the search from
    // freezing once decreases drop below representable precision; near the
    // optimum the full Newton step is then accepted and contracts
    // quadratically, instead of stalling at value-resolution accuracy.
    const double slope = grad.dot(step);
    const double noise =
        4.0 * std::numeric_limits<double>::epsilon() * (std::abs(dval) + 1.0);
    double t = 1.0;
    bool improved = false;
    while (t >= 1e-14) {
      z_trial = Eigen::VectorXd::Ones(N) + g * (beta + t * step);
      const double trial = dual_value(z_trial);
      if (trial <= dval + 1e-4 * t * slope + noise) {
        beta += t * step;
        z.swap(z_trial);
        dval = trial;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) {
      // No representable progress left: classify by feasibility.
      status = feasible_at(z) ? ELStatus::Converged : ELStatus::Infeasible;
      break;
    }
  }
  if (status == ELStatus::MaxIterations) {
    if (feasible_at(z))
      status = ELStatus::Converged;
    else if (diverged_at(z))
      status = ELStatus::Infeasible;
  }

  sol.status = status;
  sol.beta = beta;
  sol.iterations = it;
  if (status == ELStatus::Converged) {
    sol.weights.resize(N);
    double nlr = 0.0;
    for (Eigen::Index k = 0; k < N; ++k) {
      sol.weights[k] = 1.0 / (plog.n * z[k]);
      nlr += std::log(z[k]);
    }
    sol.neg_log_ratio = nlr;
  } else {
    // Keep the +inf sentinel internal; serializers report the status instead.
    sol.neg_log_ratio = kInf;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(p);
    for (Eigen::Index k = 0; k < N; ++k)
      r += plog.d1(z[k]) * g.row(k).transpose() / plog.n;
    sol.residual = r.norm();
  }
  return sol;
}

Eigen::MatrixXd assemble_el_rows(const Eigen::VectorXd& theta,
                                 const EstimatingFunction& fn,
                                 const PeriodogramSet& pgram) {
  if (fn.domain_dim() != pgram.grid.d)
    throw UsageError("el rows: estimating function/grid dimension mismatch");
  const Eigen::Index N = pgram.grid.size();
  const int p = fn.p();
  const EstimatingFunction::Prepared prep = fn.prepare(theta);
  Eigen::MatrixXd rows(N, p);
  std::vector<double> buf(static_cast<std::size_t>(p));
  for (Eigen::Index k = 0; k < N; ++k) {
    prep.eval(pgram.grid.frequencies.row(k).data(), buf.data());
    for (int c = 0; c < p; ++c) rows(k, c) = buf[static_cast<std::size_t>(c)] * pgram.corrected[k];
  }
  return rows;
}

ELSolution el_at(const Eigen::VectorXd& theta, const EstimatingFunction& fn,
                 const PeriodogramSet& pgram, double tol, int max_iter) {
  return solve_el(ELProblem{assemble_el_rows(theta, fn, pgram)}, tol, max_iter);
}

}  // namespace sfdel
