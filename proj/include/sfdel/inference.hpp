#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "sfdel/el.hpp"

namespace sfdel {

// Data-driven scaling
//   a_n(theta) = sum_k ||G||^2 corrected_k^2 / sum_k ||G||^2 raw_k^2,
// which calibrates the log-ratio so that 2 a_n * neg_log_ratio is
// asymptotically chi-square(p) across sparse, intermediate and dense sampling
// regimes (it tends to 1/2 under pure increasing domain and to 1 under fast
// infill).  A zero denominator falls back to a_n = 1 with a warning flag.
double scaling_factor(const Eigen::VectorXd& theta, const EstimatingFunction& fn,
                      const PeriodogramSet& pgram, bool* fallback = nullptr);

struct ScaledStatistic {
  Eigen::VectorXd theta;
  ELStatus el_status = ELStatus::Infeasible;
  double neg_log_ratio = 0.0;  // +inf sentinel when not Converged
  double a_n = 1.0;
  double statistic = 0.0;      // 2 * a_n * neg_log_ratio; +inf when infeasible
  int df = 0;
  bool a_n_fallback = false;
};

ScaledStatistic scaled_statistic(const Eigen::VectorXd& theta,
                                 const EstimatingFunction& fn,
                                 const PeriodogramSet& pgram);

struct TestResult {
  ScaledStatistic stat;
  double alpha = 0.1;
  double critical = 0.0;  // chi2 quantile(1 - alpha, df)
  double pvalue = 1.0;
  bool reject = false;
};

// Chi-square calibrated test of theta0: reject iff statistic > critical.
// Infeasible EL at theta0 rejects with p-value 0.
TestResult test_hypothesis(const Eigen::VectorXd& theta0,
                           const EstimatingFunction& fn,
                           const PeriodogramSet& pgram, double alpha);

struct SearchSpec {
  Eigen::VectorXd lo, hi;   // parameter box
  int grid_cells = 61;      // per axis, two-parameter regions
  double interval_tol = 1e-4;  // endpoint bisection tolerance, one parameter
};

struct IntervalRegion {
  double lo = 0.0, hi = 0.0;
};

struct GridMaskRegion {
  Eigen::VectorXd axis1, axis2;   // grid lines
  std::vector<std::uint8_t> accepted;  // row-major axis1 x axis2
};

struct ConfidenceRegion {
  double alpha = 0.1;
  double critical = 0.0;
  std::variant<IntervalRegion, GridMaskRegion> shape;
};

// 100(1-alpha)% region {theta : statistic(theta) <= critical}.  One-parameter
// models give an interval found by bisection outward from the point estimate;
// two-parameter models give an acceptance mask over a rectangular grid.
// Throws EmptyRegionError when nothing in the searched set is accepted.
ConfidenceRegion confidence_region(const EstimatingFunction& fn,
                                   const PeriodogramSet& pgram, double alpha,
                                   const SearchSpec& search,
                                   std::optional<Eigen::VectorXd> estimate = {});

// Maximum-EL point estimate: minimizes neg_log_ratio(theta) over the box by
// Nelder-Mead restarted from three deterministic jitters of init.  Infeasible
// thetas score +inf; throws AllInfeasibleError when every probe is infeasible.
Eigen::VectorXd point_estimate(const EstimatingFunction& fn,
                               const PeriodogramSet& pgram,
                               const Eigen::VectorXd& init,
                               const Eigen::VectorXd& lo,
                               const Eigen::VectorXd& hi);

// Classical distance-binned moment semivariogram estimate, for side-by-side
// comparisons: bin b averages (Z_i - Z_j)^2 / 2 over pairs whose distance
// falls in ((b)w, (b+1)w], w = max_dist_fraction * max pair distance / bins.
struct SemivariogramBin {
  double midpoint = 0.0;
  std::optional<double> average;  // empty bin -> no value
  std::size_t pairs = 0;
};

std::vector<SemivariogramBin> matheron_semivariogram(const SiteSample& sample,
                                                     int bins = 10,
                                                     double max_dist_fraction = 0.5);

}  // namespace sfdel
