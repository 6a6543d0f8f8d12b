#include "sfdel/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sfdel/chi2.hpp"
#include "sfdel/errors.hpp"

namespace sfdel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double scaling_factor(const Eigen::VectorXd& theta, const EstimatingFunction& fn,
                      const PeriodogramSet& pgram, bool* fallback) {
  if (fn.domain_dim() != pgram.grid.d)
    throw UsageError("scaling_factor: estimating function/grid dimension mismatch");
  const EstimatingFunction::Prepared prep = fn.prepare(theta);
  const Eigen::Index N = pgram.grid.size();
  const int p = fn.p();
  std::vector<double> buf(static_cast<std::size_t>(p));
  double num = 0.0, den = 0.0;
  for (Eigen::Index k = 0; k < N; ++k) {
    prep.eval(pgram.grid.frequencies.row(k).data(), buf.data());
    double g2 = 0.0;
    for (int c = 0; c < p; ++c) g2 += buf[static_cast<std::size_t>(c)] * buf[static_cast<std::size_t>(c)];
    num += g2 * pgram.corrected[k] * pgram.corrected[k];
    den += g2 * pgram.raw[k] * pgram.raw[k];
  }
  if (fallback != nullptr) *fallback = false;
  if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num)) {
    warn("scaling factor denominator degenerate; falling back to a_n = 1");
    if (fallback != nullptr) *fallback = true;
    return 1.0;
  }
  return num / den;
}

ScaledStatistic scaled_statistic(const Eigen::VectorXd& theta,
                                 const EstimatingFunction& fn,
                                 const PeriodogramSet& pgram) {
  ScaledStatistic out;
  out.theta = theta;
  out.df = fn.p();
  const ELSolution sol = el_at(theta, fn, pgram);
  out.el_status = sol.status;
  out.neg_log_ratio = sol.neg_log_ratio;
  out.a_n = scaling_factor(theta, fn, pgram, &out.a_n_fallback);
  out.statistic = (sol.status == ELStatus::Converged)
                      ? 2.0 * out.a_n * sol.neg_log_ratio
                      : kInf;
  return out;
}

TestResult test_hypothesis(const Eigen::VectorXd& theta0,
                           const EstimatingFunction& fn,
                           const PeriodogramSet& pgram, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("test_hypothesis: alpha must lie in (0,1)");
  TestResult res;
  res.stat = scaled_statistic(theta0, fn, pgram);
  res.alpha = alpha;
  res.critical = chi2_quantile(1.0 - alpha, res.stat.df);
  if (res.stat.el_status != ELStatus::Converged) {
    res.pvalue = 0.0;
    res.reject = true;
  } else {
    res.pvalue = 1.0 - chi2_cdf(res.stat.statistic, res.stat.df);
    res.reject = res.stat.statistic > res.critical;
  }
  return res;
}

namespace {

// Scaled statistic as a plain objective; +inf outside the box or when the
// inner optimization has no feasible weights.
struct BoxedObjective {
  const EstimatingFunction& fn;
  const PeriodogramSet& pgram;
  Eigen::VectorXd lo, hi;
  mutable long feasible_evals = 0;

  double neg_log_ratio_at(const Eigen::VectorXd& theta) const {
    for (Eigen::Index i = 0; i < theta.size(); ++i)
      if (!(theta[i] >= lo[i] && theta[i] <= hi[i])) return kInf;
    const ELSolution sol = el_at(theta, fn, pgram);
    if (sol.status != ELStatus::Converged) return kInf;
    ++feasible_evals;
    return sol.neg_log_ratio;
  }
};

// Nelder-Mead with standard coefficients; tolerates +inf vertex values.
Eigen::VectorXd nelder_mead(const BoxedObjective& obj, const Eigen::VectorXd& x0,
                            double* best_val) {
  const int p = static_cast<int>(x0.size());
  const int m = p + 1;
  std::vector<Eigen::VectorXd> x(static_cast<std::size_t>(m));
  std::vector<double> f(static_cast<std::size_t>(m));
  x[0] = x0;
  for (int i = 0; i < p; ++i) {
    Eigen::VectorXd v = x0;
    double h = 0.05 * (obj.hi[i] - obj.lo[i]);
    if (h <= 0.0) h = 0.05 * (1.0 + std::abs(x0[i]));
    v[i] = (v[i] + h <= obj.hi[i]) ? v[i] + h : v[i] - h;
    x[static_cast<std::size_t>(i) + 1] = v;
  }
  for (int i = 0; i < m; ++i) f[static_cast<std::size_t>(i)] = obj.neg_log_ratio_at(x[static_cast<std::size_t>(i)]);

  std::vector<int> ord(static_cast<std::size_t>(m));
  const auto sort_ord = [&] {
    for (int i = 0; i < m; ++i) ord[static_cast<std::size_t>(i)] = i;
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
      return f[static_cast<std::size_t>(a)] < f[static_cast<std::size_t>(b)];
    });
  };

  const int max_iter = 400 * p;
  for (int it = 0; it < max_iter; ++it) {
    sort_ord();
    const int ib = ord[0], iw = ord[static_cast<std::size_t>(m) - 1];
    const double fb = f[static_cast<std::size_t>(ib)], fw = f[static_cast<std::size_t>(iw)];
    if (std::isfinite(fb) && std::isfinite(fw) &&
        fw - fb <= 1e-10 * (1.0 + std::abs(fb))) {
      double spread = 0.0;
      for (int i = 1; i < m; ++i)
        spread = std::max(spread, (x[static_cast<std::size_t>(ord[static_cast<std::size_t>(i)])] -
                                   x[static_cast<std::size_t>(ib)]).norm());
      if (spread <= 1e-8) break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < m; ++i)
      if (i != iw) centroid += x[static_cast<std::size_t>(i)];
    centroid /= static_cast<double>(p);

    const Eigen::VectorXd xr = centroid + (centroid - x[static_cast<std::size_t>(iw)]);
    const double fr = obj.neg_log_ratio_at(xr);
    const double fsecond = f[static_cast<std::size_t>(ord[static_cast<std::size_t>(m) - 2])];
    if (fr < fb) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - x[static_cast<std::size_t>(iw)]);
      const double fe = obj.neg_log_ratio_at(xe);
      if (fe < fr) {
        x[static_cast<std::size_t>(iw)] = xe;
        f[static_cast<std::size_t>(iw)] = fe;
      } else {
        x[static_cast<std::size_t>(iw)] = xr;
        f[static_cast<std::size_t>(iw)] = fr;
      }
    } else if (fr < fsecond) {
      x[static_cast<std::size_t>(iw)] = xr;
      f[static_cast<std::size_t>(iw)] = fr;
    } else {
      const Eigen::VectorXd xc = centroid + 0.5 * (x[static_cast<std::size_t>(iw)] - centroid);
      const double fc = obj.neg_log_ratio_at(xc);
      if (fc < fw) {
        x[static_cast<std::size_t>(iw)] = xc;
        f[static_cast<std::size_t>(iw)] = fc;
      } else {
        for (int i = 0; i < m; ++i) {
          if (i == ib) continue;
          x[static_cast<std::size_t>(i)] =
              x[static_cast<std::size_t>(ib)] +
              0.5 * (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(ib)]);
          f[static_cast<std::size_t>(i)] = obj.neg_log_ratio_at(x[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
  sort_ord();
  *best_val = f[static_cast<std::size_t>(ord[0])];
  return x[static_cast<std::size_t>(ord[0])];
}

}  // namespace

Eigen::VectorXd point_estimate(const EstimatingFunction& fn,
                               const PeriodogramSet& pgram,
                               const Eigen::VectorXd& init,
                               const Eigen::VectorXd& lo,
                               const Eigen::VectorXd& hi) {
  const int td = fn.theta_dim();
  if (init.size() != td || lo.size() != td || hi.size() != td)
    throw UsageError("point_estimate: init/lo/hi must match the parameter size");
  for (int i = 0; i < td; ++i)
    if (!(lo[i] < hi[i])) throw UsageError("point_estimate: need lo < hi");

  BoxedObjective obj{fn, pgram, lo, hi};
  Eigen::VectorXd start = init.cwiseMax(lo).cwiseMin(hi);
  const Eigen::VectorXd mid = 0.5 * (lo + hi);

  Eigen::VectorXd best = start;
  double best_val = kInf;
  for (int r = 0; r < 3; ++r) {
    const double w = static_cast<double>(r) / 3.0;  // 0, 1/3, 2/3 toward center
    const Eigen::VectorXd x0 = (1.0 - w) * start + w * mid;
    double val = kInf;
    const Eigen::VectorXd x = nelder_mead(obj, x0, &val);
    if (val < best_val) {
      best_val = val;
      best = x;
    }
  }
  if (!std::isfinite(best_val))
    throw AllInfeasibleError(
        "point estimate: no parameter in the search box admits feasible weights");
  return best;
}

ConfidenceRegion confidence_region(const EstimatingFunction& fn,
                                   const PeriodogramSet& pgram, double alpha,
                                   const SearchSpec& search,
                                   std::optional<Eigen::VectorXd> estimate) {
  const int td = fn.theta_dim();
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("confidence_region: alpha must lie in (0,1)");
  if (search.lo.size() != td || search.hi.size() != td)
    throw UsageError("confidence_region: search box must match the parameter size");
  for (int i = 0; i < td; ++i)
    if (!(search.lo[i] < search.hi[i]))
      throw UsageError("confidence_region: need lo < hi");
  if (td != 1 && td != 2)
    throw UsageError("confidence_region: implemented for one or two parameters");

  ConfidenceRegion region;
  region.alpha = alpha;
  region.critical = chi2_quantile(1.0 - alpha, fn.p());

  const auto statistic_at = [&](const Eigen::VectorXd& theta) {
    return scaled_statistic(theta, fn, pgram).statistic;
  };
  const auto accepted = [&](const Eigen::VectorXd& theta) {
    return statistic_at(theta) <= region.critical;
  };

  if (td == 1) {
    // Center on an accepted point: the supplied estimate if it passes, else
    // the best point on a coarse scan of the box.
    Eigen::VectorXd center(1);
    bool have_center = false;
    if (estimate.has_value()) {
      center = estimate->cwiseMax(search.lo).cwiseMin(search.hi);
      have_center = accepted(center);
    }
    if (!have_center) {
      const int cells = std::max(search.grid_cells, 5);
      double best_stat = kInf;
      for (int i = 0; i < cells; ++i) {
        Eigen::VectorXd t(1);
        t[0] = search.lo[0] + (search.hi[0] - search.lo[0]) * i /
                                  static_cast<double>(cells - 1);
        const double s = statistic_at(t);
        if (s < best_stat) {
          best_stat = s;
          center = t;
        }
      }
      have_center = best_stat <= region.critical;
    }
    if (!have_center)
      throw EmptyRegionError(
          "confidence region: no accepted parameter in the search box");

    // Bisect each boundary between the accepted center and the box edge.
    const auto edge = [&](double outer) {
      Eigen::VectorXd t(1);
      t[0] = outer;
      if (accepted(t)) return outer;
      double a = center[0], b = outer;
      while (std::abs(b - a) > search.interval_tol) {
        const double mdl = 0.5 * (a + b);
        t[0] = mdl;
        (accepted(t) ? a : b) = mdl;
      }
      return a;
    };
    IntervalRegion iv;
    iv.lo = edge(search.lo[0]);
    iv.hi = edge(search.hi[0]);
    region.shape = iv;
    return region;
  }

  GridMaskRegion mask;
  const int cells = std::max(search.grid_cells, 2);
  mask.axis1.resize(cells);
  mask.axis2.resize(cells);
  for (int i = 0; i < cells; ++i) {
    const double f = i / static_cast<double>(cells - 1);
    mask.axis1[i] = search.lo[0] + (search.hi[0] - search.lo[0]) * f;
    mask.axis2[i] = search.lo[1] + (search.hi[1] - search.lo[1]) * f;
  }
  mask.accepted.assign(static_cast<std::size_t>(cells) * cells, 0);
  bool any = false;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      Eigen::VectorXd t(2);
      t << mask.axis1[i], mask.axis2[j];
      const bool ok = accepted(t);
      mask.accepted[static_cast<std::size_t>(i) * cells + j] = ok ? 1 : 0;
      any = any || ok;
    }
  }
  if (!any)
    throw EmptyRegionError(
        "confidence region: no accepted parameter on the search grid");
  region.shape = mask;
  return region;
}

std::vector<SemivariogramBin> matheron_semivariogram(const SiteSample& sample,
                                                     int bins,
                                                     double max_dist_fraction) {
  if (!sample.has_values())
    throw UsageError("semivariogram: sample carries no field values");
  if (sample.n() < 2) throw UsageError("semivariogram: need at least two sites");
  if (bins < 1) throw UsageError("semivariogram: need at least one bin");
  if (!(max_dist_fraction > 0.0 && max_dist_fraction <= 1.0))
    throw UsageError("semivariogram: max_dist_fraction must lie in (0,1]");

  const Eigen::Index n = sample.n();
  double max_dist = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      max_dist = std::max(
          max_dist, (sample.sites.row(i) - sample.sites.row(j)).norm());

  std::vector<SemivariogramBin> out(static_cast<std::size_t>(bins));
  const double w = max_dist_fraction * max_dist / bins;
  std::vector<double> sum(static_cast<std::size_t>(bins), 0.0);
  for (int b = 0; b < bins; ++b)
    out[static_cast<std::size_t>(b)].midpoint = (b + 0.5) * w;
  if (w <= 0.0) return out;  // all sites coincide

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (sample.sites.row(i) - sample.sites.row(j)).norm();
      if (dist <= 0.0 || dist > bins * w) continue;
      int b = static_cast<int>(std::ceil(dist / w)) - 1;
      b = std::clamp(b, 0, bins - 1);
      const double diff = sample.values[i] - sample.values[j];
      sum[static_cast<std::size_t>(b)] += 0.5 * diff * diff;
      ++out[static_cast<std::size_t>(b)].pairs;
    }
  }
  for (int b = 0; b < bins; ++b) {
    auto& bin = out[static_cast<std::size_t>(b)];
    if (bin.pairs > 0) bin.average = sum[static_cast<std::size_t>(b)] / bin.pairs;
  }
  return out;
}

}  // namespace sfdel
