#include "sfdel/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "sfdel/errors.hpp"

namespace sfdel {

void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(m), 0.0);
  weights.assign(static_cast<std::size_t>(m), 0.0);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess, Newton on P_m.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(m) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(m) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(m - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
}

namespace {

struct Panel {
  double lo[2];
  double hi[2];
  int depth;
};

// Tensor Gauss-Legendre estimate of the vector integrand on one panel.
void panel_estimate(const std::function<void(const double*, double*)>& f, int d,
                    int out_dim, const Panel& p, const std::vector<double>& nodes,
                    const std::vector<double>& weights, double* acc,
                    std::vector<double>& buf) {
  const int m = static_cast<int>(nodes.size());
  for (int c = 0; c < out_dim; ++c) acc[c] = 0.0;
  double x[2];
  if (d == 1) {
    const double half = 0.5 * (p.hi[0] - p.lo[0]);
    const double mid = 0.5 * (p.hi[0] + p.lo[0]);
    for (int a = 0; a < m; ++a) {
      x[0] = mid + half * nodes[static_cast<std::size_t>(a)];
      f(x, buf.data());
      const double w = half * weights[static_cast<std::size_t>(a)];
      for (int c = 0; c < out_dim; ++c) acc[c] += w * buf[static_cast<std::size_t>(c)];
    }
    return;
  }
  const double half0 = 0.5 * (p.hi[0] - p.lo[0]);
  const double mid0 = 0.5 * (p.hi[0] + p.lo[0]);
  const double half1 = 0.5 * (p.hi[1] - p.lo[1]);
  const double mid1 = 0.5 * (p.hi[1] + p.lo[1]);
  for (int a = 0; a < m; ++a) {
    x[0] = mid0 + half0 * nodes[static_cast<std::size_t>(a)];
    const double wa = half0 * weights[static_cast<std::size_t>(a)];
    for (int b = 0; b < m; ++b) {
      x[1] = mid1 + half1 * nodes[static_cast<std::size_t>(b)];
      const double w = wa * half1 * weights[static_cast<std::size_t>(b)];
      f(x, buf.data());
      for (int c = 0; c < out_dim; ++c) acc[c] += w * buf[static_cast<std::size_t>(c)];
    }
  }
}

}  // namespace

QuadratureResult adaptive_integrate(
    const std::function<void(const double* x, double* out)>& f, int d,
    int out_dim, const QuadratureSpec& spec) {
  if (d != 1 && d != 2)
    throw UsageError("adaptive_integrate: only d = 1 or 2 supported");
  if (out_dim < 1) throw UsageError("adaptive_integrate: out_dim must be >= 1");
  if (!(spec.half_width > 0.0) || !(spec.abs_tol > 0.0))
    throw UsageError("adaptive_integrate: spec values must be positive");

  static std::vector<double> n5, w5, n9, w9;
  if (n5.empty()) {
    gauss_legendre(5, n5, w5);
    gauss_legendre(9, n9, w9);
  }

  const double L = spec.half_width;
  const double total_volume = d == 1 ? 2.0 * L : 4.0 * L * L;

  QuadratureResult res;
  res.value = Eigen::VectorXd::Zero(out_dim);
  std::vector<double> lo_est(static_cast<std::size_t>(out_dim));
  std::vector<double> hi_est(static_cast<std::size_t>(out_dim));
  std::vector<double> buf(static_cast<std::size_t>(out_dim));

  std::vector<Panel> stack;
  Panel root{};
  root.lo[0] = -L;
  root.hi[0] = L;
  root.lo[1] = d == 2 ? -L : 0.0;
  root.hi[1] = d == 2 ? L : 0.0;
  root.depth = 0;
  stack.push_back(root);

  bool budget_ok = true;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    ++res.panels;

    panel_estimate(f, d, out_dim, p, n5, w5, lo_est.data(), buf);
    panel_estimate(f, d, out_dim, p, n9, w9, hi_est.data(), buf);
    double diff = 0.0;
    for (int c = 0; c < out_dim; ++c)
      diff = std::max(diff, std::abs(hi_est[static_cast<std::size_t>(c)] -
                                     lo_est[static_cast<std::size_t>(c)]));

    double volume = p.hi[0] - p.lo[0];
    if (d == 2) volume *= p.hi[1] - p.lo[1];
    const double allowance = spec.abs_tol * volume / total_volume;

    if (res.panels >= spec.max_panels) budget_ok = false;

    // Force a few refinement levels so oscillatory integrands cannot slip
    // through on accidental agreement of the two coarse rules.
    const bool forced_split = p.depth < spec.min_depth;

    if ((!forced_split && diff <= allowance) || p.depth >= spec.max_depth ||
        !budget_ok) {
      for (int c = 0; c < out_dim; ++c)
        res.value[c] += hi_est[static_cast<std::size_t>(c)];
      res.error_estimate += diff;
      continue;
    }
    // Split in half along every axis; deterministic push order.
    const double mid0 = 0.5 * (p.lo[0] + p.hi[0]);
    if (d == 1) {
      stack.push_back(Panel{{p.lo[0], 0.0}, {mid0, 0.0}, p.depth + 1});
      stack.push_back(Panel{{mid0, 0.0}, {p.hi[0], 0.0}, p.depth + 1});
    } else {
      const double mid1 = 0.5 * (p.lo[1] + p.hi[1]);
      stack.push_back(Panel{{p.lo[0], p.lo[1]}, {mid0, mid1}, p.depth + 1});
      stack.push_back(Panel{{mid0, p.lo[1]}, {p.hi[0], mid1}, p.depth + 1});
      stack.push_back(Panel{{p.lo[0], mid1}, {mid0, p.hi[1]}, p.depth + 1});
      stack.push_back(Panel{{mid0, mid1}, {p.hi[0], p.hi[1]}, p.depth + 1});
    }
  }

  res.converged = budget_ok && res.error_estimate <= spec.abs_tol;
  return res;
}

}  // namespace sfdel
