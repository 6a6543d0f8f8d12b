// Acceptance gate: one binary that exercises every shipped guarantee end to
// end and prints a single [PASS]/[FAIL] line per check, with the measured
// numbers inline.  Exit status is the number of failed checks.
//
// SFDEL_ACCEPT_TIER=smoke shrinks the uniform-design coverage study to 100
// replicates with a widened tolerance; every other check runs identically in
// both tiers.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfdel/chi2.hpp"
#include "sfdel/coverage.hpp"
#include "sfdel/el.hpp"
#include "sfdel/estimating.hpp"
#include "sfdel/field.hpp"
#include "sfdel/frequency_grid.hpp"
#include "sfdel/inference.hpp"
#include "sfdel/periodogram.hpp"
#include "sfdel/sampling.hpp"

using namespace sfdel;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

// Empirical 90th percentile: order statistic at ceil(0.9 m).
double p90(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto idx =
      static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(v.size()))) - 1;
  return v[idx];
}

struct Gate {
  int failures = 0;
  int total = 0;

  void check(int index, const std::string& what, bool ok,
             const std::string& detail) {
    ++total;
    if (!ok) ++failures;
    std::printf("[%s] %2d. %s%s%s\n", ok ? "PASS" : "FAIL", index, what.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
  }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- check 1
void closed_form_el(Gate& gate) {
  Eigen::MatrixXd g1(2, 1);
  g1 << -1.0, 1.0;
  const ELSolution a = solve_el(ELProblem{g1});
  bool ok = a.status == ELStatus::Converged &&
            std::abs(a.neg_log_ratio) <= 1e-10 &&
            std::abs(a.weights[0] - 0.5) <= 1e-10 &&
            std::abs(a.weights[1] - 0.5) <= 1e-10;

  Eigen::MatrixXd g2(2, 1);
  g2 << -1.0, 3.0;
  const ELSolution b = solve_el(ELProblem{g2});
  ok = ok && b.status == ELStatus::Converged &&
       std::abs(b.beta[0] - 1.0 / 3.0) <= 1e-10 &&
       std::abs(b.weights[0] - 0.75) <= 1e-10 &&
       std::abs(b.weights[1] - 0.25) <= 1e-10 &&
       std::abs(b.neg_log_ratio - std::log(4.0 / 3.0)) <= 1e-10;

  gate.check(1, "empirical likelihood closed forms ({-1,1}, {-1,3})", ok,
             fmt("log-ratio errors %.2e and %.2e",
                 std::abs(a.neg_log_ratio),
                 std::abs(b.neg_log_ratio - std::log(4.0 / 3.0))));
}

// ---------------------------------------------------------------- check 2
// Independent one-dimensional solver: with one moment, the dual
// D(beta) = -sum log(1 + beta g_k) is strictly convex on the open interval
// where every log argument is positive; golden-section locates its minimum
// without any of the production solver's machinery (no Newton, no line
// search, no matrix algebra).
double golden_section_nlr(const Eigen::VectorXd& g) {
  const double gmax = g.maxCoeff(), gmin = g.minCoeff();
  double lo = -1.0 / gmax, hi = -1.0 / gmin;
  const double width = hi - lo;
  lo += 1e-12 * width;
  hi -= 1e-12 * width;
  auto dual = [&](double beta) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < g.size(); ++k) s -= std::log1p(beta * g[k]);
    return s;
  };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = dual(c), fd = dual(d);
  for (int it = 0; it < 300 && (b - a) > 1e-14 * width; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = dual(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = dual(d);
    }
  }
  return -dual(0.5 * (a + b));
}

void el_against_oracle(Gate& gate) {
  std::mt19937_64 rng(424243);
  std::normal_distribution<double> z;
  int checked = 0;
  double worst = 0.0;
  while (checked < 200) {
    const int n = 2 + static_cast<int>(rng() % 6);  // 2..7 rows
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g[i] = z(rng) + 0.25 * std::cos(double(checked));
    if (g.minCoeff() >= 0.0 || g.maxCoeff() <= 0.0) continue;  // infeasible draw
    const ELSolution sol = solve_el(ELProblem{g});
    if (sol.status != ELStatus::Converged) {
      worst = std::numeric_limits<double>::infinity();
      break;
    }
    const double ref = golden_section_nlr(g);
    worst = std::max(worst,
                     std::abs(sol.neg_log_ratio - ref) / (1.0 + std::abs(ref)));
    ++checked;
  }
  gate.check(2,
             "solver matches an independent golden-section dual search on 200 "
             "random one-moment instances (2..7 rows)",
             worst <= 1e-5, fmt("worst relative gap %.2e (tolerance 1e-5)", worst));
}

// ---------------------------------------------------------------- check 3
void chi_square_checks(Gate& gate) {
  const double anchor = -2.0 * std::log(0.1);  // exact 90% point of chi2(2)
  const double qerr = std::abs(chi2_quantile(0.90, 2) - anchor);

  double worst = 0.0;
  for (int df = 1; df <= 5; ++df)
    for (int i = 1; i <= 3000; ++i) {
      const double x = 0.01 * i;
      worst = std::max(worst, std::abs(chi2_quantile(chi2_cdf(x, df), df) - x));
    }

  gate.check(3,
             "chi-square 90% point of 2 df equals -2 log(0.1) and "
             "cdf/quantile round-trips on [0.01,30] x df 1..5",
             qerr <= 1e-8 && worst <= 1e-8,
             fmt("anchor error %.2e, worst round-trip error %.2e", qerr, worst));
}

// ---------------------------------------------------------------- check 4
void invariance_checks(Gate& gate) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const EstimatingFunction fn = EstimatingFunction::variogram_ls(
      VariogramModel::exponential_separable(), {vec2(1, 1), vec2(1, -1)});

  double worst_scale = 0.0, worst_shift = 0.0, worst_reflect = 0.0;
  bool statuses_agree = true;
  for (int s = 0; s < 50; ++s) {
    const double lambda = 5.0 + 4.0 * u(rng);
    const int n = 40 + static_cast<int>(rng() % 61);
    SiteSample sample =
        draw_sites(SamplingDesign::uniform(), PrototypeRegion::unit(2), lambda,
                   n, Seed{9000 + static_cast<std::uint64_t>(s), 0});
    FieldSpec spec;
    spec.model = CorrelationModel::exponential_separable(1.0, 1.0);
    sample.values = simulate_field(spec, sample,
                                   Seed{9000 + static_cast<std::uint64_t>(s), 1});
    const FrequencyGrid grid = build_grid(lambda, 0.2, 0.9, 1.0, 2);
    const PeriodogramSet base = periodogram(sample, grid, true);

    // frequency reflection: the grid enumerates -w at the mirrored index
    const Eigen::Index m = base.grid.size();
    for (Eigen::Index k = 0; k < m; ++k)
      worst_reflect = std::max(
          worst_reflect, std::abs(base.raw[k] - base.raw[m - 1 - k]) /
                             (1.0 + base.raw.maxCoeff()));

    const double c = 0.4 + 2.1 * u(rng);
    const double shift = -9.0 + 18.0 * u(rng);
    SiteSample scaled = sample, shifted = sample;
    scaled.values *= c;
    shifted.values.array() += shift;

    const ScaledStatistic s0 = scaled_statistic(vec2(1, 1), fn, base);
    const ScaledStatistic s1 =
        scaled_statistic(vec2(1, 1), fn, periodogram(scaled, grid, true));
    const ScaledStatistic s2 =
        scaled_statistic(vec2(1, 1), fn, periodogram(shifted, grid, true));
    if (s0.el_status != s1.el_status || s0.el_status != s2.el_status) {
      statuses_agree = false;
      continue;
    }
    if (s0.el_status != ELStatus::Converged) continue;
    worst_scale = std::max(worst_scale, std::abs(s1.statistic - s0.statistic) /
                                            (1.0 + std::abs(s0.statistic)));
    worst_shift = std::max(worst_shift, std::abs(s2.statistic - s0.statistic) /
                                            (1.0 + std::abs(s0.statistic)));
  }
  gate.check(4,
             "statistic invariant under value scaling and shifts; "
             "periodogram symmetric under frequency reflection (50 samples)",
             statuses_agree && worst_scale <= 1e-8 && worst_shift <= 1e-8 &&
                 worst_reflect <= 1e-12,
             fmt("scale %.2e, shift %.2e (tol 1e-8); reflection %.2e (tol 1e-12)",
                 worst_scale, worst_shift, worst_reflect));
}

// ---------------------------------------------------------------- check 5
void moment_quadrature(Gate& gate) {
  const SpectralDensityOracle phi{1.0, 1.0};
  const double rho = std::exp(-2.0);  // lag correlation at (1,1) and (1,-1)

  const EstimatingFunction ac =
      EstimatingFunction::autocorrelation({vec2(1, 1), vec2(1, -1)});
  const QuadratureResult ra = spectral_moment_residual(ac, vec2(rho, rho), phi);

  const EstimatingFunction vls = EstimatingFunction::variogram_ls(
      VariogramModel::exponential_separable(), {vec2(1, 1), vec2(1, -1)});
  const QuadratureResult rv = spectral_moment_residual(vls, vec2(1, 1), phi);

  const double wa = ra.value.cwiseAbs().maxCoeff();
  const double wv = rv.value.cwiseAbs().maxCoeff();
  gate.check(5,
             "spectral moment conditions vanish at truth under adaptive "
             "quadrature (autocorrelation and variogram forms)",
             ra.converged && rv.converged && wa < 1e-3 && wv < 1e-3,
             fmt("residuals %.2e and %.2e (tolerance 1e-3)", wa, wv));
}

// ---------------------------------------------------------------- checks 6-7
nlohmann::json table_cell_config(const std::string& design, int replicates) {
  nlohmann::json j;
  j["design"] = design;
  j["model"] = "exponential_separable";
  j["theta_truth"] = {1.0, 1.0};
  j["lags"] = {{1.0, 1.0}, {1.0, -1.0}};
  j["lambdas"] = {24.0};
  j["ns"] = {400};
  j["cstars"] = {2.0};
  j["kappas"] = {0.1};
  j["alpha"] = 0.1;
  j["replicates"] = replicates;
  j["seed"] = 20260814;
  j["parallelism"] = 1;
  return j;
}

void coverage_cell(Gate& gate, int index, const std::string& design,
                   double target, int replicates, double tol,
                   const std::string& tier_note) {
  const StudyConfig config =
      study_config_from_json(table_cell_config(design, replicates));
  const std::vector<CoverageRow> rows = run_coverage(config);
  const CoverageRow& row = rows.at(0);
  const bool ok = row.used > 0 && std::abs(row.coverage_percent - target) <= tol;
  gate.check(index,
             fmt("%s-design coverage study reproduces the reference cell%s",
                 design.c_str(), tier_note.c_str()),
             ok,
             fmt("coverage %.1f%% vs %.1f +- %.1f (%d replicates, %d used, "
                 "%d failures)",
                 row.coverage_percent, target, tol, row.replicates, row.used,
                 row.failures));
}

// ---------------------------------------------------------------- check 8
struct RegimeSample {
  std::vector<double> nlr;     // -log R at truth
  std::vector<double> scaled;  // 2 a_n (-log R)
  int excluded = 0;
};

RegimeSample run_regime(const VariogramModel& vm, const Eigen::VectorXd& theta,
                        double lambda, int n, double cstar, double kappa,
                        bool center, double lag_scale, int reps,
                        std::uint64_t seed) {
  const FrequencyGrid grid = build_grid(lambda, kappa, 1.0, cstar, 2);
  const EstimatingFunction fn = EstimatingFunction::variogram_ls(
      vm, {vec2(lag_scale, lag_scale), vec2(lag_scale, -lag_scale)});
  FieldSpec spec;
  spec.model = vm.correlation_at(theta);

  RegimeSample out;
  for (int r = 0; r < reps; ++r) {
    SiteSample s = draw_sites(SamplingDesign::uniform(), PrototypeRegion::unit(2),
                              lambda, n, Seed{seed, static_cast<std::uint64_t>(2 * r)});
    s.values =
        simulate_field(spec, s, Seed{seed, static_cast<std::uint64_t>(2 * r + 1)});
    const ScaledStatistic st = scaled_statistic(theta, fn, periodogram(s, grid, center));
    if (st.el_status != ELStatus::Converged) {
      ++out.excluded;
      continue;
    }
    out.nlr.push_back(st.neg_log_ratio);
    out.scaled.push_back(st.statistic);
  }
  return out;
}

void scaling_dichotomy(Gate& gate) {
  const double target = -2.0 * std::log(0.1);
  const double lo = 0.8 * target, hi = 1.2 * target;
  const int reps = 300;

  // Pure increasing domain: sites barely densify (576 over a 24 x 24 region),
  // so the raw ratio needs only the single scaling -log R ~ chi-square.
  const RegimeSample pid =
      run_regime(VariogramModel::exponential_separable(), vec2(1, 1), 24.0, 576,
                 2.0, 0.1, true, 1.0, reps, 20260814);
  const double pid_raw = p90(pid.nlr);
  const double pid_scaled = p90(pid.scaled);

  // Fast infill: 2000 sites over an 8 x 8 region (31 per unit area), where
  // the raw ratio needs the doubled scaling -2 log R ~ chi-square.
  const RegimeSample mid =
      run_regime(VariogramModel::exponential_separable(), vec2(2, 2), 8.0, 2000,
                 1.0, 0.1, false, 1.5, reps, 20260814);
  std::vector<double> mid2;
  mid2.reserve(mid.nlr.size());
  for (double v : mid.nlr) mid2.push_back(2.0 * v);
  const double mid_raw = p90(mid2);
  const double mid_scaled = p90(mid.scaled);

  const bool ok = pid_raw >= lo && pid_raw <= hi && mid_raw >= lo &&
                  mid_raw <= hi && pid_scaled >= lo && pid_scaled <= hi &&
                  mid_scaled >= lo && mid_scaled <= hi;
  gate.check(
      8,
      "both sampling regimes calibrate: sparse-domain P90(-log R) and "
      "dense-infill P90(-2 log R) near the chi-square point, and the "
      "data-driven rescaled statistic near it in both",
      ok,
      fmt("sparse raw %.3f scaled %.3f; dense raw %.3f scaled %.3f; band "
          "[%.3f, %.3f]; excluded %d+%d of %d each",
          pid_raw, pid_scaled, mid_raw, mid_scaled, lo, hi, pid.excluded,
          mid.excluded, reps));
}

// ---------------------------------------------------------------- check 9
void skewed_field_intervals(Gate& gate) {
  nlohmann::json j;
  j["design"] = "uniform";
  j["model"] = "gaussian_range";
  j["theta_truth"] = {1.0};
  j["lags"] = {{1.0, 1.0}, {2.0, 2.0}};
  j["transform"] = "chisq_shifted";
  j["chisq_theta1"] = 7.5;
  j["chisq_shift"] = 40.23;
  j["lambdas"] = {10.0};
  j["ns"] = {105};
  j["cstars"] = {2.0};
  j["kappas"] = {0.05, 0.1, 0.2};
  j["alpha"] = 0.1;
  j["replicates"] = 300;
  j["seed"] = 20260814;
  j["parallelism"] = 1;

  const std::vector<CoverageRow> rows = run_coverage(study_config_from_json(j));
  const double targets[3] = {90.5, 87.4, 93.3};
  bool ok = rows.size() == 3;
  std::string detail;
  for (std::size_t i = 0; i < rows.size() && i < 3; ++i) {
    ok = ok && std::abs(rows[i].coverage_percent - targets[i]) <= 6.0;
    detail += fmt("%skappa %.2f: %.1f%% vs %.1f", i ? "; " : "", rows[i].kappa,
                  rows[i].coverage_percent, targets[i]);
  }
  gate.check(9,
             "skewed (shifted chi-square) field: 90% interval coverage across "
             "three grid spacings within +-6 points",
             ok, detail);
}

// ---------------------------------------------------------------- check 10
void gradient_checks(Gate& gate) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const bool separable = (i % 2) == 0;
    const VariogramModel vm = separable ? VariogramModel::exponential_separable()
                                        : VariogramModel::gaussian_range();
    Eigen::VectorXd theta(vm.param_dim());
    for (Eigen::Index jx = 0; jx < theta.size(); ++jx)
      theta[jx] = 0.3 + 2.2 * u(rng);
    Eigen::VectorXd h = vec2(-3.0 + 6.0 * u(rng), -3.0 + 6.0 * u(rng));
    if (h.cwiseAbs().maxCoeff() < 0.1) h = vec2(1.0, 0.5);

    const Eigen::VectorXd analytic = vm.grad_two_gamma(theta, h);
    Eigen::VectorXd fd(theta.size());
    for (Eigen::Index jx = 0; jx < theta.size(); ++jx) {
      const double eps = 1e-5 * std::max(1.0, std::abs(theta[jx]));
      Eigen::VectorXd tp = theta, tm = theta;
      tp[jx] += eps;
      tm[jx] -= eps;
      fd[jx] = (2.0 * vm.semivariogram(tp, h) - 2.0 * vm.semivariogram(tm, h)) /
               (2.0 * eps);
    }
    worst = std::max(worst, (fd - analytic).cwiseAbs().maxCoeff() /
                                std::max(1.0, analytic.cwiseAbs().maxCoeff()));
  }
  gate.check(10,
             "closed-form variogram gradients match central finite differences "
             "(100 random parameter/lag draws, both families)",
             worst <= 1e-6, fmt("worst relative error %.2e (tolerance 1e-6)", worst));
}

// ---------------------------------------------------------------- check 11
void determinism_check(Gate& gate) {
  nlohmann::json j;
  j["design"] = "uniform";
  j["model"] = "exponential_separable";
  j["theta_truth"] = {1.0, 1.0};
  j["lags"] = {{1.0, 1.0}, {1.0, -1.0}};
  j["lambdas"] = {8.0};
  j["ns"] = {60};
  j["cstars"] = {1.0};
  j["kappas"] = {0.1};
  j["alpha"] = 0.1;
  j["replicates"] = 16;
  j["seed"] = 90210;

  StudyConfig serial = study_config_from_json(j);
  serial.parallelism = 1;
  StudyConfig parallel = study_config_from_json(j);
  parallel.parallelism = 8;

  const std::string a = coverage_rows_to_json(serial, run_coverage(serial)).dump(2);
  const std::string b =
      coverage_rows_to_json(parallel, run_coverage(parallel)).dump(2);
  gate.check(11,
             "coverage study output is byte-identical at parallelism 1 and 8",
             a == b, a == b ? "identical JSON" : "outputs differ");
}

}  // namespace

int main() {
  const char* tier_env = std::getenv("SFDEL_ACCEPT_TIER");
  const bool smoke = tier_env != nullptr && std::strcmp(tier_env, "smoke") == 0;
  std::printf("acceptance tier: %s\n", smoke ? "smoke" : "full");

  Gate gate;
  closed_form_el(gate);
  el_against_oracle(gate);
  chi_square_checks(gate);
  invariance_checks(gate);
  moment_quadrature(gate);
  coverage_cell(gate, 6, "uniform", 88.4, smoke ? 100 : 500, smoke ? 8.0 : 3.5,
                smoke ? " (smoke tier)" : "");
  coverage_cell(gate, 7, "mixture", 90.7, 500, 3.5, "");
  scaling_dichotomy(gate);
  skewed_field_intervals(gate);
  gradient_checks(gate);
  determinism_check(gate);

  std::printf("acceptance summary: %d/%d passed\n", gate.total - gate.failures,
              gate.total);
  return gate.failures;
}
