#include "sfdel/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfdel/chi2.hpp"
#include "sfdel/coverage.hpp"
#include "sfdel/errors.hpp"
#include "sfdel/rng.hpp"
#include "sfdel/sites_io.hpp"

namespace sfdel {

namespace {

using nlohmann::ordered_json;

Eigen::VectorXd parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    const std::string field =
        text.substr(start, pos == std::string::npos ? pos : pos - start);
    std::size_t a = field.find_first_not_of(" \t");
    std::size_t b = field.find_last_not_of(" \t");
    if (a == std::string::npos)
      throw UsageError(what + ": empty component in '" + text + "'");
    double v = 0.0;
    const char* first = field.data() + a;
    const char* last = field.data() + b + 1;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
      throw UsageError(what + ": cannot parse '" + field + "'");
    vals.push_back(v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                           static_cast<Eigen::Index>(vals.size()));
}

std::vector<Eigen::VectorXd> parse_lag_list(const std::string& text) {
  std::vector<Eigen::VectorXd> lags;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(';', start);
    const std::string part =
        text.substr(start, pos == std::string::npos ? pos : pos - start);
    lags.push_back(parse_vector(part, "--lags"));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  for (const auto& lag : lags)
    if (lag.size() != lags.front().size())
      throw UsageError("--lags: inconsistent lag dimensions");
  return lags;
}

VariogramModel parse_model(const std::string& name) {
  if (name == "exp" || name == "exponential" || name == "exponential_separable")
    return VariogramModel::exponential_separable();
  if (name == "gauss" || name == "gaussian" || name == "gaussian_range")
    return VariogramModel::gaussian_range();
  throw UsageError("--model: unknown model '" + name +
                   "' (choose exp or gauss)");
}

ordered_json grid_json(const FrequencyGrid& grid) {
  ordered_json j;
  j["points"] = static_cast<std::int64_t>(grid.size());
  j["j_max"] = grid.j_max;
  j["spacing"] = grid.spacing;
  j["kappa"] = grid.kappa;
  j["eta"] = grid.eta;
  j["cstar"] = grid.cstar;
  return j;
}

const char* status_name(ELStatus status) {
  switch (status) {
    case ELStatus::Converged: return "converged";
    case ELStatus::Infeasible: return "infeasible";
    case ELStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void emit(const ordered_json& j, const std::string& json_path) {
  if (json_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(json_path, std::ios::binary);
    if (!os) throw DataError("cannot open '" + json_path + "' for writing");
    os << j.dump(2) << "\n";
    if (!os) throw DataError("failed writing '" + json_path + "'");
  }
}

struct CommonModelFlags {
  std::string model_name = "exp";
  std::string lags_text;
  double cstar = 0.0;
  double kappa = 0.0;
  double eta = 1.0;
  double alpha = 0.1;
  double lambda_override = 0.0;  // 0: use csv sidecar value
  std::string json_path;

  void add_to(CLI::App* cmd, bool need_grid = true) {
    cmd->add_option("--model", model_name, "variogram model: exp | gauss");
    cmd->add_option("--lags", lags_text,
                    "semicolon-separated lag vectors, e.g. \"1,1;1,-1\"")
        ->required();
    auto* c = cmd->add_option("--cstar", cstar, "grid extent constant C* > 0");
    auto* k = cmd->add_option("--kappa", kappa, "grid spacing exponent in (0, eta)");
    if (need_grid) {
      c->required();
      k->required();
    }
    cmd->add_option("--eta", eta, "grid extent exponent in (0, 1]");
    cmd->add_option("--alpha", alpha, "test level in (0,1)");
    cmd->add_option("--lambda", lambda_override,
                    "override the sampling-region scale from the sidecar");
    cmd->add_option("--json", json_path, "write JSON here instead of stdout");
  }
};

struct LoadedData {
  SiteSample sample;
  FrequencyGrid grid;
  PeriodogramSet pgram;
  EstimatingFunction fn;
};

LoadedData load_for_inference(const std::string& csv, const CommonModelFlags& flags) {
  SiteSample sample = read_sites_csv(csv);
  if (!sample.has_values())
    throw DataError(csv + ": no field values (column z) to analyze");
  if (flags.lambda_override != 0.0) {
    if (!(flags.lambda_override > 0.0))
      throw UsageError("--lambda must be positive");
    sample.lambda = flags.lambda_override;
  }
  const VariogramModel model = parse_model(flags.model_name);
  EstimatingFunction fn =
      EstimatingFunction::variogram_ls(model, parse_lag_list(flags.lags_text));
  if (fn.domain_dim() != sample.dim())
    throw UsageError("--lags dimension does not match the data");
  FrequencyGrid grid = build_grid(sample.lambda, flags.kappa, flags.eta,
                                  flags.cstar, sample.dim());
  PeriodogramSet pgram = periodogram(sample, grid);
  return LoadedData{std::move(sample), std::move(grid), std::move(pgram),
                    std::move(fn)};
}

// Acceptance interval of one coordinate through `center`, every other
// coordinate held fixed; bisection to `tol` from the accepted center.
struct SliceInterval {
  bool ok = false;
  double lo = 0.0, hi = 0.0;
};

SliceInterval slice_interval(const EstimatingFunction& fn,
                             const PeriodogramSet& pgram,
                             const Eigen::VectorXd& center, int axis,
                             double critical, double box_lo, double box_hi,
                             double tol) {
  const auto accepted = [&](double x) {
    Eigen::VectorXd theta = center;
    theta[axis] = x;
    return scaled_statistic(theta, fn, pgram).statistic <= critical;
  };
  SliceInterval out;
  if (!accepted(center[axis])) return out;
  const auto edge = [&](double outer) {
    if (accepted(outer)) return outer;
    double a = center[axis], b = outer;
    while (std::abs(b - a) > tol) {
      const double mid = 0.5 * (a + b);
      (accepted(mid) ? a : b) = mid;
    }
    return a;
  };
  out.ok = true;
  out.lo = edge(box_lo);
  out.hi = edge(box_hi);
  return out;
}

int run_simulate(const std::string& out_path, const std::string& design_name,
                 const std::string& model_name, const std::string& theta_text,
                 double lambda, int n, std::uint64_t seed,
                 const std::string& transform_name, double chisq_theta1,
                 double chisq_shift, double mean, double variance,
                 const std::string& json_path) {
  StudyConfig config;
  if (design_name == "uniform")
    config.design = SamplingDesign::uniform();
  else if (design_name == "mixture")
    config.design = SamplingDesign::default_mixture();
  else
    throw UsageError("--design: choose uniform or mixture");
  config.model = parse_model(model_name);
  config.theta_truth = parse_vector(theta_text, "--theta");
  if (transform_name == "gaussian")
    config.transform = FieldSpec::Transform::GaussianIdentity;
  else if (transform_name == "chisq")
    config.transform = FieldSpec::Transform::ChiSqShifted;
  else
    throw UsageError("--transform: choose gaussian or chisq");
  config.chisq_theta1 = chisq_theta1;
  config.chisq_shift = chisq_shift;

  FieldSpec spec = field_spec_for(config);
  spec.mean = mean;
  spec.variance = variance;

  const Seed base{seed, 0};
  SiteSample sample =
      draw_sites(config.design, config.region, lambda, n, base.sub(1));
  sample.values = simulate_field(spec, sample, base.sub(2));
  write_sites_csv(sample, out_path);

  ordered_json j;
  j["file"] = out_path;
  j["n"] = n;
  j["lambda"] = lambda;
  j["seed"] = seed;
  j["theta"] = vector_json(config.theta_truth);
  emit(j, json_path);
  std::cerr << "wrote " << n << " sites (lambda = " << lambda << ") to "
            << out_path << "\n";
  return 0;
}

int run_fit(const std::string& csv, const CommonModelFlags& flags,
            const std::string& init_text, const std::string& lo_text,
            const std::string& hi_text, double interval_tol) {
  LoadedData data = load_for_inference(csv, flags);
  const int td = data.fn.theta_dim();

  Eigen::VectorXd lo = Eigen::VectorXd::Constant(td, 0.05);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(td, 8.0);
  if (!lo_text.empty()) lo = parse_vector(lo_text, "--lo");
  if (!hi_text.empty()) hi = parse_vector(hi_text, "--hi");
  if (lo.size() != td || hi.size() != td)
    throw UsageError("--lo/--hi must have one value per parameter");
  Eigen::VectorXd init = 0.5 * (lo + hi);
  if (!init_text.empty()) init = parse_vector(init_text, "--init");
  if (init.size() != td)
    throw UsageError("--init must have one value per parameter");

  const Eigen::VectorXd estimate =
      point_estimate(data.fn, data.pgram, init, lo, hi);
  const ScaledStatistic stat = scaled_statistic(estimate, data.fn, data.pgram);
  const double critical = chi2_quantile(1.0 - flags.alpha, data.fn.p());

  ordered_json j;
  j["estimate"] = vector_json(estimate);
  j["status"] = status_name(stat.el_status);
  j["neg_log_ratio"] = stat.neg_log_ratio;
  j["a_n"] = stat.a_n;
  j["statistic"] = stat.statistic;
  j["df"] = stat.df;
  j["alpha"] = flags.alpha;
  j["critical"] = critical;
  j["intervals"] = ordered_json::array();
  for (int axis = 0; axis < td; ++axis) {
    const SliceInterval iv =
        slice_interval(data.fn, data.pgram, estimate, axis, critical, lo[axis],
                       hi[axis], interval_tol);
    ordered_json ij;
    ij["parameter"] = axis + 1;
    if (iv.ok) {
      ij["lo"] = iv.lo;
      ij["hi"] = iv.hi;
    } else {
      ij["lo"] = nullptr;
      ij["hi"] = nullptr;
    }
    j["intervals"].push_back(std::move(ij));
  }
  j["grid"] = grid_json(data.grid);
  j["n"] = static_cast<std::int64_t>(data.sample.n());
  j["lambda"] = data.sample.lambda;
  j["file"] = csv;
  emit(j, flags.json_path);

  std::cerr << "estimate:";
  for (int i = 0; i < td; ++i) std::cerr << " " << estimate[i];
  std::cerr << "  (statistic " << stat.statistic << ", " << (1 - flags.alpha) * 100
            << "% critical " << critical << ", grid " << data.grid.size()
            << " points)\n";
  return 0;
}

int run_test(const std::string& csv, const CommonModelFlags& flags,
             const std::string& theta0_text) {
  LoadedData data = load_for_inference(csv, flags);
  const Eigen::VectorXd theta0 = parse_vector(theta0_text, "--theta0");
  if (theta0.size() != data.fn.theta_dim())
    throw UsageError("--theta0 must have one value per parameter");
  const TestResult res = test_hypothesis(theta0, data.fn, data.pgram, flags.alpha);

  const bool converged = res.stat.el_status == ELStatus::Converged;
  ordered_json j;
  j["theta0"] = vector_json(theta0);
  j["status"] = status_name(res.stat.el_status);
  if (converged) {
    j["statistic"] = res.stat.statistic;
    j["neg_log_ratio"] = res.stat.neg_log_ratio;
  } else {
    j["statistic"] = nullptr;
    j["neg_log_ratio"] = nullptr;
  }
  j["a_n"] = res.stat.a_n;
  j["a_n_fallback"] = res.stat.a_n_fallback;
  j["df"] = res.stat.df;
  j["alpha"] = res.alpha;
  j["critical"] = res.critical;
  j["pvalue"] = res.pvalue;
  j["reject"] = res.reject;
  j["grid"] = grid_json(data.grid);
  j["n"] = static_cast<std::int64_t>(data.sample.n());
  j["lambda"] = data.sample.lambda;
  j["file"] = csv;
  emit(j, flags.json_path);

  std::cerr << "H0 " << (res.reject ? "rejected" : "not rejected") << " at level "
            << res.alpha << " (status " << status_name(res.stat.el_status)
            << ", p-value " << res.pvalue << ")\n";
  return 0;
}

int run_coverage_cmd(const std::string& config_path, const std::string& json_path,
                     const std::string& csv_path, int parallelism_override) {
  std::ifstream is(config_path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + config_path + "'");
  nlohmann::json config_json;
  try {
    is >> config_json;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(config_path + ": " + e.what());
  }
  StudyConfig config = study_config_from_json(config_json);
  if (parallelism_override > 0) config.parallelism = parallelism_override;

  const std::vector<CoverageRow> rows = run_coverage(config);
  if (!csv_path.empty()) write_coverage_csv(rows, csv_path);
  emit(coverage_rows_to_json(config, rows), json_path);
  std::cerr << rows.size() << " coverage cells, " << config.replicates
            << " replicates each\n";
  return 0;
}

int run_semivariogram(const std::string& csv, int bins, double max_dist_fraction,
                      const std::string& json_path, const std::string& csv_out) {
  const SiteSample sample = read_sites_csv(csv);
  if (!sample.has_values())
    throw DataError(csv + ": no field values (column z) to analyze");
  const std::vector<SemivariogramBin> table =
      matheron_semivariogram(sample, bins, max_dist_fraction);

  ordered_json j;
  j["bins"] = ordered_json::array();
  for (const auto& bin : table) {
    ordered_json bj;
    bj["midpoint"] = bin.midpoint;
    if (bin.average.has_value())
      bj["average"] = *bin.average;
    else
      bj["average"] = nullptr;
    bj["pairs"] = static_cast<std::int64_t>(bin.pairs);
    j["bins"].push_back(std::move(bj));
  }
  j["n"] = static_cast<std::int64_t>(sample.n());
  j["file"] = csv;
  emit(j, json_path);

  if (!csv_out.empty()) {
    std::ofstream os(csv_out, std::ios::binary);
    if (!os) throw DataError("cannot open '" + csv_out + "' for writing");
    os << "midpoint,average,pairs\n";
    for (const auto& bin : table) {
      os << bin.midpoint << ',';
      if (bin.average.has_value()) os << *bin.average;
      os << ',' << bin.pairs << "\n";
    }
  }
  std::cerr << table.size() << " distance bins over " << sample.n() << " sites\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "Frequency-domain empirical likelihood inference for irregularly "
      "spaced spatial data"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw sites and a field, write CSV");
  std::string sim_out, sim_design = "uniform", sim_model = "exp";
  std::string sim_theta = "1,1", sim_transform = "gaussian", sim_json;
  double sim_lambda = 0.0, sim_chisq_theta1 = 1.0, sim_chisq_shift = 0.0;
  double sim_mean = 0.0, sim_variance = 1.0;
  int sim_n = 0;
  std::uint64_t sim_seed = 0;
  sim->add_option("--out", sim_out, "output CSV path")->required();
  sim->add_option("--design", sim_design, "sampling design: uniform | mixture");
  sim->add_option("--model", sim_model, "variogram model: exp | gauss");
  sim->add_option("--theta", sim_theta, "true parameter, comma separated");
  sim->add_option("--lambda", sim_lambda, "sampling-region scale > 0")->required();
  sim->add_option("--n", sim_n, "number of sites")->required();
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_option("--transform", sim_transform, "field law: gaussian | chisq");
  sim->add_option("--chisq-theta1", sim_chisq_theta1, "chi-square scale parameter");
  sim->add_option("--chisq-shift", sim_chisq_shift, "chi-square location shift");
  sim->add_option("--mean", sim_mean, "field mean (gaussian only)");
  sim->add_option("--variance", sim_variance, "field variance (gaussian only)");
  sim->add_option("--json", sim_json, "write run summary JSON here");

  // fit
  auto* fit = app.add_subcommand("fit", "point estimate and confidence intervals");
  std::string fit_csv, fit_init, fit_lo, fit_hi;
  CommonModelFlags fit_flags;
  double fit_interval_tol = 1e-4;
  fit->add_option("data", fit_csv, "input CSV")->required();
  fit_flags.add_to(fit);
  fit->add_option("--init", fit_init, "optimizer start, comma separated");
  fit->add_option("--lo", fit_lo, "search box lower corner");
  fit->add_option("--hi", fit_hi, "search box upper corner");
  fit->add_option("--interval-tol", fit_interval_tol, "interval endpoint tolerance");

  // test
  auto* test = app.add_subcommand("test", "test a null parameter value");
  std::string test_csv, test_theta0;
  CommonModelFlags test_flags;
  test->add_option("data", test_csv, "input CSV")->required();
  test->add_option("--theta0", test_theta0, "null parameter, comma separated")
      ->required();
  test_flags.add_to(test);

  // coverage
  auto* cov = app.add_subcommand("coverage", "Monte Carlo coverage study");
  std::string cov_config, cov_json, cov_csv;
  int cov_parallelism = 0;
  cov->add_option("--config", cov_config, "study config JSON")->required();
  cov->add_option("--json", cov_json, "write rows JSON here instead of stdout");
  cov->add_option("--csv", cov_csv, "also write rows CSV here");
  cov->add_option("--parallelism", cov_parallelism,
                  "worker threads (overrides config)");

  // semivariogram
  auto* semi = app.add_subcommand("semivariogram", "binned moment semivariogram");
  std::string semi_csv_in, semi_json, semi_csv_out;
  int semi_bins = 10;
  double semi_fraction = 0.5;
  semi->add_option("data", semi_csv_in, "input CSV")->required();
  semi->add_option("--bins", semi_bins, "number of distance bins");
  semi->add_option("--max-dist-fraction", semi_fraction,
                   "fraction of the max pair distance to bin");
  semi->add_option("--json", semi_json, "write JSON here instead of stdout");
  semi->add_option("--csv", semi_csv_out, "also write the table as CSV here");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(sim))
      return run_simulate(sim_out, sim_design, sim_model, sim_theta, sim_lambda,
                          sim_n, sim_seed, sim_transform, sim_chisq_theta1,
                          sim_chisq_shift, sim_mean, sim_variance, sim_json);
    if (app.got_subcommand(fit))
      return run_fit(fit_csv, fit_flags, fit_init, fit_lo, fit_hi,
                     fit_interval_tol);
    if (app.got_subcommand(test))
      return run_test(test_csv, test_flags, test_theta0);
    if (app.got_subcommand(cov))
      return run_coverage_cmd(cov_config, cov_json, cov_csv, cov_parallelism);
    if (app.got_subcommand(semi))
      return run_semivariogram(semi_csv_in, semi_bins, semi_fraction, semi_json,
                               semi_csv_out);
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const GridError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const KernelError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("sfdel");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sfdel
