#include "sfdel/coverage.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <thread>
#include <vector>

#include "sfdel/errors.hpp"
#include "sfdel/rng.hpp"
#include "sfdel/sites_io.hpp"

namespace sfdel {

namespace {

// Per-replicate outcome slots; aggregation reads them in index order so the
// result is independent of thread scheduling.
enum : std::uint8_t {
  kCovered = 0,
  kRejected = 1,
  kRejectedInfeasible = 2,
  kFailed = 3,
};

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

FieldSpec field_spec_for(const StudyConfig& config) {
  if (config.theta_truth.size() != config.model.param_dim())
    throw UsageError("coverage: theta_truth length does not match the model");
  FieldSpec spec;
  spec.mean = 0.0;
  spec.variance = 1.0;
  spec.transform = config.transform;
  if (config.transform == FieldSpec::Transform::GaussianIdentity) {
    spec.model = config.model.correlation_at(config.theta_truth);
    return spec;
  }
  // Chi-square transformed fields: corr(Z) = corr(Y)^2, so draw the latent
  // Gaussian Y with the square root of the target correlation.
  switch (config.model.kind) {
    case VariogramModel::Kind::ExponentialSeparable:
      spec.model = CorrelationModel::exponential_separable(
          0.5 * config.theta_truth[0], 0.5 * config.theta_truth[1]);
      break;
    case VariogramModel::Kind::GaussianRange:
      spec.model = CorrelationModel::gaussian_isotropic(
          config.theta_truth[0] * std::sqrt(2.0));
      break;
  }
  spec.chisq_theta1 = config.chisq_theta1;
  spec.chisq_shift = config.chisq_shift;
  return spec;
}

std::vector<CoverageRow> run_coverage(const StudyConfig& config) {
  if (config.lambdas.empty() || config.ns.empty() || config.cstars.empty() ||
      config.kappas.empty())
    throw UsageError("coverage: lambdas/ns/cstars/kappas must be non-empty");
  if (config.replicates < 1) throw UsageError("coverage: replicates must be >= 1");
  if (config.parallelism < 1) throw UsageError("coverage: parallelism must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw UsageError("coverage: alpha must lie in (0,1)");
  if (config.lags.empty()) throw UsageError("coverage: need at least one lag");

  const EstimatingFunction fn =
      EstimatingFunction::variogram_ls(config.model, config.lags);
  const FieldSpec spec = field_spec_for(config);
  const int d = config.region.dim();
  const int reps = config.replicates;

  std::vector<CoverageRow> rows;
  std::uint64_t cell = 0;
  for (double cstar : config.cstars) {
    for (double kappa : config.kappas) {
      for (double lambda : config.lambdas) {
        for (int n : config.ns) {
          const FrequencyGrid grid =
              build_grid(lambda, kappa, config.eta, cstar, d);
          std::vector<std::uint8_t> outcome(static_cast<std::size_t>(reps),
                                            kFailed);

          const auto replicate = [&](int r) {
            const Seed base{config.seed,
                            cell * static_cast<std::uint64_t>(reps) +
                                static_cast<std::uint64_t>(r)};
            try {
              SiteSample sample = draw_sites(config.design, config.region,
                                             lambda, n, base.sub(1));
              sample.values = simulate_field(spec, sample, base.sub(2));
              const PeriodogramSet pgram = periodogram(sample, grid);
              const TestResult res =
                  test_hypothesis(config.theta_truth, fn, pgram, config.alpha);
              switch (res.stat.el_status) {
                case ELStatus::Converged:
                  outcome[static_cast<std::size_t>(r)] =
                      res.reject ? kRejected : kCovered;
                  break;
                case ELStatus::Infeasible:
                  outcome[static_cast<std::size_t>(r)] = kRejectedInfeasible;
                  break;
                case ELStatus::MaxIterations:
                  outcome[static_cast<std::size_t>(r)] = kFailed;
                  break;
              }
            } catch (const std::exception&) {
              outcome[static_cast<std::size_t>(r)] = kFailed;
            }
          };

          const int workers = std::min(config.parallelism, reps);
          if (workers <= 1) {
            for (int r = 0; r < reps; ++r) replicate(r);
          } else {
            std::atomic<int> next{0};
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) {
              pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < reps;
                     r = next.fetch_add(1))
                  replicate(r);
              });
            }
            for (auto& t : pool) t.join();
          }

          CoverageRow row;
          row.cstar = cstar;
          row.kappa = kappa;
          row.lambda = lambda;
          row.n = n;
          row.replicates = reps;
          int covered = 0;
          for (int r = 0; r < reps; ++r) {
            switch (outcome[static_cast<std::size_t>(r)]) {
              case kCovered:
                ++covered;
                ++row.used;
                break;
              case kRejected:
                ++row.used;
                break;
              case kRejectedInfeasible:
                ++row.used;
                ++row.infeasible;
                break;
              default:
                ++row.failures;
                break;
            }
          }
          row.coverage_percent =
              row.used > 0 ? 100.0 * covered / row.used : 0.0;
          if (row.used == 0)
            warn("coverage cell with no usable replicates (lambda=" +
                 format_double(lambda) + ", n=" + std::to_string(n) + ")");
          rows.push_back(row);
          ++cell;
        }
      }
    }
  }
  return rows;
}

StudyConfig study_config_from_json(const nlohmann::json& j) {
  StudyConfig config;
  try {
    if (j.contains("design")) {
      const auto& dj = j.at("design");
      if (dj.is_string()) {
        const std::string s = dj.get<std::string>();
        if (s == "uniform")
          config.design = SamplingDesign::uniform();
        else if (s == "mixture")
          config.design = SamplingDesign::default_mixture();
        else
          throw UsageError("coverage config: unknown design '" + s + "'");
      } else {
        std::vector<double> weights = dj.at("weights").get<std::vector<double>>();
        std::vector<GaussianComponent> comps;
        for (const auto& cj : dj.at("components")) {
          GaussianComponent comp;
          const auto mean = cj.at("mean").get<std::vector<double>>();
          comp.mean = Eigen::Map<const Eigen::VectorXd>(
              mean.data(), static_cast<Eigen::Index>(mean.size()));
          const auto cov = cj.at("cov").get<std::vector<std::vector<double>>>();
          const auto dim = static_cast<Eigen::Index>(cov.size());
          comp.cov.resize(dim, dim);
          for (Eigen::Index r = 0; r < dim; ++r) {
            if (static_cast<Eigen::Index>(cov[static_cast<std::size_t>(r)].size()) != dim)
              throw UsageError("coverage config: component cov must be square");
            for (Eigen::Index c = 0; c < dim; ++c)
              comp.cov(r, c) = cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
          }
          comps.push_back(std::move(comp));
        }
        config.design = SamplingDesign::mixture(std::move(weights), std::move(comps));
      }
    }
    if (j.contains("region")) {
      const auto lo = j.at("region").at("lo").get<std::vector<double>>();
      const auto hi = j.at("region").at("hi").get<std::vector<double>>();
      if (lo.size() != hi.size())
        throw UsageError("coverage config: region lo/hi length mismatch");
      config.region = PrototypeRegion(
          Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size())),
          Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size())));
    }
    const std::string model = j.value("model", std::string("exponential_separable"));
    if (model == "exponential_separable")
      config.model = VariogramModel::exponential_separable();
    else if (model == "gaussian_range")
      config.model = VariogramModel::gaussian_range();
    else
      throw UsageError("coverage config: unknown model '" + model + "'");

    const auto theta = j.at("theta_truth").get<std::vector<double>>();
    config.theta_truth = Eigen::Map<const Eigen::VectorXd>(
        theta.data(), static_cast<Eigen::Index>(theta.size()));

    for (const auto& lj : j.at("lags")) {
      const auto lag = lj.get<std::vector<double>>();
      config.lags.emplace_back(Eigen::Map<const Eigen::VectorXd>(
          lag.data(), static_cast<Eigen::Index>(lag.size())));
    }

    const std::string transform = j.value("transform", std::string("gaussian"));
    if (transform == "gaussian")
      config.transform = FieldSpec::Transform::GaussianIdentity;
    else if (transform == "chisq_shifted")
      config.transform = FieldSpec::Transform::ChiSqShifted;
    else
      throw UsageError("coverage config: unknown transform '" + transform + "'");
    config.chisq_theta1 = j.value("chisq_theta1", 1.0);
    config.chisq_shift = j.value("chisq_shift", 0.0);

    config.lambdas = j.at("lambdas").get<std::vector<double>>();
    config.ns = j.at("ns").get<std::vector<int>>();
    config.cstars = j.at("cstars").get<std::vector<double>>();
    config.kappas = j.at("kappas").get<std::vector<double>>();
    config.eta = j.value("eta", 1.0);
    config.alpha = j.value("alpha", 0.1);
    config.replicates = j.value("replicates", 100);
    config.seed = j.value("seed", static_cast<std::uint64_t>(0));
    config.parallelism = j.value("parallelism", 1);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("coverage config: ") + e.what());
  }
  return config;
}

nlohmann::ordered_json coverage_rows_to_json(const StudyConfig& config,
                                             const std::vector<CoverageRow>& rows) {
  nlohmann::ordered_json out;
  out["alpha"] = config.alpha;
  out["replicates"] = config.replicates;
  out["seed"] = config.seed;
  out["eta"] = config.eta;
  nlohmann::ordered_json truth = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < config.theta_truth.size(); ++i)
    truth.push_back(config.theta_truth[i]);
  out["theta_truth"] = std::move(truth);
  out["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json rj;
    rj["cstar"] = row.cstar;
    rj["kappa"] = row.kappa;
    rj["lambda"] = row.lambda;
    rj["n"] = row.n;
    rj["replicates"] = row.replicates;
    rj["used"] = row.used;
    rj["failures"] = row.failures;
    rj["infeasible"] = row.infeasible;
    rj["coverage_percent"] = row.coverage_percent;
    out["rows"].push_back(std::move(rj));
  }
  return out;
}

void write_coverage_csv(const std::vector<CoverageRow>& rows,
                        const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << "cstar,kappa,lambda,n,replicates,used,failures,infeasible,coverage_percent\n";
  for (const auto& row : rows) {
    os << format_double(row.cstar) << ',' << format_double(row.kappa) << ','
       << format_double(row.lambda) << ',' << row.n << ',' << row.replicates
       << ',' << row.used << ',' << row.failures << ',' << row.infeasible
       << ',' << format_double(row.coverage_percent) << "\n";
  }
  if (!os) throw DataError("failed writing '" + path + "'");
}

}  // namespace sfdel
