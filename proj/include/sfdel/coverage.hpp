#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sfdel/estimating.hpp"
#include "sfdel/inference.hpp"

namespace sfdel {

// One Monte Carlo study: the cartesian product of (cstar, kappa, lambda, n)
// cells, each evaluated with `replicates` independent draws.  Per replicate:
// draw sites, simulate the field at theta_truth, build the grid/periodogram
// and test theta_truth at level alpha.  Coverage is the percentage of
// non-rejections among replicates that completed; replicate r of cell c uses
// stream c * replicates + r of the base seed, so results are independent of
// parallelism.
struct StudyConfig {
  SamplingDesign design = SamplingDesign::uniform();
  PrototypeRegion region = PrototypeRegion::unit(2);
  VariogramModel model = VariogramModel::exponential_separable();
  Eigen::VectorXd theta_truth;
  std::vector<Eigen::VectorXd> lags;

  FieldSpec::Transform transform = FieldSpec::Transform::GaussianIdentity;
  double chisq_theta1 = 1.0;
  double chisq_shift = 0.0;

  std::vector<double> lambdas;
  std::vector<int> ns;
  std::vector<double> cstars;
  std::vector<double> kappas;
  double eta = 1.0;
  double alpha = 0.1;
  int replicates = 100;
  std::uint64_t seed = 0;
  int parallelism = 1;
};

struct CoverageRow {
  double cstar = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
  int n = 0;
  int replicates = 0;
  int used = 0;        // replicates that completed (accept or reject)
  int failures = 0;    // simulation/solver breakdowns, excluded from coverage
  int infeasible = 0;  // EL infeasible at truth; counted as rejections
  double coverage_percent = 0.0;
};

// Field spec used for one cell's replicates: the Z field carries the model's
// correlation at theta_truth; the chi-square transform draws Y with the
// square-root correlation so the transformed field hits the same target.
FieldSpec field_spec_for(const StudyConfig& config);

std::vector<CoverageRow> run_coverage(const StudyConfig& config);

// JSON round-trip of configs and deterministic serialization of results.
StudyConfig study_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json coverage_rows_to_json(const StudyConfig& config,
                                             const std::vector<CoverageRow>& rows);
void write_coverage_csv(const std::vector<CoverageRow>& rows,
                        const std::string& path);

}  // namespace sfdel
