#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "sfdel/coverage.hpp"
#include "sfdel/errors.hpp"

using namespace sfdel;
namespace fs = std::filesystem;

namespace {

nlohmann::json base_config_json() {
  return nlohmann::json{
      {"design", "uniform"},
      {"model", "exponential_separable"},
      {"theta_truth", {1.0, 1.0}},
      {"lags", {{1.0, 1.0}, {1.0, -1.0}}},
      {"lambdas", {8.0}},
      {"ns", {60}},
      {"cstars", {1.0}},
      {"kappas", {0.1}},
      {"alpha", 0.1},
      {"replicates", 16},
      {"seed", 90210},
      {"parallelism", 1},
  };
}

std::string dump_rows(const StudyConfig& config,
                      const std::vector<CoverageRow>& rows) {
  return coverage_rows_to_json(config, rows).dump(2);
}

}  // namespace

TEST_CASE("study configs parse from json with defaults and validation") {
  const StudyConfig config = study_config_from_json(base_config_json());
  CHECK(config.model.kind == VariogramModel::Kind::ExponentialSeparable);
  CHECK(config.theta_truth.size() == 2);
  CHECK(config.lags.size() == 2);
  CHECK(config.lags[1][1] == -1.0);
  CHECK(config.lambdas == std::vector<double>{8.0});
  CHECK(config.ns == std::vector<int>{60});
  CHECK(config.eta == 1.0);         // default
  CHECK(config.alpha == 0.1);
  CHECK(config.replicates == 16);
  CHECK(config.seed == 90210);
  CHECK(config.transform == FieldSpec::Transform::GaussianIdentity);

  // missing required keys and unknown enumerations are usage errors
  nlohmann::json missing = base_config_json();
  missing.erase("theta_truth");
  CHECK_THROWS_AS(study_config_from_json(missing), UsageError);

  nlohmann::json bad_model = base_config_json();
  bad_model["model"] = "spherical";
  CHECK_THROWS_AS(study_config_from_json(bad_model), UsageError);

  nlohmann::json bad_transform = base_config_json();
  bad_transform["transform"] = "lognormal";
  CHECK_THROWS_AS(study_config_from_json(bad_transform), UsageError);

  nlohmann::json bad_design = base_config_json();
  bad_design["design"] = "clustered";
  CHECK_THROWS_AS(study_config_from_json(bad_design), UsageError);
}

TEST_CASE("explicit mixture designs parse component by component") {
  nlohmann::json j = base_config_json();
  j["design"] = {
      {"weights", {0.5, 0.5}},
      {"components",
       {{{"mean", {0.0, 0.0}}, {"cov", {{1.0, 0.0}, {0.0, 1.0}}}},
        {{"mean", {0.25, 0.25}}, {"cov", {{2.0, 0.0}, {0.0, 2.0}}}}}},
  };
  const StudyConfig config = study_config_from_json(j);
  // parses and draws: a smoke run must complete
  StudyConfig small = config;
  small.replicates = 2;
  small.ns = {30};
  const std::vector<CoverageRow> rows = run_coverage(small);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].used + rows[0].failures == 2);

  nlohmann::json bad = j;
  bad["design"]["components"][0]["cov"] = {{1.0, 0.0}};  // not square
  CHECK_THROWS_AS(study_config_from_json(bad), UsageError);
}

TEST_CASE("coverage rows account for every replicate and are deterministic") {
  const StudyConfig config = study_config_from_json(base_config_json());
  const std::vector<CoverageRow> rows = run_coverage(config);
  REQUIRE(rows.size() == 1);
  const CoverageRow& row = rows[0];
  CHECK(row.cstar == 1.0);
  CHECK(row.kappa == 0.1);
  CHECK(row.lambda == 8.0);
  CHECK(row.n == 60);
  CHECK(row.replicates == 16);
  CHECK(row.used + row.failures == row.replicates);
  CHECK(row.infeasible <= row.used);
  CHECK(row.coverage_percent >= 0.0);
  CHECK(row.coverage_percent <= 100.0);

  const std::vector<CoverageRow> again = run_coverage(config);
  CHECK(dump_rows(config, again) == dump_rows(config, rows));
}

TEST_CASE("cells enumerate the cartesian product in a fixed order") {
  nlohmann::json j = base_config_json();
  j["replicates"] = 2;
  j["ns"] = {30, 40};
  j["cstars"] = {0.5, 1.0};
  j["lambdas"] = {6.0};
  const StudyConfig config = study_config_from_json(j);
  const std::vector<CoverageRow> rows = run_coverage(config);
  REQUIRE(rows.size() == 4);
  // order: cstar-major, then kappa, lambda, n
  CHECK(rows[0].cstar == 0.5);
  CHECK(rows[0].n == 30);
  CHECK(rows[1].cstar == 0.5);
  CHECK(rows[1].n == 40);
  CHECK(rows[2].cstar == 1.0);
  CHECK(rows[2].n == 30);
  CHECK(rows[3].cstar == 1.0);
  CHECK(rows[3].n == 40);
}

TEST_CASE("parallel execution reproduces the sequential results exactly") {
  nlohmann::json j = base_config_json();
  j["replicates"] = 12;
  j["ns"] = {50};
  const StudyConfig base = study_config_from_json(j);

  StudyConfig seq = base;
  seq.parallelism = 1;
  StudyConfig par = base;
  par.parallelism = 8;
  const std::string a = dump_rows(base, run_coverage(seq));
  const std::string b = dump_rows(base, run_coverage(par));
  CHECK(a == b);
}

TEST_CASE("coverage csv writer emits one line per cell") {
  const StudyConfig config = study_config_from_json(base_config_json());
  std::vector<CoverageRow> rows(2);
  rows[0] = CoverageRow{2.0, 0.1, 24.0, 400, 500, 498, 2, 1, 88.353413654618467};
  rows[1] = CoverageRow{1.0, 0.05, 12.0, 100, 500, 500, 0, 0, 90.0};
  const fs::path path = fs::temp_directory_path() / "sfdel_coverage_rows.csv";
  write_coverage_csv(rows, path.string());
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  CHECK(line == "cstar,kappa,lambda,n,replicates,used,failures,infeasible,coverage_percent");
  std::getline(is, line);
  CHECK(line == "2,0.1,24,400,500,498,2,1,88.35341365461846");
  std::getline(is, line);
  CHECK(line == "1,0.05,12,100,500,500,0,0,90");
  CHECK(!std::getline(is, line));
}

TEST_CASE("invalid study setups are rejected before any work") {
  StudyConfig config = study_config_from_json(base_config_json());
  StudyConfig c1 = config;
  c1.lambdas.clear();
  CHECK_THROWS_AS(run_coverage(c1), UsageError);
  StudyConfig c2 = config;
  c2.replicates = 0;
  CHECK_THROWS_AS(run_coverage(c2), UsageError);
  StudyConfig c3 = config;
  c3.alpha = 1.5;
  CHECK_THROWS_AS(run_coverage(c3), UsageError);
  StudyConfig c4 = config;
  c4.lags.clear();
  CHECK_THROWS_AS(run_coverage(c4), UsageError);
  StudyConfig c5 = config;
  c5.theta_truth = Eigen::VectorXd::Ones(1);  // wrong length for the model
  CHECK_THROWS_AS(run_coverage(c5), UsageError);
}
