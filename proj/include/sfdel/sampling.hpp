#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sfdel/region.hpp"
#include "sfdel/rng.hpp"

namespace sfdel {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GaussianComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // symmetric positive definite
};

// Site-location design on the prototype region.  Either uniform or a Gaussian
// mixture truncated to the region (draws rejected until they land inside).
struct SamplingDesign {
  enum class Kind { Uniform, TruncatedGaussianMixture };

  Kind kind = Kind::Uniform;
  std::vector<double> weights;                // mixture only, sums to 1
  std::vector<GaussianComponent> components;  // mixture only

  static SamplingDesign uniform();
  static SamplingDesign mixture(std::vector<double> weights,
                                std::vector<GaussianComponent> components);
  // Equal-weight mixture of N((0,0)', I2) and N((1/4,1/4)', 2*I2), the shipped
  // non-uniform design for two-dimensional studies.
  static SamplingDesign default_mixture();
};

// n site locations in the scaled window lambda * region plus optional
// observed values (empty vector = no values attached yet).
struct SiteSample {
  double lambda = 1.0;
  PrototypeRegion region = PrototypeRegion::unit(2);
  RowMatrixXd sites;       // n x d, physical (already scaled) coordinates
  Eigen::VectorXd values;  // size 0 when absent
  bool region_inferred = false;

  [[nodiscard]] int n() const { return static_cast<int>(sites.rows()); }
  [[nodiscard]] int dim() const { return static_cast<int>(sites.cols()); }
  [[nodiscard]] bool has_values() const { return values.size() > 0; }
};

// Draw n i.i.d. sites from the design on the prototype region and scale them
// by lambda.  Rejection sampling for the truncated mixture gives up (throws)
// after max_attempts_per_site failed proposals for a single site.
SiteSample draw_sites(const SamplingDesign& design, const PrototypeRegion& region,
                      double lambda, int n, Seed seed,
                      std::uint64_t max_attempts_per_site = 1'000'000);

// Density of the sampling design on the *prototype* region (renormalized to
// integrate to one over the region); zero outside.
double density_at(const SamplingDesign& design, const PrototypeRegion& region,
                  const Eigen::VectorXd& x);

}  // namespace sfdel
