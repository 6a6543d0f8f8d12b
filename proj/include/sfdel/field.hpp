#pragma once

#include <Eigen/Dense>

#include "sfdel/rng.hpp"
#include "sfdel/sampling.hpp"

namespace sfdel {

// Stationary correlation functions used both to simulate fields and as the
// population truth behind the variogram models.
struct CorrelationModel {
  enum class Kind { ExponentialSeparable, GaussianIsotropic };

  Kind kind = Kind::ExponentialSeparable;
  double theta1 = 1.0;  // ExponentialSeparable only
  double theta2 = 1.0;  // decay (exponential) or range (gaussian)

  // rho(h); rho(0) = 1.
  [[nodiscard]] double operator()(const Eigen::VectorXd& h) const;

  // exp(-theta1*|h1| - theta2*|h2|)
  static CorrelationModel exponential_separable(double theta1, double theta2);
  // exp(-||h||^2 / range^2)
  static CorrelationModel gaussian_isotropic(double range);
};

// What to simulate at a set of sites.  GaussianIdentity: Gaussian field with
// the given mean/variance/correlation.  ChiSqShifted: draw a zero-mean
// unit-variance Gaussian Y with the given correlation and return
// Z = sqrt(chisq_theta1 / 2) * (Y^2 - 1) + chisq_shift, a skewed field with
// Var Z = chisq_theta1 and corr_Z(h) = corr_Y(h)^2.
struct FieldSpec {
  CorrelationModel model;
  double mean = 0.0;
  double variance = 1.0;

  enum class Transform { GaussianIdentity, ChiSqShifted };
  Transform transform = Transform::GaussianIdentity;
  double chisq_theta1 = 1.0;
  double chisq_shift = 0.0;
};

// Dense covariance matrix variance * rho(s_i - s_j); exactly symmetric.
Eigen::MatrixXd covariance_matrix(const CorrelationModel& model, double variance,
                                  const RowMatrixXd& sites);

// One field realization at the sample's sites via dense Cholesky.  When the
// factorization fails, escalating diagonal jitter (1e-12, 1e-10, 1e-8 times
// the variance) is applied before giving up (SimulationError).
Eigen::VectorXd simulate_field(const FieldSpec& spec, const SiteSample& sample,
                               Seed seed);

// Closed-form spectral density of the separable exponential correlation in
// two dimensions: phi(w) = prod_i (theta_i/pi) / (theta_i^2 + w_i^2).
// Integrates to 1 over R^2 (unit variance).
struct SpectralDensityOracle {
  double theta1 = 1.0;
  double theta2 = 1.0;

  [[nodiscard]] double operator()(double w1, double w2) const;
};

}  // namespace sfdel
