#include "sfdel/field.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "sfdel/errors.hpp"

namespace sfdel {

double CorrelationModel::operator()(const Eigen::VectorXd& h) const {
  switch (kind) {
    case Kind::ExponentialSeparable: {
      if (h.size() != 2)
        throw UsageError("correlation: separable exponential is two-dimensional");
      return std::exp(-theta1 * std::abs(h[0]) - theta2 * std::abs(h[1]));
    }
    case Kind::GaussianIsotropic:
      return std::exp(-h.squaredNorm() / (theta2 * theta2));
  }
  throw UsageError("correlation: unknown kind");
}

CorrelationModel CorrelationModel::exponential_separable(double t1, double t2) {
  if (!(t1 > 0.0 && t2 > 0.0))
    throw UsageError("correlation: decay parameters must be positive");
  return CorrelationModel{Kind::ExponentialSeparable, t1, t2};
}

CorrelationModel CorrelationModel::gaussian_isotropic(double range) {
  if (!(range > 0.0)) throw UsageError("correlation: range must be positive");
  return CorrelationModel{Kind::GaussianIsotropic, 0.0, range};
}

Eigen::MatrixXd covariance_matrix(const CorrelationModel& model, double variance,
                                  const RowMatrixXd& sites) {
  if (!(variance > 0.0)) throw UsageError("covariance: variance must be positive");
  const Eigen::Index n = sites.rows();
  Eigen::MatrixXd cov(n, n);
  Eigen::VectorXd h(sites.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    cov(i, i) = variance;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      h = (sites.row(i) - sites.row(j)).transpose();
      const double v = variance * model(h);
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }
  return cov;
}

namespace {

// Lower Cholesky factor with escalating diagonal jitter.
Eigen::MatrixXd cholesky_with_jitter(Eigen::MatrixXd cov, double variance) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  for (double jitter : {1e-12, 1e-10, 1e-8}) {
    Eigen::MatrixXd bumped = cov;
    bumped.diagonal().array() += jitter * variance;
    llt.compute(bumped);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw SimulationError(
      "simulate_field: covariance not positive definite even with jitter");
}

}  // namespace

Eigen::VectorXd simulate_field(const FieldSpec& spec, const SiteSample& sample,
                               Seed seed) {
  const Eigen::Index n = sample.sites.rows();
  if (n < 1) throw UsageError("simulate_field: need at least one site");

  const bool chisq = spec.transform == FieldSpec::Transform::ChiSqShifted;
  // The chi-square transform is defined on a zero-mean unit-variance Gaussian.
  const double variance = chisq ? 1.0 : spec.variance;
  const double mean = chisq ? 0.0 : spec.mean;

  const Eigen::MatrixXd L =
      cholesky_with_jitter(covariance_matrix(spec.model, variance, sample.sites),
                           variance);

  Rng rng(seed);
  Eigen::VectorXd eps(n);
  for (Eigen::Index i = 0; i < n; ++i) eps[i] = rng.normal();
  Eigen::VectorXd y = L * eps;

  if (!chisq) {
    for (Eigen::Index i = 0; i < n; ++i) y[i] = mean + y[i];
    return y;
  }
  if (!(spec.chisq_theta1 > 0.0))
    throw UsageError("simulate_field: chi-square scale must be positive");
  const double s = std::sqrt(spec.chisq_theta1 / 2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    y[i] = s * (y[i] * y[i] - 1.0) + spec.chisq_shift;
  return y;
}

double SpectralDensityOracle::operator()(double w1, double w2) const {
  const double inv_pi = 1.0 / std::numbers::pi;
  return (theta1 * inv_pi / (theta1 * theta1 + w1 * w1)) *
         (theta2 * inv_pi / (theta2 * theta2 + w2 * w2));
}

}  // namespace sfdel
