#include "sfdel/estimating.hpp"

#include <cmath>

#include "sfdel/errors.hpp"

namespace sfdel {

double VariogramModel::semivariogram(const Eigen::VectorXd& theta,
                                     const Eigen::VectorXd& h) const {
  switch (kind) {
    case Kind::ExponentialSeparable: {
      if (theta.size() != 2 || h.size() != 2)
        throw UsageError("variogram: separable exponential is two-dimensional");
      return 1.0 - std::exp(-theta[0] * std::abs(h[0]) - theta[1] * std::abs(h[1]));
    }
    case Kind::GaussianRange: {
      if (theta.size() != 1)
        throw UsageError("variogram: gaussian model has one parameter");
      const double r = theta[0];
      return 1.0 - std::exp(-h.squaredNorm() / (r * r));
    }
  }
  throw UsageError("variogram: unknown kind");
}

Eigen::VectorXd VariogramModel::grad_two_gamma(const Eigen::VectorXd& theta,
                                               const Eigen::VectorXd& h) const {
  switch (kind) {
    case Kind::ExponentialSeparable: {
      if (theta.size() != 2 || h.size() != 2)
        throw UsageError("variogram: separable exponential is two-dimensional");
      const double e =
          std::exp(-theta[0] * std::abs(h[0]) - theta[1] * std::abs(h[1]));
      Eigen::VectorXd g(2);
      g[0] = 2.0 * std::abs(h[0]) * e;
      g[1] = 2.0 * std::abs(h[1]) * e;
      return g;
    }
    case Kind::GaussianRange: {
      if (theta.size() != 1)
        throw UsageError("variogram: gaussian model has one parameter");
      const double r = theta[0];
      const double q = h.squaredNorm();
      Eigen::VectorXd g(1);
      g[0] = -4.0 * q / (r * r * r) * std::exp(-q / (r * r));
      return g;
    }
  }
  throw UsageError("variogram: unknown kind");
}

CorrelationModel VariogramModel::correlation_at(const Eigen::VectorXd& theta) const {
  switch (kind) {
    case Kind::ExponentialSeparable:
      return CorrelationModel::exponential_separable(theta[0], theta[1]);
    case Kind::GaussianRange:
      return CorrelationModel::gaussian_isotropic(theta[0]);
  }
  throw UsageError("variogram: unknown kind");
}

VariogramModel VariogramModel::exponential_separable() {
  return VariogramModel{Kind::ExponentialSeparable};
}

VariogramModel VariogramModel::gaussian_range() {
  return VariogramModel{Kind::GaussianRange};
}

namespace {

void validate_lags(const std::vector<Eigen::VectorXd>& lags, const char* what) {
  if (lags.empty()) throw UsageError(std::string(what) + ": need at least one entry");
  for (const auto& h : lags)
    if (h.size() != lags.front().size() || h.size() < 1)
      throw UsageError(std::string(what) + ": entries must share one dimension");
}

}  // namespace

EstimatingFunction EstimatingFunction::autocorrelation(
    std::vector<Eigen::VectorXd> lags) {
  validate_lags(lags, "autocorrelation lags");
  EstimatingFunction f;
  f.family_ = Family::Autocorrelation;
  f.lags_ = std::move(lags);
  return f;
}

EstimatingFunction EstimatingFunction::spectral_cdf(
    std::vector<Eigen::VectorXd> thresholds) {
  validate_lags(thresholds, "cdf thresholds");
  EstimatingFunction f;
  f.family_ = Family::SpectralCdf;
  f.lags_ = std::move(thresholds);
  return f;
}

EstimatingFunction EstimatingFunction::variogram_ls(
    VariogramModel model, std::vector<Eigen::VectorXd> lags) {
  validate_lags(lags, "variogram lags");
  for (const auto& h : lags)
    if (h.cwiseAbs().maxCoeff() == 0.0)
      throw UsageError(
          "variogram lags: the zero lag gives an identically zero moment");
  EstimatingFunction f;
  f.family_ = Family::VariogramLs;
  f.lags_ = std::move(lags);
  f.model_ = model;
  return f;
}

int EstimatingFunction::p() const { return static_cast<int>(lags_.size()); }

int EstimatingFunction::theta_dim() const {
  return family_ == Family::VariogramLs ? model_.param_dim()
                                        : static_cast<int>(lags_.size());
}

int EstimatingFunction::domain_dim() const {
  return static_cast<int>(lags_.front().size());
}

EstimatingFunction::Prepared EstimatingFunction::prepare(
    const Eigen::VectorXd& theta) const {
  if (theta.size() != theta_dim())
    throw UsageError("estimating: theta dimension mismatch");
  Prepared prep;
  prep.fn = this;
  prep.theta = theta;
  if (family_ == Family::VariogramLs) {
    const int m = static_cast<int>(lags_.size());
    prep.offsets.resize(m);
    for (int i = 0; i < m; ++i)
      prep.offsets[i] =
          1.0 - model_.semivariogram(theta, lags_[static_cast<std::size_t>(i)]);
  }
  return prep;
}

void EstimatingFunction::Prepared::eval(const double* omega, double* out) const {
  const auto& lags = fn->lags_;
  const int d = fn->domain_dim();
  const int p = fn->p();
  switch (fn->family_) {
    case Family::Autocorrelation: {
      for (int i = 0; i < p; ++i) {
        double ph = 0.0;
        for (int j = 0; j < d; ++j) ph += lags[static_cast<std::size_t>(i)][j] * omega[j];
        out[i] = std::cos(ph) - theta[i];
      }
      return;
    }
    case Family::SpectralCdf: {
      for (int i = 0; i < p; ++i) {
        const auto& t = lags[static_cast<std::size_t>(i)];
        double below_pos = 1.0, below_neg = 1.0;
        for (int j = 0; j < d; ++j) {
          if (!(omega[j] <= t[j])) below_pos = 0.0;
          if (!(-omega[j] <= t[j])) below_neg = 0.0;
        }
        out[i] = 0.5 * (below_pos + below_neg) - theta[i];
      }
      return;
    }
    case Family::VariogramLs: {
      for (int i = 0; i < p; ++i) {
        double ph = 0.0;
        for (int j = 0; j < d; ++j) ph += lags[static_cast<std::size_t>(i)][j] * omega[j];
        out[i] = offsets[i] - std::cos(ph);
      }
      return;
    }
  }
}

Eigen::VectorXd EstimatingFunction::eval(const Eigen::VectorXd& theta,
                                         const Eigen::VectorXd& omega) const {
  if (omega.size() != domain_dim())
    throw UsageError("estimating: frequency dimension mismatch");
  const Prepared prep = prepare(theta);
  Eigen::VectorXd out(p());
  prep.eval(omega.data(), out.data());
  return out;
}

Eigen::VectorXd EstimatingFunction::component_bound(
    const Eigen::VectorXd& theta) const {
  const int pp = p();
  Eigen::VectorXd bound(pp);
  switch (family_) {
    case Family::Autocorrelation:
      for (int i = 0; i < pp; ++i) bound[i] = 1.0 + std::abs(theta[i]);
      return bound;
    case Family::SpectralCdf:
      for (int i = 0; i < pp; ++i) bound[i] = 1.0 + std::abs(theta[i]);
      return bound;
    case Family::VariogramLs: {
      // |(1 - gamma_i) - cos| <= (1 - gamma_i) + 1 for gamma_i in [0, 1].
      for (int i = 0; i < pp; ++i)
        bound[i] =
            2.0 - model_.semivariogram(theta, lags_[static_cast<std::size_t>(i)]);
      return bound;
    }
  }
  throw UsageError("estimating: unknown family");
}

QuadratureResult spectral_moment_residual(const EstimatingFunction& fn,
                                          const Eigen::VectorXd& theta,
                                          const SpectralDensityOracle& phi,
                                          const QuadratureSpec& spec) {
  if (fn.domain_dim() != 2)
    throw UsageError("moment residual: the spectral density oracle is two-dimensional");
  const EstimatingFunction::Prepared prep = fn.prepare(theta);
  const int p = fn.p();
  std::vector<double> g(static_cast<std::size_t>(p));
  return adaptive_integrate(
      [&](const double* x, double* out) {
        prep.eval(x, g.data());
        const double density = phi(x[0], x[1]);
        for (int c = 0; c < p; ++c) out[c] = g[static_cast<std::size_t>(c)] * density;
      },
      2, p, spec);
}

}  // namespace sfdel
