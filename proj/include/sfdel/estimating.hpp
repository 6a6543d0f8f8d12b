#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sfdel/field.hpp"
#include "sfdel/quadrature.hpp"

namespace sfdel {

// Variance-normalized variogram models (unit sill: 2*gamma -> 2 at infinity).
// semivariogram() returns gamma(h; theta) = 1 - rho(h; theta), so a field
// whose correlation is correlation_at(theta) has exactly this semivariogram.
struct VariogramModel {
  enum class Kind { ExponentialSeparable, GaussianRange };

  Kind kind = Kind::ExponentialSeparable;

  [[nodiscard]] int param_dim() const {
    return kind == Kind::ExponentialSeparable ? 2 : 1;
  }

  // gamma(h; theta) = 1 - exp(-theta1|h1| - theta2|h2|)     (ExponentialSeparable)
  //                 = 1 - exp(-||h||^2 / theta^2)           (GaussianRange)
  [[nodiscard]] double semivariogram(const Eigen::VectorXd& theta,
                                     const Eigen::VectorXd& h) const;

  // Gradient of the variogram 2*gamma(h; theta) in theta (closed form).
  [[nodiscard]] Eigen::VectorXd grad_two_gamma(const Eigen::VectorXd& theta,
                                               const Eigen::VectorXd& h) const;

  // Correlation function with this semivariogram: rho = 1 - gamma.
  [[nodiscard]] CorrelationModel correlation_at(const Eigen::VectorXd& theta) const;

  static VariogramModel exponential_separable();
  static VariogramModel gaussian_range();
};

// Spectral estimating function G_theta(w), a p-vector for each frequency w.
// Families:
//   Autocorrelation: (cos(h_i . w))_i - theta                  (p = #lags)
//   SpectralCdf:     symmetrized indicators                    (p = #thresholds)
//                    [(1{w <= t_i})_i + (1{-w <= t_i})_i]/2 - theta
//   VariogramLs:     [1 - gamma(h_i;theta)] - cos(h_i . w)     (p = #lags)
// VariogramLs carries one moment per lag.  Contracting the per-lag residuals
// with the model gradient (the least-squares normal equations) would change
// nothing when that map is invertible -- the weight constraints are identical
// -- but it silently loses rank for lag sets with equal component magnitudes
// (e.g. (1,1),(1,-1) in the separable model), which breaks the chi-square
// calibration; the per-lag form keeps full rank.
// Every component is bounded in w, as the frequency-domain theory requires.
class EstimatingFunction {
 public:
  enum class Family { Autocorrelation, SpectralCdf, VariogramLs };

  static EstimatingFunction autocorrelation(std::vector<Eigen::VectorXd> lags);
  static EstimatingFunction spectral_cdf(std::vector<Eigen::VectorXd> thresholds);
  static EstimatingFunction variogram_ls(VariogramModel model,
                                         std::vector<Eigen::VectorXd> lags);

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] int p() const;          // moment dimension (test df)
  [[nodiscard]] int theta_dim() const;  // parameter dimension
  [[nodiscard]] int domain_dim() const; // dimension of w and of the lags
  [[nodiscard]] const std::vector<Eigen::VectorXd>& lags() const { return lags_; }
  [[nodiscard]] const VariogramModel& model() const { return model_; }

  // G_theta(w).
  [[nodiscard]] Eigen::VectorXd eval(const Eigen::VectorXd& theta,
                                     const Eigen::VectorXd& omega) const;

  // Theta-dependent quantities hoisted out of the per-frequency loop.
  struct Prepared {
    const EstimatingFunction* fn = nullptr;
    Eigen::VectorXd theta;
    // VariogramLs: residual offsets 1 - gamma(h_i;theta).
    Eigen::VectorXd offsets;

    void eval(const double* omega, double* out) const;
  };
  [[nodiscard]] Prepared prepare(const Eigen::VectorXd& theta) const;

  // Componentwise bound sup_w |G_theta(w)_j|, used by boundedness checks.
  [[nodiscard]] Eigen::VectorXd component_bound(const Eigen::VectorXd& theta) const;

 private:
  Family family_ = Family::Autocorrelation;
  std::vector<Eigen::VectorXd> lags_;  // lags or thresholds
  VariogramModel model_;
};

// Quadrature approximation of the population moment
//   integral of G_theta(w) * phi(w) dw  over R^2,
// truncated to the spec's box.  The result's converged flag is false when the
// adaptive rule could not meet its tolerance (e.g. discontinuous integrands
// with a tiny panel budget).
QuadratureResult spectral_moment_residual(const EstimatingFunction& fn,
                                          const Eigen::VectorXd& theta,
                                          const SpectralDensityOracle& phi,
                                          const QuadratureSpec& spec = {});

}  // namespace sfdel
