#include "sfdel/sampling.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Cholesky>

#include "sfdel/errors.hpp"
#include "sfdel/quadrature.hpp"

namespace sfdel {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

void validate_mixture(const SamplingDesign& d) {
  if (d.weights.empty() || d.weights.size() != d.components.size())
    throw UsageError("design: one weight per mixture component required");
  double sum = 0.0;
  for (double w : d.weights) {
    if (!(w > 0.0)) throw UsageError("design: mixture weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw UsageError("design: mixture weights must sum to 1");
  const Eigen::Index dim = d.components.front().mean.size();
  for (const auto& c : d.components) {
    if (c.mean.size() != dim || c.cov.rows() != dim || c.cov.cols() != dim)
      throw UsageError("design: mixture components must share one dimension");
    if (!c.cov.isApprox(c.cov.transpose(), 1e-12))
      throw UsageError("design: component covariance must be symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(c.cov).info() != Eigen::Success)
      throw UsageError("design: component covariance must be positive definite");
  }
}

double component_pdf(const GaussianComponent& c, const Eigen::VectorXd& x) {
  const Eigen::Index d = c.mean.size();
  Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
  const Eigen::MatrixXd& L = llt.matrixL();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) log_det += std::log(L(i, i));
  const Eigen::VectorXd u = L.triangularView<Eigen::Lower>().solve(x - c.mean);
  const double q = u.squaredNorm();
  return std::exp(-0.5 * q - log_det -
                  0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi));
}

// Probability mass of one Gaussian component on the box region.  Diagonal
// covariances factor into exact one-dimensional normal CDF differences;
// otherwise tensor Gauss-Legendre over the box.
double component_mass(const GaussianComponent& c, const PrototypeRegion& region) {
  const Eigen::Index d = c.mean.size();
  bool diagonal = true;
  for (Eigen::Index i = 0; i < d && diagonal; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (i != j && c.cov(i, j) != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    double mass = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double sd = std::sqrt(c.cov(i, i));
      mass *= normal_cdf((region.hi()[i] - c.mean[i]) / sd) -
              normal_cdf((region.lo()[i] - c.mean[i]) / sd);
    }
    return mass;
  }
  if (d > 3)
    throw UsageError("design: non-diagonal mixture covariances supported up to d=3");
  std::vector<double> nodes, weights;
  gauss_legendre(64, nodes, weights);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d), 0);
  double mass = 0.0;
  const Eigen::Index m = static_cast<Eigen::Index>(nodes.size());
  Eigen::VectorXd x(d);
  std::function<void(Eigen::Index, double)> recurse = [&](Eigen::Index axis,
                                                          double wacc) {
    const double half = 0.5 * (region.hi()[axis] - region.lo()[axis]);
    const double mid = 0.5 * (region.hi()[axis] + region.lo()[axis]);
    for (Eigen::Index k = 0; k < m; ++k) {
      x[axis] = mid + half * nodes[static_cast<std::size_t>(k)];
      const double w = wacc * half * weights[static_cast<std::size_t>(k)];
      if (axis + 1 == d)
        mass += w * component_pdf(c, x);
      else
        recurse(axis + 1, w);
    }
  };
  recurse(0, 1.0);
  return mass;
}

}  // namespace

SamplingDesign SamplingDesign::uniform() {
  SamplingDesign d;
  d.kind = Kind::Uniform;
  return d;
}

SamplingDesign SamplingDesign::mixture(std::vector<double> weights,
                                       std::vector<GaussianComponent> components) {
  SamplingDesign d;
  d.kind = Kind::TruncatedGaussianMixture;
  d.weights = std::move(weights);
  d.components = std::move(components);
  validate_mixture(d);
  return d;
}

SamplingDesign SamplingDesign::default_mixture() {
  GaussianComponent a{Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()};
  GaussianComponent b{Eigen::Vector2d::Constant(0.25),
                      2.0 * Eigen::Matrix2d::Identity()};
  return mixture({0.5, 0.5}, {a, b});
}

SiteSample draw_sites(const SamplingDesign& design, const PrototypeRegion& region,
                      double lambda, int n, Seed seed,
                      std::uint64_t max_attempts_per_site) {
  if (!(lambda >= 1.0)) throw UsageError("draw_sites: lambda must be >= 1");
  if (n < 1) throw UsageError("draw_sites: n must be >= 1");
  const int d = region.dim();
  if (design.kind == SamplingDesign::Kind::TruncatedGaussianMixture &&
      design.components.front().mean.size() != d)
    throw UsageError("draw_sites: design dimension must match the region");

  Rng rng(seed);
  SiteSample out{lambda, region, RowMatrixXd(n, d), Eigen::VectorXd(), false};

  if (design.kind == SamplingDesign::Kind::Uniform) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j)
        out.sites(i, j) = lambda * rng.uniform_half_open(region.lo()[j], region.hi()[j]);
    return out;
  }

  // Truncated mixture: propose from the untruncated mixture, keep proposals
  // landing inside the region.
  std::vector<Eigen::MatrixXd> chol;
  chol.reserve(design.components.size());
  for (const auto& c : design.components)
    chol.push_back(Eigen::LLT<Eigen::MatrixXd>(c.cov).matrixL());

  Eigen::VectorXd eps(d), x(d);
  for (int i = 0; i < n; ++i) {
    std::uint64_t attempts = 0;
    for (;;) {
      if (++attempts > max_attempts_per_site)
        throw SimulationError(
            "draw_sites: rejection sampling exceeded the attempt cap; the "
            "mixture places almost no mass on the region");
      const double u = rng.uniform01();
      std::size_t k = 0;
      double acc = design.weights[0];
      while (u >= acc && k + 1 < design.weights.size()) acc += design.weights[++k];
      for (int j = 0; j < d; ++j) eps[j] = rng.normal();
      x = design.components[k].mean + chol[k] * eps;
      if (region.contains(x)) break;
    }
    out.sites.row(i) = lambda * x.transpose();
  }
  return out;
}

double density_at(const SamplingDesign& design, const PrototypeRegion& region,
                  const Eigen::VectorXd& x) {
  if (!region.contains(x)) return 0.0;
  if (design.kind == SamplingDesign::Kind::Uniform) return 1.0 / region.volume();

  double pdf = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < design.components.size(); ++k) {
    pdf += design.weights[k] * component_pdf(design.components[k], x);
    mass += design.weights[k] * component_mass(design.components[k], region);
  }
  if (!(mass > 0.0))
    throw SimulationError("density_at: design has no mass on the region");
  return pdf / mass;
}

}  // namespace sfdel
