#pragma once

#include <Eigen/Dense>

namespace sfdel {

// Prototype observation region: an axis-aligned rectangle with half-open
// sides, prod_i (lo_i, hi_i], contained in (-1/2, 1/2]^d and containing the
// origin (lo_i < 0 <= hi_i).  The physical sampling window is lambda * region.
class PrototypeRegion {
 public:
  PrototypeRegion(Eigen::VectorXd lo, Eigen::VectorXd hi);

  // (-1/2, 1/2]^d
  static PrototypeRegion unit(int d);

  [[nodiscard]] int dim() const { return static_cast<int>(lo_.size()); }
  [[nodiscard]] const Eigen::VectorXd& lo() const { return lo_; }
  [[nodiscard]] const Eigen::VectorXd& hi() const { return hi_; }
  [[nodiscard]] double volume() const;

  // Membership in the half-open box: lo_i < x_i <= hi_i for every coordinate.
  [[nodiscard]] bool contains(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd lo_, hi_;
};

}  // namespace sfdel
