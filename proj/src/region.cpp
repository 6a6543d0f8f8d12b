#include "sfdel/region.hpp"

#include <iostream>

#include "sfdel/errors.hpp"

namespace sfdel {

void warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

PrototypeRegion::PrototypeRegion(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() == 0 || lo_.size() != hi_.size())
    throw UsageError("region: lo/hi must be non-empty and of equal dimension");
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] < hi_[i]))
      throw UsageError("region: lo must be strictly below hi in every coordinate");
    if (!(lo_[i] < 0.0 && 0.0 <= hi_[i]))
      throw UsageError("region: must contain the origin (lo_i < 0 <= hi_i)");
    if (!(lo_[i] >= -0.5 && hi_[i] <= 0.5))
      throw UsageError("region: bounds must lie within (-1/2, 1/2]");
  }
}

PrototypeRegion PrototypeRegion::unit(int d) {
  if (d < 1) throw UsageError("region: dimension must be >= 1");
  return PrototypeRegion(Eigen::VectorXd::Constant(d, -0.5),
                         Eigen::VectorXd::Constant(d, 0.5));
}

double PrototypeRegion::volume() const { return (hi_ - lo_).prod(); }

bool PrototypeRegion::contains(const Eigen::VectorXd& x) const {
  if (x.size() != lo_.size()) return false;
  for (Eigen::Index i = 0; i < lo_.size(); ++i)
    if (!(lo_[i] < x[i] && x[i] <= hi_[i])) return false;
  return true;
}

}  // namespace sfdel
