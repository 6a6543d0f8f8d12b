#include "sfdel/chi2.hpp"

#include <cmath>
#include <limits>

#include "sfdel/errors.hpp"

namespace sfdel {

namespace {

// Regularized lower incomplete gamma P(a, x): series expansion for x < a+1,
// continued fraction (modified Lentz) for the complement otherwise.
double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int k = 0; k < 500; ++k) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lg) * h;
  return 1.0 - q;
}

double chi2_pdf(double x, int df) {
  if (x <= 0.0) return 0.0;
  const double a = 0.5 * static_cast<double>(df);
  return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) -
                  std::lgamma(a));
}

}  // namespace

double chi2_cdf(double x, int df) {
  if (df < 1) throw UsageError("chi2: degrees of freedom must be >= 1");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * static_cast<double>(df), 0.5 * x);
}

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw UsageError("normal_quantile: q must lie in (0, 1)");
  // Rational approximation (Acklam-style), then one Halley polish on erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (q < plow) {
    const double u = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((dd[0] * u + dd[1]) * u + dd[2]) * u + dd[3]) * u + 1.0);
  } else if (q <= 1.0 - plow) {
    const double u = q - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double u = std::sqrt(-2.0 * std::log(1.0 - q));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((dd[0] * u + dd[1]) * u + dd[2]) * u + dd[3]) * u + 1.0);
  }
  // One Newton step against the exact CDF.
  const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
  if (pdf > 0.0) x -= (cdf - q) / pdf;
  return x;
}

double chi2_quantile(double q, int df) {
  if (df < 1) throw UsageError("chi2: degrees of freedom must be >= 1");
  if (!(q > 0.0 && q < 1.0))
    throw UsageError("chi2_quantile: q must lie in (0, 1)");

  // Wilson-Hilferty starting point.
  const double nu = static_cast<double>(df);
  const double z = normal_quantile(q);
  const double t = 1.0 - 2.0 / (9.0 * nu) + z * std::sqrt(2.0 / (9.0 * nu));
  double x = nu * t * t * t;
  if (!(x > 0.0)) x = 0.5;

  // Establish a bracket, then safeguarded Newton.
  double lo = 0.0, hi = x;
  while (chi2_cdf(hi, df) < q) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e10) throw Error("chi2_quantile: bracket expansion failed");
  }
  if (chi2_cdf(x, df) >= q) lo = 0.0;

  for (int it = 0; it < 200; ++it) {
    const double fx = chi2_cdf(x, df) - q;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    const double px = chi2_pdf(x, df);
    double next = px > 0.0 ? x - fx / px : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-12 * (1.0 + std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace sfdel
