#pragma once

namespace sfdel {

// Chi-square CDF with df degrees of freedom: regularized lower incomplete
// gamma P(df/2, x/2), computed by series (small x) or continued fraction.
double chi2_cdf(double x, int df);

// Quantile: smallest x with chi2_cdf(x, df) >= q, for q in (0, 1).
// Wilson-Hilferty initial guess polished by safeguarded Newton to ~1e-12.
double chi2_quantile(double q, int df);

// Standard normal quantile (rational approximation + Newton polish); exposed
// because tests and initial guesses share it.
double normal_quantile(double q);

}  // namespace sfdel
