#include <cmath>
#include <initializer_list>

#include <doctest.h>

#include "sfdel/chi2.hpp"

using namespace sfdel;

TEST_CASE("chi2 cdf closed forms") {
  // df = 2: cdf(x) = 1 - exp(-x/2)
  for (double x : {0.1, 0.5, 1.0, 2.0, 4.605170185988091, 10.0, 30.0}) {
    CHECK(chi2_cdf(x, 2) == doctest::Approx(1.0 - std::exp(-x / 2)).epsilon(1e-12));
  }
  // df = 1: cdf(x) = erf(sqrt(x/2))
  for (double x : {0.01, 0.5, 1.0, 3.841458820694124, 9.0}) {
    CHECK(chi2_cdf(x, 1) == doctest::Approx(std::erf(std::sqrt(x / 2))).epsilon(1e-12));
  }
  // df = 4: cdf(x) = 1 - (1 + x/2) exp(-x/2)
  for (double x : {0.2, 1.0, 5.0, 13.0}) {
    CHECK(chi2_cdf(x, 4) ==
          doctest::Approx(1.0 - (1.0 + x / 2) * std::exp(-x / 2)).epsilon(1e-12));
  }
  CHECK(chi2_cdf(0.0, 3) == 0.0);
  CHECK(chi2_cdf(-1.0, 3) == 0.0);
}

TEST_CASE("chi2 quantile reference values") {
  // df = 2 has the closed form -2 log(1 - q).
  CHECK(chi2_quantile(0.90, 2) == doctest::Approx(4.605170185988091).epsilon(1e-10));
  CHECK(chi2_quantile(0.95, 2) == doctest::Approx(5.991464547107979).epsilon(1e-10));
  // Standard table values.
  CHECK(chi2_quantile(0.90, 1) == doctest::Approx(2.705543454095404).epsilon(1e-9));
  CHECK(chi2_quantile(0.95, 1) == doctest::Approx(3.841458820694124).epsilon(1e-9));
  CHECK(chi2_quantile(0.90, 3) == doctest::Approx(6.251388631170325).epsilon(1e-9));
  CHECK(chi2_quantile(0.99, 5) == doctest::Approx(15.08627246938899).epsilon(1e-9));
}

TEST_CASE("chi2 cdf/quantile round trip") {
  for (int df = 1; df <= 5; ++df) {
    for (double x = 0.01; x <= 30.0; x += 0.37) {
      const double q = chi2_cdf(x, df);
      if (q <= 0.0 || q >= 1.0) continue;
      CHECK(chi2_quantile(q, df) == doctest::Approx(x).epsilon(1e-8));
    }
    for (double q = 0.02; q < 1.0; q += 0.049) {
      const double x = chi2_quantile(q, df);
      CHECK(chi2_cdf(x, df) == doctest::Approx(q).epsilon(1e-8));
    }
  }
}

TEST_CASE("chi2 cdf is monotone in x and decreasing in df") {
  for (int df = 1; df <= 5; ++df) {
    double prev = -1.0;
    for (double x = 0.0; x <= 40.0; x += 0.25) {
      const double c = chi2_cdf(x, df);
      CHECK(c >= prev);
      CHECK(c <= 1.0);
      prev = c;
    }
  }
  for (double x : {0.5, 2.0, 7.0}) {
    for (int df = 1; df < 5; ++df) {
      CHECK(chi2_cdf(x, df) > chi2_cdf(x, df + 1));
    }
  }
}

TEST_CASE("chi2 quantile rejects invalid arguments") {
  CHECK_THROWS(chi2_quantile(0.0, 2));
  CHECK_THROWS(chi2_quantile(1.0, 2));
  CHECK_THROWS(chi2_quantile(-0.5, 2));
  CHECK_THROWS(chi2_quantile(0.5, 0));
}

TEST_CASE("normal quantile reference values") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(normal_quantile(0.95) == doctest::Approx(1.644853626951473).epsilon(1e-9));
  CHECK(normal_quantile(0.05) == doctest::Approx(-1.644853626951473).epsilon(1e-9));
}
