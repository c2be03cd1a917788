#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tvr/stats.hpp"

using namespace tvr;

TEST_CASE("q function and normal cdf")
{
  CHECK(q_function(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(q_function(-3.0) == doctest::Approx(0.99865010196837).epsilon(1e-12));
  CHECK(q_function(1.5) + normal_cdf(1.5) == doctest::Approx(1.0));
  CHECK(q_function(40.0) >= 0.0);
}

TEST_CASE("mean and sample standard deviation")
{
  const std::vector<double> v{-1.0, 1.0};
  CHECK(mean(v) == 0.0);
  CHECK(sample_stddev(v) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(mean(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(sample_stddev(std::vector<double>{3.0}), std::invalid_argument);
}

TEST_CASE("format_double round-trips")
{
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 13500.0, 1e-300, 6.02214076e23}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(1.75) == "1.75");
}

TEST_CASE("derived streams are deterministic and distinct")
{
  Rng a = derive_rng(7, 3);
  Rng b = derive_rng(7, 3);
  Rng c = derive_rng(7, 4);
  Rng d = derive_rng(8, 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}
