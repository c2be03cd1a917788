#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace tvr {

using Rng = std::mt19937_64;

/// Gaussian tail probability, Q(x) = P[N(0,1) > x].
double q_function(double x);

/// Standard normal CDF, 1 - Q(x).
double normal_cdf(double x);

double mean(std::span<const double> values);

/// Unbiased (n - 1) sample standard deviation. Requires at least two values.
double sample_stddev(std::span<const double> values);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Independent generator for sub-stream `stream` of a run seeded with `seed`.
/// Streams are what make per-pair work order independent.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace tvr
