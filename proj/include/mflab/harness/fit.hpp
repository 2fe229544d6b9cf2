#pragma once

#include <span>

#include "mflab/harness/sweep.hpp"

namespace mflab::harness {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

// Distances at or below this count as zero: the mean-field description is
// exact and a power law is meaningless.
inline constexpr double kExactThreshold = 1e-12;

// Ordinary least squares of log(dist) on log(n). Needs at least three points;
// throws ExactRegime if any distance is zero.
RateFit fit_loglog(std::span<const double> n, std::span<const double> dist);
RateFit fit_rate(const ConvergenceReport& report, double t);
RateFit fit_rate(const ConvergenceReport& report, double t, Metric metric);

}  // namespace mflab::harness
