#include "mflab/harness/fit.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "mflab/error.hpp"
#include "mflab/numfmt.hpp"

namespace mflab::harness {

RateFit fit_loglog(std::span<const double> n, std::span<const double> dist) {
  if (n.size() != dist.size()) throw ContractError("fit_rate: n and distance columns differ in length");
  if (n.size() < 3) throw ContractError("fit_rate: needs at least three rows, got " + std::to_string(n.size()));
  for (double v : dist)
    if (!(v > kExactThreshold)) throw ExactRegime("fit_rate: zero distance, mean field is exact here");

  const double count = static_cast<double>(n.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    sx += std::log(n[i]);
    sy += std::log(dist[i]);
  }
  const double mx = sx / count, my = sy / count;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double dx = std::log(n[i]) - mx, dy = std::log(dist[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ContractError("fit_rate: all rows share one n");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double e = std::log(dist[i]) - (f.intercept + f.slope * std::log(n[i]));
    ss_res += e * e;
  }
  f.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  f.points = n.size();
  return f;
}

RateFit fit_rate(const ConvergenceReport& report, double t) { return fit_rate(report, t, report.metric); }

RateFit fit_rate(const ConvergenceReport& report, double t, Metric metric) {
  std::vector<double> n, dist;
  for (const auto& row : report.rows) {
    if (row.t != t) continue;
    n.push_back(row.n);
    dist.push_back(metric_value(row, metric));
  }
  if (n.empty()) throw ContractError("fit_rate: no rows at t = " + shortest(t));
  return fit_loglog(n, dist);
}

}  // namespace mflab::harness
