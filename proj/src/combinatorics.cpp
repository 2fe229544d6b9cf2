#include "mflab/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mflab/error.hpp"

namespace mflab {

namespace {

void check_laguerre_domain(int k, double alpha) {
  if (k < 0) throw ContractError("laguerre: negative degree");
  if (!(alpha > -1.0)) throw ContractError("laguerre: alpha must exceed -1");
}

constexpr double kRescaleAbove = 1e150;

}  // namespace

double laguerre(int k, double alpha, double x) {
  check_laguerre_domain(k, alpha);
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

SignedLog log_laguerre(int k, double alpha, double x) {
  check_laguerre_domain(k, alpha);
  double prev = 1.0;
  double cur = k == 0 ? 1.0 : 1.0 + alpha - x;
  double log_scale = 0.0;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > kRescaleAbove) {
      prev /= mag;
      cur /= mag;
      log_scale += std::log(mag);
    }
  }
  if (cur == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
  return {log_scale + std::log(std::abs(cur)), cur > 0 ? 1 : -1};
}

double log_dnm(int n, int m) {
  if (n < 1 || m < 0 || m > n) throw ContractError("log_dnm: need 0 <= m <= n, n >= 1");
  const double r = n - m;
  return 0.5 * std::lgamma(r + 1.0) + 0.5 * n - 0.5 * r * std::log(static_cast<double>(n));
}

ThetaCoefficients theta_weyl_coefficients(int n, int m) {
  if (n < 1 || m < 0 || m > n) throw ContractError("theta_weyl_coefficients: need 0 <= m <= n, n >= 1");
  ThetaCoefficients out{n, m, log_dnm(n, m), {}};
  const int r = n - m;
  const double log_n = std::log(static_cast<double>(n));
  const double lg_r = std::lgamma(r + 1.0);
  out.a.resize(static_cast<std::size_t>(r) + 1);
  for (int k = 0; k <= r; ++k) {
    const auto lag = log_laguerre(k, static_cast<double>(r - k), static_cast<double>(n));
    if (lag.sign == 0) {
      out.a[static_cast<std::size_t>(k)] = 0.0;
      continue;
    }
    const double log_a = -0.5 * n + 0.5 * (r - k) * log_n + 0.5 * (std::lgamma(k + 1.0) - lg_r) + lag.log_abs;
    out.a[static_cast<std::size_t>(k)] = std::exp(log_a);
  }
  return out;
}

KrasikovBound krasikov_bound(int k, double alpha, double x) {
  if (k < 2) throw ContractError("krasikov_bound: needs k >= 2");
  if (!(alpha > -1.0)) throw ContractError("krasikov_bound: alpha must exceed -1");
  const double a = std::sqrt(k + alpha + 1.0);
  const double b = std::sqrt(static_cast<double>(k));
  const double s2 = (a + b) * (a + b);
  const double q2 = (a - b) * (a - b);
  if (!(x > q2 && x < s2)) return {std::numeric_limits<double>::infinity(), false};
  const double r = (x - q2) * (s2 - x);
  const double log_bound = 0.5 * (std::lgamma(k + alpha + 1.0) - std::lgamma(k + 1.0)) +
                           0.5 * std::log(x * (s2 - q2) / r) + 0.5 * x - 0.5 * (alpha + 1.0) * std::log(x);
  return {std::exp(log_bound), true};
}

int admissible_m(int n) {
  if (n < 1) throw ContractError("admissible_m: needs n >= 1");
  const int m = static_cast<int>(std::floor(std::sqrt(7.0 + 3.0 * n) - 3.0));
  return m < 0 ? 0 : m;
}

MomentBound weighted_number_moment(int n, int m, double delta) {
  if (m < 0 || m > admissible_m(n))
    throw ContractError("weighted_number_moment: m = " + std::to_string(m) + " exceeds admissible " +
                        std::to_string(admissible_m(n)) + " at n = " + std::to_string(n));
  if (!(delta > 0.25)) throw ContractError("weighted_number_moment: delta must exceed 1/4");
  const auto coeffs = theta_weyl_coefficients(n, m);
  const int r = n - m;
  const double w = 2.0 * delta;
  const double tail = std::pow(r + 2.0, -w);

  double lhs = tail;
  for (int k = 0; k <= r; ++k) {
    const double ak = coeffs.a[static_cast<std::size_t>(k)];
    lhs += ak * ak * std::pow(k + m + 1.0, -w);
  }

  const double inv_d2 = std::exp(-2.0 * coeffs.log_dnm);
  const double head = inv_d2 * (1.0 + m / std::sqrt(static_cast<double>(n)));
  const double spread = (r + 1.0 > 1.0) ? (harmonic_number(w + 0.5, r + 1) - 1.0) : 0.0;
  const double middle = spread / ((std::sqrt(2.0) / 2.0 - 0.5) * std::sqrt(r + 1.0));
  return {lhs, head + middle + tail};
}

double harmonic_number(double s, long terms) {
  double sum = 0.0;
  for (long k = terms; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
  return sum;
}

double zeta(double s) {
  if (!(s > 1.0)) throw ContractError("zeta: needs s > 1");
  constexpr long kTerms = 1'000'000;
  const double n = static_cast<double>(kTerms);
  // sum_{k > N} k^{-s} ~ N^{1-s}/(s-1) - N^{-s}/2 + s N^{-s-1}/12
  const double tail = std::pow(n, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(n, -s) + s * std::pow(n, -s - 1.0) / 12.0;
  return harmonic_number(s, kTerms) + tail;
}

}  // namespace mflab
