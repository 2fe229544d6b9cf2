#pragma once

#include <vector>

namespace mflab {

// Generalized Laguerre polynomial L_k^(alpha)(x) by the three-term
// recurrence. k >= 0, alpha > -1.
double laguerre(int k, double alpha, double x);

struct SignedLog {
  double log_abs;  // -inf for an exact zero
  int sign;        // -1, 0 or +1
};
// Same recurrence with running rescaling, for degrees where the value itself
// over- or underflows a double.
SignedLog log_laguerre(int k, double alpha, double x);

// log of sqrt((n-m)!) e^{n/2} n^{-(n-m)/2}, the normalization that turns the
// sector-n projection of a displaced excitation into a unit-norm state.
double log_dnm(int n, int m);

// Sector norms of the displaced-back state, indexed k = 0..n-m:
// A_k = e^{-n/2} n^{(n-m-k)/2} sqrt(k!/(n-m)!) |L_k^(n-m-k)(n)|.
// They depend on (n, m) only.
struct ThetaCoefficients {
  int n = 0;
  int m = 0;
  double log_dnm = 0.0;
  std::vector<double> a;
};
ThetaCoefficients theta_weyl_coefficients(int n, int m);

// Pointwise Laguerre envelope on the window (q^2, s^2) with
// s, q = sqrt(k+alpha+1) +- sqrt(k). Outside the window valid = false and
// bound is +inf.
struct KrasikovBound {
  double bound;
  bool valid;
};
KrasikovBound krasikov_bound(int k, double alpha, double x);

// Largest excitation number m with m <= sqrt(7 + 3n) - 3, at least 0.
int admissible_m(int n);

// Weighted number moment of the displaced-back excitation state against its
// explicit upper bracket. delta is the exponent of (N+1)^{-delta} inside the
// norm, so weights enter as (k+m+1)^{-2 delta}; needs delta > 1/4.
struct MomentBound {
  double lhs;
  double rhs;
};
MomentBound weighted_number_moment(int n, int m, double delta);

// sum_{k=1}^{terms} k^{-s}
double harmonic_number(double s, long terms);
// Riemann zeta for s > 1: partial sum to 10^6 plus an Euler-Maclaurin tail.
double zeta(double s);

}  // namespace mflab
