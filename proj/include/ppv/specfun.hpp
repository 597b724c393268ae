#ifndef PPV_SPECFUN_HPP
#define PPV_SPECFUN_HPP

#include <cstdint>

#include "ppv/logprob.hpp"

namespace ppv {

/// Gaussian tail Q(x) = P[N(0,1) > x]. Total on finite reals.
double gaussian_q(double x);

/// ln Q(x), valid for arbitrarily deep tails (x up to ~1e8).
double log_gaussian_q(double x);

/// Scaled tail q(x) = exp(x^2/2) Q(x), evaluated exactly (not by series).
double gaussian_q_scaled(double x);

/// Partial sum of the divergent asymptotic expansion of q(x), truncated
/// after K terms (k = 0..K-1). Requires x > 0, K >= 1.
double q_series(double x, int K);

struct QSeriesAuto {
    double value = 0.0;          // partial sum over k < terms_used
    int terms_used = 0;          // index of the smallest-magnitude term
    double first_neglected = 0.0;  // the smallest term itself (signed)
};

/// Smallest-term auto-truncation of the q(x) expansion.
QSeriesAuto q_series_auto(double x);

/// Inverse Gaussian tail: x with Q(x) = p, for p in (0,1).
double gaussian_q_inv(double p);

/// Standard error function and its inverse (|y| < 1).
double erf(double x);
double erf_inv(double y);

struct OracleProb {
    LogProb prob;
    bool tail_bound_met = true;  // Poisson truncation bound < 1e-30 achieved
};

/// Non-central chi-squared CDF F(a; n, s) by Poisson-mixture summation over
/// central chi-squared CDFs. Ground-truth oracle; intended for n <= 512.
OracleProb chi2_noncentral_cdf_oracle(double a, std::int64_t n, double s);

/// Complementary mixture (not 1 - CDF); preserves log accuracy in deep tails.
OracleProb chi2_noncentral_ccdf_oracle(double a, std::int64_t n, double s);

/// log of the regularized incomplete gamma functions P(a,x), Q(a,x).
/// Exposed for reuse by the oracle and by tests.
double log_gamma_p(double a, double x);
double log_gamma_q(double a, double x);

}  // namespace ppv

#endif  // PPV_SPECFUN_HPP
