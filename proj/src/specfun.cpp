#include "ppv/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ppv/rootfind.hpp"

namespace ppv {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLn10e30 = 69.07755278982137;  // ln(1e30)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Switch point between erfc evaluation and the asymptotic expansion.
// At x = 30 the optimally truncated expansion has relative error
// ~ exp(-x^2/2), far below machine precision.
constexpr double kAsymptoticX = 30.0;

double lgamma_ts(double x) {
#if defined(__GLIBC__) || defined(__APPLE__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

}  // namespace

std::string MethodTag::name() const {
    switch (kind) {
        case EvalMethod::oracle: return "oracle";
        case EvalMethod::integral: return "integral";
        case EvalMethod::series: return "series-" + std::to_string(terms);
        case EvalMethod::closed_form: return "closed" + std::to_string(terms);
    }
    return "?";
}

double q_series(double x, int K) {
    if (!(x > 0.0)) throw std::domain_error("q_series: requires x > 0");
    if (K < 1) throw std::domain_error("q_series: requires K >= 1");
    const double ratio_base = 2.0 / (x * x);
    double term = 0.5 / std::sqrt(M_PI) * std::sqrt(ratio_base);
    double sum = term;
    for (int k = 1; k < K; ++k) {
        term *= -(k - 0.5) * ratio_base;
        sum += term;
    }
    return sum;
}

QSeriesAuto q_series_auto(double x) {
    if (!(x > 0.0)) throw std::domain_error("q_series_auto: requires x > 0");
    const double ratio_base = 2.0 / (x * x);
    double term = 0.5 / std::sqrt(M_PI) * std::sqrt(ratio_base);
    double sum = term;
    double prev = term;
    // |term| ratio (k+1/2)*2/x^2 grows monotonically: the first increase
    // marks the smallest term, which becomes the first neglected one.
    for (int k = 1; k < 500; ++k) {
        term = -prev * (k - 0.5) * ratio_base;
        if (std::fabs(term) >= std::fabs(prev)) {
            return {sum, k, term};
        }
        sum += term;
        prev = term;
    }
    return {sum, 500, term};
}

double log_gaussian_q(double x) {
    if (std::isnan(x)) throw std::domain_error("log_gaussian_q: NaN");
    if (x <= kAsymptoticX) {
        const double q = 0.5 * std::erfc(x / kSqrt2);
        return std::log(q);
    }
    const QSeriesAuto qa = q_series_auto(x);
    return -0.5 * x * x + std::log(qa.value);
}

double gaussian_q(double x) {
    if (std::isnan(x)) throw std::domain_error("gaussian_q: NaN");
    if (x <= kAsymptoticX) return 0.5 * std::erfc(x / kSqrt2);
    return std::exp(log_gaussian_q(x));
}

double gaussian_q_scaled(double x) {
    if (x < 0.0) return -gaussian_q_scaled(-x);
    if (x <= kAsymptoticX) return std::exp(0.5 * x * x + log_gaussian_q(x));
    return q_series_auto(x).value;
}

double gaussian_q_inv(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("gaussian_q_inv: requires 0 < p < 1");
    const double target = std::log(p);
    auto f = [target](double x) { return log_gaussian_q(x) - target; };
    // Q is strictly decreasing; f is decreasing. Q(-40)~1, Q(40)~1e-350.
    double a = -40.0, b = 40.0;
    const RootResult r =
        find_root_bracketed(f, a, b, f(a), f(b), 1e-13 * std::fabs(target) + 1e-15,
                            1e-15, 1e-300, 300);
    return r.x;
}

double erf(double x) { return std::erf(x); }

double erf_inv(double y) {
    if (!(std::fabs(y) < 1.0))
        throw std::domain_error("erf_inv: requires |y| < 1");
    if (y == 0.0) return 0.0;
    if (y < 0.0) return -erf_inv(-y);
    // Seed through the Gaussian tail inverse: erf(x) = 1 - 2 Q(x*sqrt(2)),
    // then polish with Newton (derivative 2/sqrt(pi) exp(-x^2)).
    double x = gaussian_q_inv(0.5 * (1.0 - y)) / kSqrt2;
    if (!std::isfinite(x)) x = 0.0;
    for (int it = 0; it < 4; ++it) {
        const double r = std::erf(x) - y;
        const double d = 2.0 / std::sqrt(M_PI) * std::exp(-x * x);
        x -= r / d;
    }
    return x;
}

double log_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("log_gamma_p: bad args");
    if (x == 0.0) return kNegInf;
    if (x < a + 1.0) {
        // Lower series: P = x^a e^-x / Gamma(a) * sum_k x^k / (a...(a+k)).
        double term = 1.0 / a;
        double sum = term;
        for (int k = 1; k < 10000; ++k) {
            term *= x / (a + k);
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return a * std::log(x) - x - lgamma_ts(a) + std::log(sum);
    }
    const double lq = log_gamma_q(a, x);
    return std::log1p(-std::exp(lq));
}

double log_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("log_gamma_q: bad args");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        const double lp = log_gamma_p(a, x);
        return std::log1p(-std::exp(lp));
    }
    // Upper continued fraction (modified Lentz).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return a * std::log(x) - x - lgamma_ts(a) + std::log(h);
}

namespace {

// Shared Poisson-mixture accumulator. `tail` selects CCDF vs CDF terms.
OracleProb chi2_mixture(double a, std::int64_t n, double s, bool tail) {
    if (a < 0.0 || !std::isfinite(a))
        throw std::domain_error("chi2 oracle: requires a >= 0");
    if (n < 1) throw std::domain_error("chi2 oracle: requires n >= 1");
    if (s < 0.0 || !std::isfinite(s))
        throw std::domain_error("chi2 oracle: requires s >= 0");

    const MethodTag tag{EvalMethod::oracle, 0};
    const double x = 0.5 * a;
    const double half_s = 0.5 * s;
    const double order = 0.5 * static_cast<double>(n);

    if (a == 0.0) return {make_log_prob(tail ? 0.0 : kNegInf, tag), true};
    if (half_s == 0.0) {
        const double lv = tail ? log_gamma_q(order, x) : log_gamma_p(order, x);
        return {make_log_prob(lv, tag), true};
    }

    const double log_half_s = std::log(half_s);
    // Online log-sum-exp over j of  w_j * T_j, with
    //   log w_j = -s/2 + j log(s/2) - log j!   (Poisson weights)
    //   T_j = Q(n/2+j, a/2) for the tail, P(n/2+j, a/2) otherwise.
    double run_max = kNegInf;
    double run_sum = 0.0;  // sum of exp(term - run_max)
    bool bound_met = false;
    const std::int64_t j_cap = 3000000;
    for (std::int64_t j = 0; j <= j_cap; ++j) {
        const double lw = -half_s + j * log_half_s - lgamma_ts(j + 1.0);
        const double lt =
            tail ? log_gamma_q(order + j, x) : log_gamma_p(order + j, x);
        const double lterm = lw + lt;
        if (lterm > run_max) {
            run_sum = run_sum * std::exp(run_max - lterm) + 1.0;
            run_max = lterm;
        } else if (std::isfinite(lterm)) {
            run_sum += std::exp(lterm - run_max);
        }
        // Truncation: past the Poisson mode the weights decay at least
        // geometrically with ratio rho = (s/2)/(j+1).  For the CDF the
        // incomplete-gamma factor decreases with j, so w_j*T_j bounds the
        // remainder; for the CCDF the factor is bounded by one and the
        // Poisson weight alone bounds it.
        const double rho = half_s / (j + 1.0);
        if (rho < 1.0 && run_max > kNegInf) {
            const double geo = std::log(rho / (1.0 - rho));
            const double lrem = (tail ? lw : lterm) + geo;
            const double lsum = run_max + std::log(run_sum);
            if (lrem <= lsum - kLn10e30) {
                bound_met = true;
                break;
            }
        }
    }
    const double log_value = run_max + std::log(run_sum);
    return {make_log_prob(std::min(log_value, 0.0), tag), bound_met};
}

}  // namespace

OracleProb chi2_noncentral_cdf_oracle(double a, std::int64_t n, double s) {
    return chi2_mixture(a, n, s, /*tail=*/false);
}

OracleProb chi2_noncentral_ccdf_oracle(double a, std::int64_t n, double s) {
    return chi2_mixture(a, n, s, /*tail=*/true);
}

}  // namespace ppv
