#include "ppv/series.hpp"

#include <cmath>
#include <stdexcept>

namespace ppv {

namespace {

constexpr double kPoleGuard = 1e-8;  // minimum |e^(theta-gamma) - 1|

int parity_sign(int n) { return (n / 2) % 2 == 0 ? 1 : -1; }  // (-1)^floor(n/2)

}  // namespace

std::vector<double> compose_series_power(const std::vector<double>& inner,
                                         int j, int n_max) {
    if (j < 1) throw std::domain_error("compose_series_power: requires j >= 1");
    if (inner.size() < 2 || inner[1] == 0.0)
        throw std::domain_error(
            "compose_series_power: zero leading coefficient");
    std::vector<double> out(n_max + 1, 0.0);
    if (j > n_max) return out;
    out[j] = std::pow(inner[1], j);
    auto ratio = [&](int m) {  // inner[m+1] / inner[1]
        return (m + 1 < static_cast<int>(inner.size()) ? inner[m + 1] : 0.0) /
               inner[1];
    };
    for (int n = j + 1; n <= n_max; ++n) {
        double acc = 0.0;
        for (int l = 1; l <= n - j; ++l) {
            const double factor =
                static_cast<double>(l * j - n + j + l) / (n - j);
            acc += factor * ratio(l) * out[n - l];
        }
        out[n] = acc;
    }
    return out;
}

CoefficientTables build_coefficients(const ThresholdGeometry& geom,
                                     double theta, int K) {
    if (K < 1 || K > kSeriesHardCap)
        throw std::domain_error("build_coefficients: K out of range");
    const double gamma = geom.gamma;
    const double s = geom.s_gamma;
    const double c = geom.c_gamma;
    const double d1 = std::exp(theta - gamma);
    if (std::fabs(d1 - 1.0) < kPoleGuard)
        throw std::domain_error(
            "build_coefficients: pole at theta = gamma; use the integral");

    const int N = 2 * K;  // highest Taylor order required
    CoefficientTables tb;
    tb.k_max = K;
    tb.gamma = gamma;
    tb.theta = theta;
    tb.s_gamma = s;
    tb.c_gamma = c;
    tb.exp_theta_minus_gamma = d1;

    // Step 1: Taylor of the exponent map at gamma.
    tb.alpha_taylor.assign(N + 1, 0.0);
    double fact = 1.0;
    for (int n = 2; n <= N; ++n) {
        fact *= n;
        tb.alpha_taylor[n] = (n % 2 == 0 ? -c : -s) / fact;
    }

    // Step 2: powers of the log series, then nu.
    std::vector<double> log_series(N + 1, 0.0);
    for (int m = 1; m <= N; ++m)
        log_series[m] = (m % 2 == 1 ? 1.0 : -1.0) / m;
    tb.q_table.assign(N + 1, {});
    for (int j = 2; j <= N; ++j)
        tb.q_table[j] = compose_series_power(log_series, j, N);
    tb.nu.assign(N + 1, 0.0);
    for (int n = 2; n <= N; ++n) {
        double acc = 0.0;
        for (int j = 2; j <= n; ++j)
            acc += tb.alpha_taylor[j] * tb.q_table[j][n];
        tb.nu[n] = acc * std::exp(-static_cast<double>(n) * gamma);
    }

    // Step 3: beta (payload of the pure-imaginary square-root series).
    const int NB = N - 1;
    tb.beta.assign(NB + 1, 0.0);
    tb.beta[1] = -std::sqrt(-2.0 * tb.nu[2]);
    for (int n = 2; n <= NB; ++n) {
        double conv = 0.0;
        for (int k = 2; k <= n - 1; ++k) conv += tb.beta[k] * tb.beta[n + 1 - k];
        tb.beta[n] = -(tb.nu[n + 1] + 0.5 * conv) / tb.beta[1];
    }

    // Step 4: powers of beta, then t.  Internally the t series is carried in
    // the rotated payload t_rot[n] = (-1)^floor(n/2) * t_coeffs[n], which
    // turns all recursions into plain real ones.
    tb.p_table.assign(NB + 1, {});
    for (int j = 1; j <= NB; ++j)
        tb.p_table[j] = compose_series_power(tb.beta, j, NB);
    std::vector<double> t_rot(NB + 1, 0.0);
    t_rot[0] = std::exp(gamma);
    t_rot[1] = -1.0 / tb.beta[1];
    const double inv_b1 = 1.0 / tb.beta[1];
    for (int n = 2; n <= NB; ++n) {
        double acc = 0.0;
        int sign_j = -1;  // (-1)^j starting at j = 1
        for (int j = 1; j <= n - 1; ++j) {
            acc += sign_j * t_rot[j] * tb.p_table[j][n];
            sign_j = -sign_j;
        }
        const double scale = std::pow(inv_b1, n);
        t_rot[n] = (n % 2 == 0 ? -1.0 : 1.0) * scale * acc;  // (-1)^(n+1)
    }
    tb.t_coeffs.assign(NB + 1, 0.0);
    for (int n = 0; n <= NB; ++n) tb.t_coeffs[n] = parity_sign(n) * t_rot[n];

    // Step 5: powers of t, then xi (same rotated-payload trick).
    const int NX = N - 2;
    std::vector<std::vector<double>> s_rot(NX + 1);
    for (int j = 1; j <= NX; ++j)
        s_rot[j] = compose_series_power(t_rot, j, NX);
    const double big_d = std::exp(theta) - std::exp(gamma);
    std::vector<double> xi_rot(NX + 1, 0.0);
    xi_rot[0] = 1.0 / big_d;
    for (int n = 1; n <= NX; ++n) {
        double acc = 0.0;
        double dpow = 1.0 / (big_d * big_d);  // D^-(j+1) at j = 1
        for (int j = 1; j <= n; ++j) {
            acc += dpow * s_rot[j][n];
            dpow /= big_d;
        }
        xi_rot[n] = acc;
    }
    tb.s_table.assign(NX + 1, {});
    for (int j = 1; j <= NX; ++j) {
        tb.s_table[j].assign(NX + 1, 0.0);
        for (int n = j; n <= NX; ++n)
            tb.s_table[j][n] = parity_sign(n) * s_rot[j][n];
    }
    tb.xi.assign(NX + 1, 0.0);
    for (int n = 0; n <= NX; ++n) tb.xi[n] = parity_sign(n) * xi_rot[n];

    // Step 6: convolution t'(u) xi(u); even orders carry the real c_2k.
    tb.c_even.assign(K, 0.0);
    for (int k = 0; k < K; ++k) {
        const int n = 2 * k;
        double acc = 0.0;
        for (int m = 0; m <= n; ++m)
            acc += (m + 1) * t_rot[m + 1] * xi_rot[n - m];
        tb.c_even[k] = (k % 2 == 0 ? 1.0 : -1.0) * acc;  // i^(2k) = (-1)^k
        if (!std::isfinite(tb.c_even[k]))
            throw std::domain_error(
                "build_coefficients: coefficient overflow near the pole");
    }
    return tb;
}

SeriesResult g_series(const CoefficientTables& tables,
                      const ThresholdGeometry& geom, double n, int K) {
    if (!(n >= 1.0)) throw std::domain_error("g_series: requires n >= 1");
    if (K < 0 || K > tables.k_max)
        throw std::domain_error("g_series: K exceeds table depth");
    const double base = 4.0 * geom.s_gamma / n;
    const double sqrt_base = std::sqrt(base);

    SeriesResult res;
    res.terms.resize(tables.k_max);
    double gamma_ratio = 1.0;  // Gamma(k+1/2)/Gamma(1/2) by recurrence
    double base_pow = sqrt_base;
    for (int k = 0; k < tables.k_max; ++k) {
        if (k > 0) {
            gamma_ratio *= (k - 0.5);
            base_pow *= base;
        }
        res.terms[k] =
            tables.c_even[k] * gamma_ratio * base_pow / (2.0 * std::sqrt(M_PI));
    }

    int cut;
    if (K > 0) {
        cut = K;
    } else {
        const int scan = std::min(tables.k_max - 1, kSeriesAutoCap);
        int arg_min = 0;
        for (int k = 1; k <= scan; ++k)
            if (std::fabs(res.terms[k]) < std::fabs(res.terms[arg_min]))
                arg_min = k;
        cut = std::max(arg_min, 1);
    }
    double sum = 0.0;
    for (int k = 0; k < cut; ++k) sum += res.terms[k];
    res.g_value = sum;
    res.truncation_index = cut;
    res.smallest_term_magnitude =
        std::fabs(res.terms[cut < tables.k_max ? cut : tables.k_max - 1]);
    return res;
}

double g0_closed_form(const ThresholdGeometry& geom,
                      const KindGeometry& kindgeom) {
    return std::sqrt(geom.t_gamma / M_PI) /
           (kindgeom.exp_theta_minus_gamma - 1.0);
}

double g1_closed_form(const ThresholdGeometry& geom,
                      const KindGeometry& kindgeom) {
    const double t = geom.t_gamma;
    const double e = kindgeom.exp_theta_minus_gamma - 1.0;
    return t * ((9.0 - 12.0 * t + 5.0 * t * t) / 12.0 +
                (2.0 + (3.0 - t) * e) / (e * e));
}

LogProb closed_form_logprob(const ThresholdGeometry& geom,
                            const ChannelParams& params, Kind kind,
                            std::int64_t n, int order) {
    if (order != 1 && order != 2)
        throw std::domain_error("closed_form_logprob: order must be 1 or 2");
    if (!in_window(geom.gamma, params))
        throw std::domain_error("closed_form_logprob: window violation");
    const KindGeometry kg = kind_geometry(geom, params, kind);
    if (std::fabs(kg.exp_theta_minus_gamma - 1.0) < kPoleGuard)
        throw std::domain_error("closed_form_logprob: pole at theta = gamma");
    const double g0 = g0_closed_form(geom, kg);
    const double signed_g0 = (kind == Kind::md) ? g0 : -g0;
    if (!(signed_g0 > 0.0))
        throw std::runtime_error("closed_form_logprob: sign inconsistency");
    const double nd = static_cast<double>(n);
    double lp = -0.5 * nd * kg.v - 0.5 * std::log(nd) + std::log(signed_g0);
    if (order == 2) {
        const double g1 = g1_closed_form(geom, kg);
        if (g1 / nd >= 1.0)
            throw std::domain_error(
                "closed_form_logprob: two-term correction breaks down");
        lp += std::log1p(-g1 / nd);
    }
    return make_log_prob(lp, MethodTag{EvalMethod::closed_form, order});
}

namespace detail {

LogProb log_prob_series(const ThresholdGeometry& geom,
                        const ChannelParams& params, Kind kind, std::int64_t n,
                        int K, SeriesResult* diagnostics) {
    if (!in_window(geom.gamma, params))
        throw std::domain_error("log_prob: series method requires the window");
    const KindGeometry kg = kind_geometry(geom, params, kind);
    const int depth =
        (K > 0 ? std::min(K + 1, kSeriesHardCap) : kSeriesAutoCap + 1);
    const CoefficientTables tables = build_coefficients(geom, kg.theta, depth);
    const SeriesResult sr = g_series(tables, geom, static_cast<double>(n), K);
    if (diagnostics) *diagnostics = sr;
    const double signed_g = (kind == Kind::md) ? sr.g_value : -sr.g_value;
    if (!(signed_g > 0.0))
        throw std::domain_error("log_prob: series sign inconsistency");
    const double lp = std::log(signed_g) - 0.5 * static_cast<double>(n) * kg.v;
    return make_log_prob(lp,
                         MethodTag{EvalMethod::series, sr.truncation_index});
}

}  // namespace detail

LogProb log_prob(const ThresholdGeometry& geom, const ChannelParams& params,
                 Kind kind, std::int64_t n, Method method) {
    if (n < 1) throw std::domain_error("log_prob: requires n >= 1");
    using MK = Method::Kind;
    switch (method.kind) {
        case MK::oracle:
            return detail::log_prob_oracle(geom, params, kind, n);
        case MK::integral:
            return detail::log_prob_integral(geom, params, kind, n);
        case MK::series:
            return detail::log_prob_series(geom, params, kind, n, method.terms);
        case MK::closed_form:
            return closed_form_logprob(geom, params, kind, n, method.terms);
        case MK::automatic:
            break;
    }
    if (n <= 64) return detail::log_prob_oracle(geom, params, kind, n);
    if (n <= 2000 || !in_window(geom.gamma, params))
        return detail::log_prob_integral(geom, params, kind, n);
    try {
        SeriesResult sr;
        const LogProb lp = detail::log_prob_series(geom, params, kind, n, 0, &sr);
        // Accept the expansion only when the smallest term certifies decent
        // resolution; otherwise the integral is the reliable route.
        if (sr.smallest_term_magnitude <= 1e-2 * std::fabs(sr.g_value))
            return lp;
    } catch (const std::domain_error&) {
    }
    return detail::log_prob_integral(geom, params, kind, n);
}

}  // namespace ppv
