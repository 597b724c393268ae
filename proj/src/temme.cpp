#include "ppv/temme.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include "ppv/specfun.hpp"

namespace ppv {

namespace {

constexpr double kPi = 3.14159265358979323846;

// sin(x)/x with the removable limit.
double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// 1 - sinc(phi), series below 0.5 to avoid cancellation.
double one_minus_sinc(double phi) {
    if (phi >= 0.5) return 1.0 - sinc(phi);
    const double t = phi * phi;
    return t / 6.0 *
           (1.0 - t / 20.0 *
                      (1.0 - t / 42.0 *
                                 (1.0 - t / 72.0 *
                                            (1.0 - t / 110.0 *
                                                       (1.0 - t / 156.0)))));
}

// 1/phi - cot(phi), series below 0.05.
double inv_phi_minus_cot(double phi) {
    if (phi >= 0.05) return 1.0 / phi - std::cos(phi) / std::sin(phi);
    const double t = phi * phi;
    return phi * (1.0 / 3.0 +
                  t * (1.0 / 45.0 + t * (2.0 / 945.0 + t / 4725.0)));
}

// sinh(d) - d, series below 0.25.
double sinh_minus_arg(double d) {
    const double a = std::fabs(d);
    if (a >= 0.25) return std::sinh(d) - d;
    const double t = d * d;
    return d * t / 6.0 *
           (1.0 + t / 20.0 * (1.0 + t / 42.0 * (1.0 + t / 72.0)));
}

}  // namespace

ChannelParams ChannelParams::from_omega(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw std::domain_error("ChannelParams: requires omega > 0");
    ChannelParams p;
    p.omega = omega;
    p.gamma_bar = 0.5 * std::log1p(omega);
    p.capacity_bits = p.gamma_bar / std::log(2.0);
    return p;
}

ChannelParams ChannelParams::from_snr_db(double snr_db) {
    return from_omega(std::pow(10.0, snr_db / 10.0));
}

ThresholdGeometry make_threshold(double gamma, const ChannelParams& params) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::domain_error("make_threshold: requires gamma > 0");
    ThresholdGeometry g;
    g.gamma = gamma;
    g.s_gamma = std::sinh(gamma);
    g.c_gamma = std::cosh(gamma);
    g.t_gamma = std::tanh(gamma);
    g.lambda_prime = params.omega / (4.0 * g.s_gamma * g.s_gamma);
    g.lambda = 0.5 * (1.0 + std::log1p(params.omega) -
                      g.lambda_prime * params.omega / (1.0 + params.omega));
    return g;
}

ThresholdGeometry threshold_from_lambda_prime(double lambda_prime,
                                              const ChannelParams& params) {
    if (!(lambda_prime > 0.0))
        throw std::domain_error("threshold_from_lambda_prime: requires > 0");
    const double s = 0.5 * std::sqrt(params.omega / lambda_prime);
    return make_threshold(std::asinh(s), params);
}

double alpha(double x, const ThresholdGeometry& geom) {
    const double d = x - geom.gamma;
    const double sh = std::sinh(0.5 * d);
    // alpha = -c (cosh d - 1) - s (sinh d - d); both parts cancellation-free.
    return -geom.c_gamma * 2.0 * sh * sh - geom.s_gamma * sinh_minus_arg(d);
}

KindGeometry kind_geometry(const ThresholdGeometry& geom,
                           const ChannelParams& params, Kind kind) {
    KindGeometry k;
    k.kind = kind;
    double theta = std::log(params.omega / (2.0 * geom.s_gamma));
    if (kind == Kind::fa) theta -= std::log1p(params.omega);
    k.theta = theta;
    k.theta_minus_gamma = theta - geom.gamma;
    k.exp_theta_minus_gamma = std::exp(k.theta_minus_gamma);
    k.step_sign = k.theta_minus_gamma < 0.0   ? 1
                  : k.theta_minus_gamma > 0.0 ? -1
                                              : 0;
    k.v = -alpha(theta, geom) / geom.s_gamma;
    if (k.v < 0.0) k.v = 0.0;  // alpha <= 0 everywhere; clip rounding noise
    return k;
}

Window validity_window(const ChannelParams& params) {
    Window w;
    w.lo = 0.5 * std::log1p(params.omega / (1.0 + params.omega));
    w.hi = params.gamma_bar;
    return w;
}

bool in_window(double gamma, const ChannelParams& params) {
    const Window w = validity_window(params);
    return gamma > w.lo && gamma < w.hi;
}

PathPoint path_point(double phi, const ThresholdGeometry& geom,
                     const KindGeometry& kindgeom) {
    if (!(phi >= 0.0 && phi < kPi))
        throw std::domain_error("path_point: requires 0 <= phi < pi");
    const double s = geom.s_gamma;
    const double c = geom.c_gamma;
    const double d1 = kindgeom.exp_theta_minus_gamma;

    PathPoint p;
    p.phi = phi;
    if (phi < 1e-14) {
        p.r = geom.gamma;
        p.r_prime = 0.0;
        p.delta = 0.0;
        p.h = 0.0;
        p.h_prime = 0.0;
        p.u = 0.0;
        p.g_tilde = 1.0 / (d1 - 1.0);
        p.c_of_phi = p.g_tilde / std::sqrt(c);
        return p;
    }

    const double sc = sinc(phi);
    const double oms = one_minus_sinc(phi);
    const double root = std::sqrt(sc * sc + s * s);  // sinc * cosh(r)
    // delta = r - gamma without subtracting two asinh values.
    const double egamma = s + c;
    const double num = s * oms + s * s * oms * (1.0 + sc) / (root + sc * c);
    p.delta = std::log1p(num / (sc * egamma));
    p.r = geom.gamma + p.delta;

    const double cosh_r = root / sc;
    const double tanh_r = s / root;
    p.r_prime = tanh_r * inv_phi_minus_cot(phi);

    const double half = std::sin(0.5 * phi);
    const double one_minus_cos = 2.0 * half * half;
    const double shd = std::sinh(0.5 * p.delta);
    const double alpha_r = -c * 2.0 * shd * shd - s * sinh_minus_arg(p.delta);
    p.h = one_minus_cos * cosh_r + alpha_r;
    if (p.h < 0.0) p.h = 0.0;  // rounding noise near phi = 0
    p.u = std::sqrt(2.0 * p.h);
    p.h_prime = std::sin(phi) * cosh_r * (1.0 + p.r_prime * p.r_prime);

    const double w = d1 * std::exp(-p.delta);  // e^(theta - r)
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    const double numer = w * (cphi + p.r_prime * sphi) - 1.0;
    const double wc = w - cphi;
    const double denom = wc * wc + sphi * sphi;
    p.g_tilde = numer / denom;
    p.c_of_phi = p.g_tilde * p.u / p.h_prime;
    return p;
}

namespace {

// 15-point Gauss-Legendre rule on [-1, 1] (positive half; symmetric).
constexpr int kGlHalf = 8;
constexpr double kGlX[kGlHalf] = {
    0.0,
    0.2011940939974345,
    0.3941513470775634,
    0.5709721726085388,
    0.7244177313601701,
    0.8482065834104272,
    0.9372733924007060,
    0.9879925180204854,
};
constexpr double kGlW[kGlHalf] = {
    0.2025782419255613,
    0.1984314853271116,
    0.1861610000155622,
    0.1662692058169939,
    0.1395706779261543,
    0.1071592204671719,
    0.0703660474881081,
    0.0307532419961173,
};

}  // namespace

GIntegralResult g_integral(const ThresholdGeometry& geom,
                           const KindGeometry& kindgeom, double n) {
    if (!(n >= 1.0)) throw std::domain_error("g_integral: requires n >= 1");
    const double s = geom.s_gamma;
    const double n_over_2s = n / (2.0 * s);

    int evals = 0;
    auto integrand = [&](double phi) {
        const PathPoint p = path_point(phi, geom, kindgeom);
        ++evals;
        return p.g_tilde * std::exp(-n_over_2s * p.h);
    };
    auto decay = [&](double phi) {
        return n_over_2s * path_point(phi, geom, kindgeom).h;
    };

    // Truncation point: past it the exponential factor is below exp(-80)
    // of its peak at phi = 0, so the neglected tail is < 1e-30 of the peak.
    const double phi_cap = kPi - 1e-9;
    double phi_max = phi_cap;
    {
        double lo = 1e-12, hi = phi_cap;
        if (decay(hi) > 80.0) {
            for (int i = 0; i < 80; ++i) {
                const double mid = 0.5 * (lo + hi);
                (decay(mid) < 80.0 ? lo : hi) = mid;
            }
            phi_max = hi;
        }
    }

    // Gaussian-factor width: the scale where the exponent reaches one.
    double phi_sigma = phi_max;
    {
        double lo = 1e-12, hi = phi_max;
        if (decay(hi) > 1.0) {
            for (int i = 0; i < 60; ++i) {
                const double mid = 0.5 * (lo + hi);
                (decay(mid) < 1.0 ? lo : hi) = mid;
            }
            phi_sigma = hi;
        }
    }
    // Scale of the g~ transition when theta is close to gamma (a narrow
    // peak develops at the origin as the pole approaches the path).
    const double pole_scale =
        std::sqrt(std::max(std::fabs(kindgeom.theta_minus_gamma), 1e-14));
    const double min_scale =
        std::max(std::min({phi_sigma, pole_scale, phi_max}) / 16.0,
                 phi_max * std::pow(2.0, -60));

    std::vector<double> bounds;
    for (double b = phi_max; b > min_scale; b *= 0.5) bounds.push_back(b);
    bounds.push_back(min_scale);
    bounds.push_back(0.0);
    std::sort(bounds.begin(), bounds.end());

    auto gl15 = [&](double a, double b) {
        const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
        double acc = kGlW[0] * integrand(mid);
        for (int i = 1; i < kGlHalf; ++i) {
            acc += kGlW[i] * (integrand(mid - rad * kGlX[i]) +
                              integrand(mid + rad * kGlX[i]));
        }
        return acc * rad;
    };

    struct Panel {
        double a, b, fine, err;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    auto make_panel = [&](double a, double b) {
        const double coarse = gl15(a, b);
        const double m = 0.5 * (a + b);
        const double fine = gl15(a, m) + gl15(m, b);
        return Panel{a, b, fine, std::fabs(fine - coarse)};
    };

    std::priority_queue<Panel> queue;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        const Panel p = make_panel(bounds[i], bounds[i + 1]);
        total += p.fine;
        total_err += p.err;
        queue.push(p);
    }

    const double rel_tol = 1e-12;
    int splits = 0;
    while (total_err > rel_tol * std::fabs(total) + 1e-300 && !queue.empty()) {
        if (++splits > 4000)
            throw std::runtime_error("g_integral: adaptive refinement failed");
        const Panel worst = queue.top();
        queue.pop();
        total -= worst.fine;
        total_err -= worst.err;
        const double m = 0.5 * (worst.a + worst.b);
        for (const Panel& child :
             {make_panel(worst.a, m), make_panel(m, worst.b)}) {
            total += child.fine;
            total_err += child.err;
            queue.push(child);
        }
    }

    GIntegralResult res;
    res.value = total / kPi;
    res.abs_error = total_err / kPi;
    res.evaluations = evals;
    return res;
}

namespace detail {

// Oracle- and integral-path log probabilities with explicit step handling.
// The series paths live with the coefficient engine, which also defines
// the public log_prob dispatcher.

LogProb log_prob_oracle(const ThresholdGeometry& geom,
                        const ChannelParams& params, Kind kind,
                        std::int64_t n) {
    if (n > kOracleMaxN)
        throw std::out_of_range("log_prob: oracle limited to n <= 512");
    const double omega = params.omega;
    const double nd = static_cast<double>(n);
    OracleProb o;
    if (kind == Kind::md) {
        o = chi2_noncentral_ccdf_oracle(nd * geom.lambda_prime, n, nd / omega);
    } else {
        o = chi2_noncentral_cdf_oracle(nd * geom.lambda_prime / (1.0 + omega),
                                       n, nd * (1.0 + omega) / omega);
    }
    return o.prob;
}

LogProb log_prob_integral(const ThresholdGeometry& geom,
                          const ChannelParams& params, Kind kind,
                          std::int64_t n) {
    const KindGeometry kg = kind_geometry(geom, params, kind);
    const GIntegralResult g = g_integral(geom, kg, static_cast<double>(n));
    const double exponent = -0.5 * static_cast<double>(n) * kg.v;
    const MethodTag tag{EvalMethod::integral, 0};

    const bool step_active =
        (kind == Kind::md) ? (kg.step_sign >= 0) : (kg.step_sign <= 0);
    const double signed_g = (kind == Kind::md) ? g.value : -g.value;
    if (!step_active) {
        // P = |g| e^(-n v / 2); the signed integrand is positive here.
        if (!(signed_g > 0.0))
            throw std::runtime_error("log_prob: integral sign inconsistency");
        return make_log_prob(std::log(signed_g) + exponent, tag);
    }
    // Step term contributes one: P = 1 - |g| e^(-n v / 2).
    const double log_correction = std::log(-signed_g) + exponent;
    if (!std::isfinite(log_correction) || log_correction > 0.0)
        throw std::runtime_error("log_prob: step correction out of range");
    return make_log_prob(std::log1p(-std::exp(log_correction)), tag);
}

}  // namespace detail

}  // namespace ppv
