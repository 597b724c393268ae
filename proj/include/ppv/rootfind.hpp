#ifndef PPV_ROOTFIND_HPP
#define PPV_ROOTFIND_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ppv {

struct RootResult {
    double x = 0.0;
    double f_at_x = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Bracketed root finding on a continuous function: bisection refined by
/// secant steps. The bracket [a,b] must satisfy f(a)*f(b) <= 0.
/// Stops when |f| <= f_tol or the bracket width shrinks below
/// x_tol_rel * |x| + x_tol_abs.
inline RootResult find_root_bracketed(const std::function<double(double)>& f,
                                      double a, double b, double fa, double fb,
                                      double f_tol, double x_tol_rel,
                                      double x_tol_abs = 1e-300,
                                      int max_iter = 200) {
    if (std::isnan(fa) || std::isnan(fb))
        throw std::invalid_argument("find_root_bracketed: NaN at bracket end");
    if (fa == 0.0) return {a, fa, 0, true};
    if (fb == 0.0) return {b, fb, 0, true};
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("find_root_bracketed: root not bracketed");

    double x_prev = a, f_prev = fa;
    double x_cur = b, f_cur = fb;
    RootResult res;
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        // Secant candidate from the two most recent evaluations.
        double x_new;
        const double denom = f_cur - f_prev;
        bool used_secant = false;
        if (denom != 0.0) {
            x_new = x_cur - f_cur * (x_cur - x_prev) / denom;
            const double lo = std::min(a, b), hi = std::max(a, b);
            const double margin = 0.01 * (hi - lo);
            if (x_new > lo + margin && x_new < hi - margin) used_secant = true;
        }
        if (!used_secant) x_new = 0.5 * (a + b);

        const double f_new = f(x_new);
        x_prev = x_cur;
        f_prev = f_cur;
        x_cur = x_new;
        f_cur = f_new;

        if (std::isnan(f_new))
            throw std::runtime_error("find_root_bracketed: NaN inside bracket");
        if ((f_new > 0.0) == (fa > 0.0)) {
            a = x_new;
            fa = f_new;
        } else {
            b = x_new;
            fb = f_new;
        }
        res.x = x_new;
        res.f_at_x = f_new;
        if (std::fabs(f_new) <= f_tol ||
            std::fabs(b - a) <= x_tol_rel * std::fabs(x_new) + x_tol_abs) {
            res.converged = true;
            return res;
        }
    }
    return res;  // converged stays false: caller decides
}

}  // namespace ppv

#endif  // PPV_ROOTFIND_HPP
