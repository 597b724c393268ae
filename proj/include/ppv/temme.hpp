#ifndef PPV_TEMME_HPP
#define PPV_TEMME_HPP

#include <cstdint>

#include "ppv/logprob.hpp"

namespace ppv {

/// Physical context of every query: SNR and its derived capacity threshold.
struct ChannelParams {
    double omega = 1.0;          // linear SNR, > 0
    double capacity_bits = 0.0;  // (1/2) log2(1 + omega)
    double gamma_bar = 0.0;      // (1/2) ln(1 + omega); threshold limit

    static ChannelParams from_omega(double omega);
    static ChannelParams from_snr_db(double snr_db);
};

/// Threshold gamma and its hyperbolic derivatives; the shared
/// parameterization of the missed-detection / false-alarm pair.
struct ThresholdGeometry {
    double gamma = 0.0;
    double s_gamma = 0.0;       // sinh(gamma)
    double c_gamma = 1.0;       // cosh(gamma)
    double t_gamma = 0.0;       // tanh(gamma)
    double lambda_prime = 0.0;  // omega / (4 sinh^2 gamma)
    double lambda = 0.0;        // 2*lambda = 1 + ln(1+omega) - lambda'*omega/(1+omega)
};

ThresholdGeometry make_threshold(double gamma, const ChannelParams& params);
ThresholdGeometry threshold_from_lambda_prime(double lambda_prime,
                                              const ChannelParams& params);

enum class Kind { md, fa };

/// Per-kind exponent layer: theta, the step sign, and the decay rate v.
struct KindGeometry {
    Kind kind = Kind::md;
    double theta = 0.0;
    int step_sign = 0;      // sign(gamma - theta)
    double v = 0.0;         // -alpha(theta)/sinh(gamma), >= 0
    double theta_minus_gamma = 0.0;
    double exp_theta_minus_gamma = 1.0;  // e^(theta-gamma)
};

/// Concave exponent map alpha(x) = cosh(g) - cosh(x) + sinh(g)(x - g);
/// zero and maximal at x = gamma.
double alpha(double x, const ThresholdGeometry& geom);

KindGeometry kind_geometry(const ThresholdGeometry& geom,
                           const ChannelParams& params, Kind kind);

/// Open gamma interval on which both tail probabilities are below 1/2.
struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

Window validity_window(const ChannelParams& params);
bool in_window(double gamma, const ChannelParams& params);

/// One point of the steepest-descent path, phi in [0, pi).
struct PathPoint {
    double phi = 0.0;
    double r = 0.0;        // asinh(sinh(gamma)/sinc(phi))
    double r_prime = 0.0;  // tanh(r) (1/phi - cot(phi))
    double delta = 0.0;    // r - gamma, computed cancellation-free
    double h = 0.0;        // (1-cos phi) cosh r + alpha(r)
    double h_prime = 0.0;  // sin(phi) cosh(r) (1 + r'^2)
    double u = 0.0;        // sqrt(2 h)
    double g_tilde = 0.0;  // integrand factor
    double c_of_phi = 0.0; // g_tilde * u / h', with the phi->0 limit built in
};

PathPoint path_point(double phi, const ThresholdGeometry& geom,
                     const KindGeometry& kindgeom);

struct GIntegralResult {
    double value = 0.0;    // g(gamma); positive for MD, negative for FA in-window
    double abs_error = 0.0;
    int evaluations = 0;
};

/// (1/pi) Int_0^pi g~(phi) exp(-n u^2(phi)/(4 sinh g)) dphi by adaptive
/// composite Gauss-Legendre; the neglected tail past the truncation point
/// is below 1e-30 of the peak.
GIntegralResult g_integral(const ThresholdGeometry& geom,
                           const KindGeometry& kindgeom, double n);

/// Evaluation-method request for log_prob.
struct Method {
    enum class Kind { automatic, oracle, integral, series, closed_form } kind =
        Kind::automatic;
    // series: requested term count (0 = smallest-term auto truncation);
    // closed_form: order 1 or 2.
    int terms = 0;

    static Method auto_select() { return {Kind::automatic, 0}; }
    static Method oracle() { return {Kind::oracle, 0}; }
    static Method integral() { return {Kind::integral, 0}; }
    static Method series(int k = 0) { return {Kind::series, k}; }
    static Method closed_form(int order) { return {Kind::closed_form, order}; }
};

/// Natural log of the missed-detection or false-alarm probability at the
/// given threshold. The step term is handled explicitly outside the
/// validity window; series methods refuse to run there.
LogProb log_prob(const ThresholdGeometry& geom, const ChannelParams& params,
                 Kind kind, std::int64_t n, Method method);

/// Block length limit for the Poisson-mixture oracle path.
inline constexpr std::int64_t kOracleMaxN = 512;

}  // namespace ppv

#endif  // PPV_TEMME_HPP
