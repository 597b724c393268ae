#ifndef PPV_SERIES_HPP
#define PPV_SERIES_HPP

#include <cstdint>
#include <vector>

#include "ppv/logprob.hpp"
#include "ppv/temme.hpp"

namespace ppv {

/// Taylor tables of the asymptotic-expansion pipeline
///   alpha_n -> nu_n -> beta_n -> t_n -> xi_n -> c_n.
///
/// Pure-imaginary and mixed-parity coefficients are stored as real
/// payloads:
///   beta_n    = i * beta[n]
///   t_n       = i^(n mod 2) * t_coeffs[n]      (even real, odd imaginary)
///   xi_n      = i^(n mod 2) * xi[n]
///   P_{j,n}   = i^j         * p_table[j][n]
///   S_{j,n}   = i^(n mod 2) * s_table[j][n]
/// c_even[k] holds the real coefficient c_{2k}.
struct CoefficientTables {
    int k_max = 0;  // even coefficients available: c_0 .. c_{2(k_max-1)}
    double gamma = 0.0;
    double theta = 0.0;
    double s_gamma = 0.0;
    double c_gamma = 1.0;
    double exp_theta_minus_gamma = 1.0;

    std::vector<double> alpha_taylor;           // n = 0 .. 2 k_max
    std::vector<std::vector<double>> q_table;   // [j][n], j = 2 .. 2 k_max
    std::vector<double> nu;                     // n = 0 .. 2 k_max
    std::vector<double> beta;                   // n = 0 .. 2 k_max - 1
    std::vector<double> t_coeffs;               // n = 0 .. 2 k_max - 1
    std::vector<std::vector<double>> p_table;   // [j][n], j = 1 .. 2 k_max - 1
    std::vector<std::vector<double>> s_table;   // [j][n], j = 1 .. 2 k_max - 2
    std::vector<double> xi;                     // n = 0 .. 2 k_max - 2
    std::vector<double> c_even;                 // k = 0 .. k_max - 1
};

/// Coefficients of (sum_{m>=1} inner[m] u^m)^j for orders j .. n_max,
/// by the single power-raising recursion shared by the pipeline's three
/// triangular tables. inner is indexed by power; inner[1] must be nonzero.
std::vector<double> compose_series_power(const std::vector<double>& inner,
                                         int j, int n_max);

/// Runs the full coefficient pipeline for a threshold/theta pair.
/// Throws std::domain_error when theta is too close to gamma (the leading
/// coefficient's denominator e^(theta-gamma) - 1 degenerates); callers
/// should route to the integral evaluator in that case.
CoefficientTables build_coefficients(const ThresholdGeometry& geom,
                                     double theta, int K);

inline constexpr int kSeriesAutoCap = 21;  // active terms in auto mode
inline constexpr int kSeriesHardCap = 32;

struct SeriesResult {
    double g_value = 0.0;
    std::vector<double> terms;  // tau_k for every computed order
    int truncation_index = 0;   // terms summed: k < truncation_index
    double smallest_term_magnitude = 0.0;  // |first neglected term|
};

/// Partial sums of the asymptotic expansion of g. K = 0 selects
/// smallest-term auto truncation (capped at kSeriesAutoCap terms).
SeriesResult g_series(const CoefficientTables& tables,
                      const ThresholdGeometry& geom, double n, int K = 0);

/// One- and two-term closed forms of the log tail probability.
/// Requires gamma strictly inside the validity window; order 2 fails when
/// g1/n >= 1 (the correction's log argument becomes nonpositive).
LogProb closed_form_logprob(const ThresholdGeometry& geom,
                            const ChannelParams& params, Kind kind,
                            std::int64_t n, int order);

/// Closed forms of the leading coefficients (shared with the bounds layer).
double g0_closed_form(const ThresholdGeometry& geom,
                      const KindGeometry& kindgeom);
double g1_closed_form(const ThresholdGeometry& geom,
                      const KindGeometry& kindgeom);

namespace detail {

LogProb log_prob_oracle(const ThresholdGeometry& geom,
                        const ChannelParams& params, Kind kind,
                        std::int64_t n);
LogProb log_prob_integral(const ThresholdGeometry& geom,
                          const ChannelParams& params, Kind kind,
                          std::int64_t n);
/// Series-path log probability; K = 0 auto-truncates. Throws
/// std::domain_error outside the window or at the pole.
LogProb log_prob_series(const ThresholdGeometry& geom,
                        const ChannelParams& params, Kind kind, std::int64_t n,
                        int K, SeriesResult* diagnostics = nullptr);

}  // namespace detail

}  // namespace ppv

#endif  // PPV_SERIES_HPP
