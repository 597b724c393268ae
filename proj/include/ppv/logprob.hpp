#ifndef PPV_LOGPROB_HPP
#define PPV_LOGPROB_HPP

#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace ppv {

/// How a probability value was produced.
enum class EvalMethod { oracle, integral, series, closed_form };

struct MethodTag {
    EvalMethod kind = EvalMethod::oracle;
    int terms = 0;  // active series terms for series/closed_form, 0 otherwise

    std::string name() const;
};

/// A probability carried as a natural logarithm.
///
/// Deep-tail values (down to exp(-5e6) and beyond) never materialize in
/// linear domain; `value()` is provided for the shallow regime only.
struct LogProb {
    double log_value = 0.0;  // ln p, always <= 0
    MethodTag method;
    // Certified bracket (log_lower, log_upper) when a sandwich
    // certificate holds; log_lower <= log_value <= log_upper.
    std::optional<std::pair<double, double>> bracket;

    double value() const { return std::exp(log_value); }
    double log10_value() const { return log_value / std::log(10.0); }
};

inline LogProb make_log_prob(double log_value, MethodTag tag) {
    // Clamp tiny positive excursions (p = 1 + O(eps)) from rounding.
    if (log_value > 0.0 && log_value < 1e-12) log_value = 0.0;
    return LogProb{log_value, tag, std::nullopt};
}

}  // namespace ppv

#endif  // PPV_LOGPROB_HPP
