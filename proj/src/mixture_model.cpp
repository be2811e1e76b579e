#include "mixture_model.hpp"

#include <cmath>
#include <stdexcept>

#include "errors.hpp"
#include "special_dist.hpp"

namespace emtest {

namespace detail {

void validate_params(const MixtureParams& params) {
    if (!(params.alpha >= 0.0) || !(params.alpha <= 1.0)) {
        throw std::invalid_argument("mixture: alpha must lie in [0,1]");
    }
    if (!(params.sigma1 > 0.0) || !(params.sigma2 > 0.0)) {
        throw std::invalid_argument("mixture: sigmas must be positive");
    }
    if (!std::isfinite(params.mu)) {
        throw std::invalid_argument("mixture: mu must be finite");
    }
}

void validate_penalty(const PenaltyConfig& pen) {
    if (!(pen.a_n > 0.0) || !std::isfinite(pen.a_n)) {
        throw std::invalid_argument("penalty: a_n must be positive and finite");
    }
    if (!(pen.sigma0_sq > 0.0) || !std::isfinite(pen.sigma0_sq)) {
        throw std::invalid_argument("penalty: sigma0_sq must be positive and finite");
    }
}

} // namespace detail

double log_likelihood(const MixtureParams& params, std::span<const double> data) {
    detail::validate_params(params);
    const double la0 = std::log1p(-params.alpha) - std::log(params.sigma1);
    const double lb0 = std::log(params.alpha) - std::log(params.sigma2);
    const double inv2v1 = 0.5 / (params.sigma1 * params.sigma1);
    const double inv2v2 = 0.5 / (params.sigma2 * params.sigma2);
    constexpr double half_log_2pi = 0.918938533204672741780329736406;
    double total = 0.0;
    for (double x : data) {
        double la = la0 - x * x * inv2v1;
        double dm = x - params.mu;
        double lb = lb0 - dm * dm * inv2v2;
        double m, delta;
        if (la >= lb) {
            m = la;
            delta = lb - la;
        } else {
            m = lb;
            delta = la - lb;
        }
        // delta <= 0; exp underflow to 0 is harmless (one component dominates).
        total += m + std::log1p(std::exp(delta));
    }
    return total - data.size() * half_log_2pi;
}

double penalty_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw std::domain_error("penalty_alpha: alpha must lie in (0,1]");
    }
    return alpha == 1.0 ? 0.0 : std::log(alpha);
}

double penalty_sigma(double sigma_sq, const PenaltyConfig& pen) {
    detail::validate_penalty(pen);
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
        throw std::domain_error("penalty_sigma: sigma_sq must be positive and finite");
    }
    double ratio = pen.sigma0_sq / sigma_sq;
    return -pen.a_n * (ratio - std::log(ratio));
}

double modified_log_likelihood(const MixtureParams& params,
                               std::span<const double> data,
                               const PenaltyConfig& pen) {
    double pl = log_likelihood(params, data);
    pl += penalty_alpha(params.alpha);
    pl += penalty_sigma(params.sigma1 * params.sigma1, pen);
    pl += penalty_sigma(params.sigma2 * params.sigma2, pen);
    return pl;
}

NullFit null_fit(std::span<const double> data, double a_n) {
    if (data.empty()) {
        throw degenerate_data_error("null_fit: empty sample");
    }
    if (!(a_n > 0.0)) {
        throw std::invalid_argument("null_fit: a_n must be positive");
    }
    double ssq = 0.0;
    for (double x : data) {
        if (!std::isfinite(x)) {
            throw degenerate_data_error("null_fit: data must be finite");
        }
        ssq += x * x;
    }
    double sigma0_sq = ssq / static_cast<double>(data.size());
    if (!(sigma0_sq > 0.0)) {
        throw degenerate_data_error("null_fit: sample is identically zero");
    }
    // Penalized value at (alpha=1, mu=0, sigma0, sigma0): the alpha penalty
    // vanishes and each variance penalty sits at its maximum -a_n.
    double sigma0 = std::sqrt(sigma0_sq);
    double ll = 0.0;
    for (double x : data) {
        ll += normal_logpdf(x, 0.0, sigma0);
    }
    return NullFit{sigma0_sq, ll - 2.0 * a_n};
}

double a_n_default(std::size_t n) {
    if (n < 1) {
        throw std::domain_error("a_n_default: n must be >= 1");
    }
    return std::exp(1.747 - 843.681 / static_cast<double>(n)) + 1.4;
}

} // namespace emtest
