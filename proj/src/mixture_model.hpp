#pragma once

#include <cstddef>
#include <span>

namespace emtest {

// Two-component contaminated normal: (1-alpha) N(0, sigma1^2) + alpha N(mu, sigma2^2).
// Sigmas are standard deviations at this interface; internal EM code works
// in variances and converts on the way out.
struct MixtureParams {
    double alpha;
    double mu;
    double sigma1;
    double sigma2;
};

// State needed to evaluate the size penalties: the level a_n and the
// anchor sigma0_sq = (1/n) * sum x_i^2 of the data being analyzed.
struct PenaltyConfig {
    double a_n;
    double sigma0_sq;
};

// Observed-data log-likelihood of the mixture.
double log_likelihood(const MixtureParams& params, std::span<const double> data);

// Mixing-weight penalty log(alpha) on (0,1]; zero at alpha = 1.
double penalty_alpha(double alpha);

// Variance penalty -a_n * (sigma0_sq/sigma_sq + log(sigma_sq/sigma0_sq)),
// maximized (value -a_n) at sigma_sq = sigma0_sq.
double penalty_sigma(double sigma_sq, const PenaltyConfig& pen);

// log_likelihood + penalty_alpha + both variance penalties.
double modified_log_likelihood(const MixtureParams& params,
                               std::span<const double> data,
                               const PenaltyConfig& pen);

struct NullFit {
    double sigma0_sq; // maximizer of the single-component likelihood
    double pl_null;   // penalized log-likelihood at the null representative
};

// Fit of the homogeneous model: sigma0_sq = mean square, and the penalized
// log-likelihood at (alpha=1, mu=0, sigma1=sigma2=sigma0), which costs
// exactly 2*a_n of penalty.
NullFit null_fit(std::span<const double> data, double a_n);

// Recommended penalty level exp(1.747 - 843.681/n) + 1.4.
double a_n_default(std::size_t n);

namespace detail {
// Shared validation helpers.
void validate_params(const MixtureParams& params);
void validate_penalty(const PenaltyConfig& pen);
} // namespace detail

} // namespace emtest
