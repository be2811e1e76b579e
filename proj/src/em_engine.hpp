#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mixture_model.hpp"

namespace emtest {

struct EmTestConfig {
    // Initial mixing proportions tested in parallel; each must lie
    // strictly inside (0,1).
    std::vector<double> alpha_grid{0.05, 0.15, 0.25};
    // Total EM iterations K reported per grid entry (the profile fit is
    // iteration 1; K-1 unrestricted EM iterations follow).
    unsigned iterations = 3;
    // Profile-fit (step 1) convergence: stop when the penalized
    // log-likelihood gain drops below step1_tol * (1 + |pl|).
    double step1_tol = 1e-8;
    unsigned step1_max_iter = 2000;
    // Quantile levels of the sample used as mu starting points, always
    // augmented with mu = 0.
    std::vector<double> mu_start_quantiles{0.10, 0.25, 0.50, 0.75, 0.90};
    // Penalty level; defaults to a_n_default(n).
    std::optional<double> a_n_override;

    void validate() const;
};

// Posterior contaminant-membership weights under `params` (alpha strictly
// inside (0,1)).
std::vector<double> e_step(const MixtureParams& params,
                           std::span<const double> data);

// Closed-form penalized M-step. The sigma2 update uses residuals around
// `mu_current` (the previous iterate's mu), matching the objective the
// E-step weights were computed under.
MixtureParams m_step(std::span<const double> weights,
                     std::span<const double> data, double mu_current,
                     const PenaltyConfig& pen);

// Step 1: with alpha frozen, approximately maximize the penalized
// log-likelihood over (mu, sigma1, sigma2) by coordinate EM from the
// configured multistart set; returns the best endpoint.
MixtureParams step1_profile_fit(double alpha, std::span<const double> data,
                                const PenaltyConfig& pen,
                                const EmTestConfig& cfg = {});

struct EmIterate {
    double alpha;
    double mu;
    double sigma1;
    double sigma2;
    double pl;        // penalized log-likelihood at this iterate
    double statistic; // 2 * (pl - null pl)
};

struct EmTrace {
    double alpha_init;
    bool tied_for_max = false;
    std::vector<EmIterate> steps; // exactly `iterations` entries
};

struct EmTestResult {
    std::size_t n = 0;
    double statistic = 0.0;
    double shift = 0.0; // 2 * max_j log(alpha_j)
    double p_value = 1.0;
    double a_n = 0.0;
    double sigma0_sq = 0.0;
    MixtureParams best_params{1.0, 0.0, 1.0, 1.0};
    std::size_t best_trace = 0;
    std::vector<EmTrace> traces;
};

// The EM-test for homogeneity. Requires n >= 10 finite observations, not
// identically zero.
EmTestResult em_test(std::span<const double> data, const EmTestConfig& cfg = {});

// Fitted mixture from the winning trace at iteration K.
MixtureParams fit_report(std::span<const double> data,
                         const EmTestConfig& cfg = {});

// Null p-value of the statistic against its limit: after subtracting
// `shift`, an equal mixture of chi-square(1) and chi-square(2).
double limiting_pvalue(double statistic, double shift);

} // namespace emtest
