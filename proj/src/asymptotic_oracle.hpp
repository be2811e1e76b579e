#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "special_dist.hpp"

namespace emtest {

// Sums of the first Hermite-polynomial transforms of a standardized
// sample: z = (x^2-1)/2, u = (x^3-3x)/6, v = (x^4-6x^2+3)/24.
struct HermiteStats {
    std::size_t n = 0;
    double sum_x = 0.0, sum_x_sq = 0.0;
    double sum_z = 0.0, sum_z_sq = 0.0;
    double sum_u = 0.0, sum_u_sq = 0.0;
    double sum_v = 0.0, sum_v_sq = 0.0;
};

HermiteStats hermite_stats(std::span<const double> standardized);

// Score-ratio statistics entering the large-sample expansion; t4 carries
// the positive-part constraint of the fourth-order term.
struct THat {
    double t1;
    double t2;
    double t4;
};

THat t_hat(const HermiteStats& stats);

// Large-sample approximation of the EM statistic:
//   (sum x)^2 / sum x^2 + (max(sum v, 0))^2 / sum v^2 + shift
// computed on data standardized by sigma0.
double asymptotic_em_statistic(std::span<const double> data, double sigma0,
                               double shift);

// Draws from the limiting null law: an equal mixture of chi-square(1)
// and chi-square(2).
std::vector<double> mc_limiting_sample(std::size_t draws, RngState& state);

} // namespace emtest
