#include "asymptotic_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "errors.hpp"

namespace emtest {

HermiteStats hermite_stats(std::span<const double> standardized) {
    HermiteStats s;
    s.n = standardized.size();
    for (double x : standardized) {
        if (!std::isfinite(x)) {
            throw degenerate_data_error("hermite_stats: data must be finite");
        }
        double x2 = x * x;
        double z = 0.5 * (x2 - 1.0);
        double u = (x2 * x - 3.0 * x) / 6.0;
        double v = (x2 * x2 - 6.0 * x2 + 3.0) / 24.0;
        s.sum_x += x;
        s.sum_x_sq += x2;
        s.sum_z += z;
        s.sum_z_sq += z * z;
        s.sum_u += u;
        s.sum_u_sq += u * u;
        s.sum_v += v;
        s.sum_v_sq += v * v;
    }
    return s;
}

THat t_hat(const HermiteStats& stats) {
    if (stats.n == 0) {
        throw degenerate_data_error("t_hat: empty sample");
    }
    if (!(stats.sum_x_sq > 0.0) || !(stats.sum_z_sq > 0.0) ||
        !(stats.sum_v_sq > 0.0)) {
        throw degenerate_data_error(
            "t_hat: second-moment sums must be positive");
    }
    THat t;
    t.t1 = stats.sum_x / stats.sum_x_sq;
    t.t2 = stats.sum_z / stats.sum_z_sq;
    t.t4 = std::max(stats.sum_v, 0.0) / stats.sum_v_sq;
    return t;
}

double asymptotic_em_statistic(std::span<const double> data, double sigma0,
                               double shift) {
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
        throw std::domain_error(
            "asymptotic_em_statistic: sigma0 must be positive and finite");
    }
    if (data.empty()) {
        throw degenerate_data_error("asymptotic_em_statistic: empty sample");
    }
    HermiteStats s;
    {
        std::vector<double> y(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) y[i] = data[i] / sigma0;
        s = hermite_stats(y);
    }
    if (!(s.sum_x_sq > 0.0) || !(s.sum_v_sq > 0.0)) {
        throw degenerate_data_error(
            "asymptotic_em_statistic: degenerate moment sums");
    }
    double first = s.sum_x * s.sum_x / s.sum_x_sq;
    double vplus = std::max(s.sum_v, 0.0);
    double fourth = vplus * vplus / s.sum_v_sq;
    return first + fourth + shift;
}

std::vector<double> mc_limiting_sample(std::size_t draws, RngState& state) {
    std::vector<double> out;
    out.reserve(draws);
    for (std::size_t i = 0; i < draws; ++i) {
        double n1 = state.next_normal();
        double value = n1 * n1;
        if (state.next_uniform() < 0.5) {
            double n2 = state.next_normal();
            value += n2 * n2;
        }
        out.push_back(value);
    }
    return out;
}

} // namespace emtest
