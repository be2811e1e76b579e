#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "em_engine.hpp"
#include "special_dist.hpp"

namespace emtest {

// What to draw each replication from: a pure normal null or the
// two-component contaminated model.
struct GeneratorSpec {
    bool mixture = false;
    double null_sigma = 1.0; // null case: N(0, null_sigma^2)
    double alpha = 0.0;      // mixture case parameters
    double mu = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;

    void validate() const;
};

// One sample of size n. The null path draws through the same per-point
// sequence as a mixture with alpha = 0, so the two agree bit for bit.
std::vector<double> generate_sample(const GeneratorSpec& spec, std::size_t n,
                                    RngState& state);
std::vector<double> generate_sample(const GeneratorSpec& spec, std::size_t n,
                                    uint64_t seed, uint64_t stream);

struct SimulationResult {
    uint64_t rejections = 0;
    uint64_t reps = 0;
    double rate = 0.0;
    double mc_stderr = 0.0;
    uint64_t seed = 0;
    double elapsed_seconds = 0.0;
};

// Monte Carlo rejection rate of the EM-test at the given nominal level.
// Replication r draws from substream stream_base + r, so results are
// deterministic in (spec, n, reps, level, cfg, seed) and independent of
// the worker count (EMTEST_THREADS caps it).
SimulationResult simulate_rejection_rate(const GeneratorSpec& spec,
                                         std::size_t n, uint64_t reps,
                                         double level,
                                         const EmTestConfig& cfg,
                                         uint64_t seed,
                                         uint64_t stream_base = 0);

// logit(q_hat) - logit(q): the log-odds discrepancy between a simulated
// rejection rate and the nominal level.
double discrepancy_y(double q_hat, double q);

struct CalibrationCell {
    double a_n;
    uint32_t n;
    double rate;
    double y;
};

struct RegressionFit {
    std::array<double, 3> beta{}; // y ~ b0 + b1/n + b2*log(a_n - 1.4)
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    double formula_c0 = 0.0; // solving y=0: a_n = exp(c0 + c1/n) + 1.4
    double formula_c1 = 0.0;
};

// Least-squares fit of the discrepancies on [1, 1/n, log(a_n - 1.4)]
// via Householder QR. Needs a full-rank design and a_n > 1.4 throughout.
RegressionFit fit_discrepancy_regression(std::span<const CalibrationCell> cells);

struct CalibrationResult {
    std::vector<CalibrationCell> cells;
    RegressionFit fit;
};

// Null simulation at every (a_n, n) grid cell followed by the
// calibration regression.
CalibrationResult calibration_experiment(std::span<const double> a_grid,
                                         std::span<const uint32_t> n_grid,
                                         uint64_t reps, double level,
                                         uint64_t seed);

// The bundled 13x3 reference study (a_n from 1.6 to 4.0 by 0.2; n in
// {500, 1000, 1500}; level 0.05) and its regression.
std::span<const CalibrationCell> reference_discrepancy_cells();
CalibrationResult reference_calibration();

// Number of simulation worker threads: EMTEST_THREADS when set (floored
// at 1), otherwise the hardware concurrency.
unsigned simulation_workers();

} // namespace emtest
