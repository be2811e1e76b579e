#include "sim_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "errors.hpp"

namespace emtest {

void GeneratorSpec::validate() const {
    if (mixture) {
        if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
            throw std::invalid_argument("generator: alpha must lie in [0,1]");
        }
        if (!(sigma1 >= 0.0) || !(sigma2 >= 0.0)) {
            throw std::invalid_argument("generator: sigmas must be >= 0");
        }
        if (!std::isfinite(mu)) {
            throw std::invalid_argument("generator: mu must be finite");
        }
    } else {
        if (!(null_sigma >= 0.0)) {
            throw std::invalid_argument("generator: null sigma must be >= 0");
        }
    }
}

std::vector<double> generate_sample(const GeneratorSpec& spec, std::size_t n,
                                    RngState& state) {
    spec.validate();
    double alpha = spec.mixture ? spec.alpha : 0.0;
    double mu1 = 0.0, s1 = spec.mixture ? spec.sigma1 : spec.null_sigma;
    double mu2 = spec.mixture ? spec.mu : 0.0;
    double s2 = spec.mixture ? spec.sigma2 : spec.null_sigma;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool contaminant = state.next_uniform() < alpha;
        double z = state.next_normal();
        out[i] = contaminant ? mu2 + s2 * z : mu1 + s1 * z;
    }
    return out;
}

std::vector<double> generate_sample(const GeneratorSpec& spec, std::size_t n,
                                    uint64_t seed, uint64_t stream) {
    RngState state(seed, stream);
    return generate_sample(spec, n, state);
}

unsigned simulation_workers() {
    if (const char* env = std::getenv("EMTEST_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<unsigned>(v);
        return 1;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

SimulationResult simulate_rejection_rate(const GeneratorSpec& spec,
                                         std::size_t n, uint64_t reps,
                                         double level,
                                         const EmTestConfig& cfg,
                                         uint64_t seed,
                                         uint64_t stream_base) {
    spec.validate();
    cfg.validate();
    if (reps < 1) {
        throw std::invalid_argument("simulate: reps must be >= 1");
    }
    if (!(level > 0.0) || !(level < 1.0)) {
        throw std::invalid_argument("simulate: level must lie in (0,1)");
    }
    auto t0 = std::chrono::steady_clock::now();

    unsigned workers = simulation_workers();
    if (static_cast<uint64_t>(workers) > reps) {
        workers = static_cast<unsigned>(reps);
    }
    std::vector<uint64_t> hits(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    auto body = [&](unsigned w) {
        uint64_t local = 0;
        for (uint64_t r = w; r < reps; r += workers) {
            RngState rng(seed, stream_base + r);
            std::vector<double> sample = generate_sample(spec, n, rng);
            EmTestResult res = em_test(sample, cfg);
            if (res.p_value < level) ++local;
        }
        hits[w] = local;
    };
    if (workers == 1) {
        body(0);
    } else {
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(body, w);
        }
        for (auto& th : pool) th.join();
    }

    SimulationResult out;
    out.reps = reps;
    out.seed = seed;
    for (uint64_t h : hits) out.rejections += h;
    out.rate = static_cast<double>(out.rejections) / static_cast<double>(reps);
    out.mc_stderr =
        std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(reps));
    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return out;
}

double discrepancy_y(double q_hat, double q) {
    if (!(q_hat > 0.0) || !(q_hat < 1.0) || !(q > 0.0) || !(q < 1.0)) {
        throw std::domain_error(
            "discrepancy_y: rates must lie strictly in (0,1)");
    }
    auto logit = [](double p) { return std::log(p / (1.0 - p)); };
    return logit(q_hat) - logit(q);
}

namespace {

// Least squares by Householder QR; writes beta and returns the fitted
// values. A is row-major m x p.
std::vector<double> qr_solve(std::vector<double> a, std::vector<double> b,
                             std::size_t m, std::size_t p,
                             std::array<double, 3>& beta) {
    std::vector<double> original_a = a;
    std::vector<double> original_b = b;
    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += a[i * p + k] * a[i * p + k];
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            throw degenerate_data_error(
                "regression: design matrix is rank deficient");
        }
        double akk = a[k * p + k];
        double alpha = akk >= 0.0 ? -norm : norm;
        // Householder vector v = x - alpha*e_k, applied as I - 2vv'/v'v.
        std::vector<double> v(m - k);
        v[0] = akk - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = a[i * p + k];
        double vtv = 0.0;
        for (double vi : v) vtv += vi * vi;
        if (vtv == 0.0) continue;
        for (std::size_t j = k; j < p; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * a[i * p + j];
            double f = 2.0 * dot / vtv;
            for (std::size_t i = k; i < m; ++i) a[i * p + j] -= f * v[i - k];
        }
        double dotb = 0.0;
        for (std::size_t i = k; i < m; ++i) dotb += v[i - k] * b[i];
        double fb = 2.0 * dotb / vtv;
        for (std::size_t i = k; i < m; ++i) b[i] -= fb * v[i - k];
    }
    for (std::size_t k = p; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < p; ++j) s -= a[k * p + j] * beta[j];
        double diag = a[k * p + k];
        if (std::fabs(diag) < 1e-12) {
            throw degenerate_data_error(
                "regression: design matrix is rank deficient");
        }
        beta[k] = s / diag;
    }
    std::vector<double> fitted(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double f = 0.0;
        for (std::size_t j = 0; j < p; ++j) f += original_a[i * p + j] * beta[j];
        fitted[i] = f;
    }
    return fitted;
}

} // namespace

RegressionFit fit_discrepancy_regression(std::span<const CalibrationCell> cells) {
    const std::size_t m = cells.size();
    const std::size_t p = 3;
    if (m < 4) {
        throw degenerate_data_error(
            "regression: need at least 4 cells to fit 3 coefficients");
    }
    std::vector<double> a;
    a.reserve(m * p);
    std::vector<double> y;
    y.reserve(m);
    for (const CalibrationCell& c : cells) {
        if (!(c.a_n > 1.4)) {
            throw std::domain_error(
                "regression: a_n must exceed 1.4 for the log term");
        }
        if (c.n < 1) {
            throw std::domain_error("regression: n must be positive");
        }
        a.push_back(1.0);
        a.push_back(1.0 / static_cast<double>(c.n));
        a.push_back(std::log(c.a_n - 1.4));
        y.push_back(c.y);
    }

    RegressionFit fit;
    std::vector<double> fitted = qr_solve(a, y, m, p, fit.beta);
    double mean = 0.0;
    for (double yi : y) mean += yi;
    mean /= static_cast<double>(m);
    double ssr = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        ssr += (y[i] - fitted[i]) * (y[i] - fitted[i]);
        sst += (y[i] - mean) * (y[i] - mean);
    }
    if (!(sst > 0.0)) {
        throw degenerate_data_error("regression: response has zero variance");
    }
    fit.r2 = 1.0 - ssr / sst;
    fit.adjusted_r2 =
        1.0 - (1.0 - fit.r2) * (static_cast<double>(m) - 1.0) /
                  (static_cast<double>(m) - static_cast<double>(p));
    if (fit.beta[2] == 0.0) {
        throw degenerate_data_error(
            "regression: log(a_n - 1.4) coefficient vanished");
    }
    fit.formula_c0 = -fit.beta[0] / fit.beta[2];
    fit.formula_c1 = -fit.beta[1] / fit.beta[2];
    return fit;
}

CalibrationResult calibration_experiment(std::span<const double> a_grid,
                                         std::span<const uint32_t> n_grid,
                                         uint64_t reps, double level,
                                         uint64_t seed) {
    if (a_grid.empty() || n_grid.empty()) {
        throw std::invalid_argument("calibration: empty grid");
    }
    CalibrationResult result;
    result.cells.reserve(a_grid.size() * n_grid.size());
    uint64_t cell_index = 0;
    for (uint32_t n : n_grid) {
        for (double a_n : a_grid) {
            EmTestConfig cfg;
            cfg.a_n_override = a_n;
            GeneratorSpec null_spec;
            SimulationResult sim = simulate_rejection_rate(
                null_spec, n, reps, level, cfg, seed,
                /*stream_base=*/cell_index << 32);
            result.cells.push_back(CalibrationCell{
                a_n, n, sim.rate, discrepancy_y(sim.rate, level)});
            ++cell_index;
        }
    }
    result.fit = fit_discrepancy_regression(result.cells);
    return result;
}

namespace {

// Reference discrepancy study: log-odds gaps of the simulated null
// rejection rate from the 5% level over a_n in 1.6..4.0 by 0.2 (rows)
// and n in {500, 1000, 1500} (columns).
constexpr double kReferenceY[13][3] = {
    {0.175, 0.175, 0.295},   {0.061, 0.101, 0.210},
    {0.101, 0.081, 0.157},   {0.081, 0.120, 0.101},
    {0.081, 0.041, 0.138},   {0.000, 0.101, 0.101},
    {-0.021, 0.041, 0.061},  {-0.043, 0.081, -0.021},
    {-0.111, 0.041, -0.021}, {-0.043, 0.000, 0.138},
    {-0.111, -0.043, 0.081}, {0.000, 0.041, 0.061},
    {-0.208, -0.043, 0.081},
};
constexpr uint32_t kReferenceN[3] = {500, 1000, 1500};
constexpr double kReferenceLevel = 0.05;

std::vector<CalibrationCell> build_reference_cells() {
    std::vector<CalibrationCell> cells;
    cells.reserve(39);
    double logit_level = std::log(kReferenceLevel / (1.0 - kReferenceLevel));
    for (int col = 0; col < 3; ++col) {
        for (int row = 0; row < 13; ++row) {
            double a_n = 1.6 + 0.2 * row;
            double y = kReferenceY[row][col];
            // Rate implied by the recorded log-odds discrepancy.
            double rate = 1.0 / (1.0 + std::exp(-(y + logit_level)));
            cells.push_back(CalibrationCell{a_n, kReferenceN[col], rate, y});
        }
    }
    return cells;
}

} // namespace

std::span<const CalibrationCell> reference_discrepancy_cells() {
    static const std::vector<CalibrationCell> cells = build_reference_cells();
    return cells;
}

CalibrationResult reference_calibration() {
    CalibrationResult result;
    auto cells = reference_discrepancy_cells();
    result.cells.assign(cells.begin(), cells.end());
    result.fit = fit_discrepancy_regression(result.cells);
    return result;
}

} // namespace emtest
