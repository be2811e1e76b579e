#include "emtest.h"

#include <cstring>
#include <new>
#include <stdexcept>
#include <vector>

#include "em_engine.hpp"
#include "errors.hpp"
#include "mixture_model.hpp"
#include "sim_harness.hpp"
#include "special_dist.hpp"

struct emtest_config {
    emtest::EmTestConfig cfg;
};

struct emtest_result {
    emtest::EmTestResult res;
};

struct emtest_calibration {
    emtest::CalibrationResult cal;
};

namespace {

template <typename Fn>
emtest_status guarded(Fn&& fn) {
    try {
        fn();
        return EMTEST_OK;
    } catch (const std::invalid_argument&) {
        return EMTEST_ERROR_INVALID_ARGUMENT;
    } catch (const std::domain_error&) {
        return EMTEST_ERROR_DOMAIN;
    } catch (const emtest::parse_error&) {
        return EMTEST_ERROR_PARSE;
    } catch (const emtest::degenerate_data_error&) {
        return EMTEST_ERROR_DEGENERATE_DATA;
    } catch (const std::bad_alloc&) {
        return EMTEST_ERROR_NOMEM;
    }
}

emtest::GeneratorSpec to_generator(const emtest_sim_spec& spec) {
    emtest::GeneratorSpec g;
    g.mixture = spec.mixture != 0;
    g.null_sigma = spec.null_sigma;
    g.alpha = spec.alpha;
    g.mu = spec.mu;
    g.sigma1 = spec.sigma1;
    g.sigma2 = spec.sigma2;
    return g;
}

} // namespace

extern "C" {

const char* emtest_version(void) { return EMTEST_VERSION_STRING; }

const char* emtest_status_message(emtest_status status) {
    switch (status) {
        case EMTEST_OK:
            return "ok";
        case EMTEST_ERROR_INVALID_ARGUMENT:
            return "invalid argument";
        case EMTEST_ERROR_DOMAIN:
            return "argument outside domain";
        case EMTEST_ERROR_DEGENERATE_DATA:
            return "degenerate data";
        case EMTEST_ERROR_PARSE:
            return "malformed numeric input";
        case EMTEST_ERROR_NOMEM:
            return "out of memory";
    }
    return "unknown status";
}

double emtest_normal_cdf(double x) { return emtest::normal_cdf(x); }

emtest_status emtest_normal_quantile(double p, double* out) {
    if (!out) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] { *out = emtest::normal_quantile(p); });
}

emtest_status emtest_student_t_cdf(double t, int df, double* out) {
    if (!out) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] { *out = emtest::student_t_cdf(t, df); });
}

emtest_status emtest_chisq_survival(double s, int df, double* out) {
    if (!out) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] { *out = emtest::chisq_survival(s, df); });
}

emtest_status emtest_t_to_z(double t, int df, double* out, int* clamped) {
    if (!out) return EMTEST_ERROR_INVALID_ARGUMENT;
    if (clamped) *clamped = 0;
    return guarded([&] {
        if (df < 1) {
            throw std::invalid_argument("t_to_z: df must be >= 1");
        }
        // The t < 0 branch of the CDF returns the tail mass directly, so
        // evaluating at -|t| keeps full relative precision far out, and
        // Phi^-1(1 - q) = -Phi^-1(q) maps it back.
        double q = emtest::student_t_cdf(t < 0.0 ? t : -t, df);
        if (q <= 0.0) {
            // Tail underflowed: pin to the largest quantile the double
            // grid can express and report the clamp.
            if (clamped) *clamped = 1;
            *out = t >= 0.0 ? 38.5 : -38.5;
            return;
        }
        double z = -emtest::normal_quantile(q);
        *out = t >= 0.0 ? z : -z;
    });
}

double emtest_z_to_p(double z) {
    // 2*(1 - Phi(|z|)) without cancellation: erfc(|z|/sqrt 2).
    return 2.0 * emtest::normal_sf(z < 0.0 ? -z : z);
}

emtest_status emtest_a_n_default(size_t n, double* out) {
    if (!out) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] { *out = emtest::a_n_default(n); });
}

double emtest_limiting_pvalue(double statistic, double shift) {
    return emtest::limiting_pvalue(statistic, shift);
}

emtest_config* emtest_config_new(void) {
    return new (std::nothrow) emtest_config{};
}

void emtest_config_free(emtest_config* cfg) { delete cfg; }

emtest_status emtest_config_set_alpha_grid(emtest_config* cfg,
                                           const double* values,
                                           size_t count) {
    if (!cfg || !values || count == 0) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        std::vector<double> grid(values, values + count);
        emtest::EmTestConfig candidate = cfg->cfg;
        candidate.alpha_grid = std::move(grid);
        candidate.validate();
        cfg->cfg = std::move(candidate);
    });
}

emtest_status emtest_config_set_iterations(emtest_config* cfg, unsigned k) {
    if (!cfg) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        emtest::EmTestConfig candidate = cfg->cfg;
        candidate.iterations = k;
        candidate.validate();
        cfg->cfg = candidate;
    });
}

emtest_status emtest_config_set_a_n(emtest_config* cfg, double a_n) {
    if (!cfg) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        emtest::EmTestConfig candidate = cfg->cfg;
        candidate.a_n_override = a_n;
        candidate.validate();
        cfg->cfg = candidate;
    });
}

emtest_status emtest_config_set_step1_tolerance(emtest_config* cfg,
                                                double tol) {
    if (!cfg) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        emtest::EmTestConfig candidate = cfg->cfg;
        candidate.step1_tol = tol;
        candidate.validate();
        cfg->cfg = candidate;
    });
}

emtest_status emtest_config_set_step1_max_iter(emtest_config* cfg,
                                               unsigned max_iter) {
    if (!cfg) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        emtest::EmTestConfig candidate = cfg->cfg;
        candidate.step1_max_iter = max_iter;
        candidate.validate();
        cfg->cfg = candidate;
    });
}

emtest_status emtest_run(const double* data, size_t n,
                         const emtest_config* cfg, emtest_result** out) {
    if (!data || !out) return EMTEST_ERROR_INVALID_ARGUMENT;
    *out = nullptr;
    return guarded([&] {
        static const emtest::EmTestConfig defaults;
        const emtest::EmTestConfig& use = cfg ? cfg->cfg : defaults;
        auto res = emtest::em_test(std::span<const double>(data, n), use);
        *out = new emtest_result{std::move(res)};
    });
}

void emtest_result_free(emtest_result* res) { delete res; }

size_t emtest_result_n(const emtest_result* res) { return res ? res->res.n : 0; }

double emtest_result_statistic(const emtest_result* res) {
    return res ? res->res.statistic : 0.0;
}

double emtest_result_shift(const emtest_result* res) {
    return res ? res->res.shift : 0.0;
}

double emtest_result_p_value(const emtest_result* res) {
    return res ? res->res.p_value : 1.0;
}

double emtest_result_a_n(const emtest_result* res) {
    return res ? res->res.a_n : 0.0;
}

double emtest_result_sigma0_sq(const emtest_result* res) {
    return res ? res->res.sigma0_sq : 0.0;
}

unsigned emtest_result_iterations(const emtest_result* res) {
    if (!res || res->res.traces.empty()) return 0;
    return static_cast<unsigned>(res->res.traces.front().steps.size());
}

emtest_fit emtest_result_fit(const emtest_result* res) {
    emtest_fit fit{1.0, 0.0, 1.0, 1.0};
    if (res) {
        fit.alpha = res->res.best_params.alpha;
        fit.mu = res->res.best_params.mu;
        fit.sigma1 = res->res.best_params.sigma1;
        fit.sigma2 = res->res.best_params.sigma2;
    }
    return fit;
}

size_t emtest_result_trace_count(const emtest_result* res) {
    return res ? res->res.traces.size() : 0;
}

emtest_status emtest_result_trace_alpha(const emtest_result* res, size_t trace,
                                        double* out) {
    if (!res || !out || trace >= res->res.traces.size()) {
        return EMTEST_ERROR_INVALID_ARGUMENT;
    }
    *out = res->res.traces[trace].alpha_init;
    return EMTEST_OK;
}

emtest_status emtest_result_trace_tied(const emtest_result* res, size_t trace,
                                       int* out) {
    if (!res || !out || trace >= res->res.traces.size()) {
        return EMTEST_ERROR_INVALID_ARGUMENT;
    }
    *out = res->res.traces[trace].tied_for_max ? 1 : 0;
    return EMTEST_OK;
}

emtest_status emtest_result_trace_step(const emtest_result* res, size_t trace,
                                       size_t step, emtest_trace_step* out) {
    if (!res || !out || trace >= res->res.traces.size() ||
        step >= res->res.traces[trace].steps.size()) {
        return EMTEST_ERROR_INVALID_ARGUMENT;
    }
    const emtest::EmIterate& it = res->res.traces[trace].steps[step];
    out->alpha = it.alpha;
    out->mu = it.mu;
    out->sigma1 = it.sigma1;
    out->sigma2 = it.sigma2;
    out->pl = it.pl;
    out->statistic = it.statistic;
    return EMTEST_OK;
}

emtest_status emtest_simulate(const emtest_sim_spec* spec, size_t n,
                              uint64_t reps, double level,
                              const emtest_config* cfg, uint64_t seed,
                              emtest_sim_result* out) {
    if (!spec || !out) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        static const emtest::EmTestConfig defaults;
        const emtest::EmTestConfig& use = cfg ? cfg->cfg : defaults;
        emtest::SimulationResult sim = emtest::simulate_rejection_rate(
            to_generator(*spec), n, reps, level, use, seed);
        out->rejections = sim.rejections;
        out->reps = sim.reps;
        out->rate = sim.rate;
        out->mc_stderr = sim.mc_stderr;
        out->seed = sim.seed;
        out->elapsed_seconds = sim.elapsed_seconds;
    });
}

emtest_status emtest_generate_sample(const emtest_sim_spec* spec, size_t n,
                                     uint64_t seed, uint64_t stream,
                                     double* out) {
    if (!spec || !out) return EMTEST_ERROR_INVALID_ARGUMENT;
    return guarded([&] {
        std::vector<double> sample =
            emtest::generate_sample(to_generator(*spec), n, seed, stream);
        std::memcpy(out, sample.data(), sample.size() * sizeof(double));
    });
}

emtest_status emtest_calibrate(const double* a_grid, size_t a_count,
                               const uint32_t* n_grid, size_t n_count,
                               uint64_t reps, double level, uint64_t seed,
                               emtest_calibration** out) {
    if (!a_grid || !n_grid || !out || a_count == 0 || n_count == 0) {
        return EMTEST_ERROR_INVALID_ARGUMENT;
    }
    *out = nullptr;
    return guarded([&] {
        emtest::CalibrationResult cal = emtest::calibration_experiment(
            std::span<const double>(a_grid, a_count),
            std::span<const uint32_t>(n_grid, n_count), reps, level, seed);
        *out = new emtest_calibration{std::move(cal)};
    });
}

emtest_status emtest_calibration_reference(emtest_calibration** out) {
    if (!out) return EMTEST_ERROR_INVALID_ARGUMENT;
    *out = nullptr;
    return guarded([&] {
        *out = new emtest_calibration{emtest::reference_calibration()};
    });
}

void emtest_calibration_free(emtest_calibration* cal) { delete cal; }

size_t emtest_calibration_cell_count(const emtest_calibration* cal) {
    return cal ? cal->cal.cells.size() : 0;
}

emtest_status emtest_calibration_cell_at(const emtest_calibration* cal, size_t idx,
                                      emtest_calibration_cell* out) {
    if (!cal || !out || idx >= cal->cal.cells.size()) {
        return EMTEST_ERROR_INVALID_ARGUMENT;
    }
    const emtest::CalibrationCell& c = cal->cal.cells[idx];
    out->a_n = c.a_n;
    out->n = c.n;
    out->rate = c.rate;
    out->y = c.y;
    return EMTEST_OK;
}

emtest_status emtest_calibration_regression(const emtest_calibration* cal,
                                            emtest_regression* out) {
    if (!cal || !out) return EMTEST_ERROR_INVALID_ARGUMENT;
    const emtest::RegressionFit& fit = cal->cal.fit;
    out->b0 = fit.beta[0];
    out->b1 = fit.beta[1];
    out->b2 = fit.beta[2];
    out->adjusted_r2 = fit.adjusted_r2;
    out->formula_c0 = fit.formula_c0;
    out->formula_c1 = fit.formula_c1;
    return EMTEST_OK;
}

} // extern "C"
