#include "em_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "errors.hpp"
#include "special_dist.hpp"

namespace emtest {

namespace {

constexpr double kHalfLog2Pi = 0.918938533204672741780329736406;

// EM works in variances; conversion to standard deviations happens only at
// the public boundary.
struct Theta {
    double alpha;
    double mu;
    double v1;
    double v2;
};

struct PassResult {
    double sw = 0.0;     // sum of contaminant weights
    double swx = 0.0;    // sum w * x
    double swxx = 0.0;   // sum w * x^2
    double s1xx = 0.0;   // sum (1-w) * x^2
    double loglik = 0.0; // observed-data log-likelihood at the pass point
};

// One fused sweep: posterior weights, their moment sums, and the
// log-likelihood, at one exp and one log1p per observation.
PassResult fused_pass(const Theta& th, std::span<const double> x) {
    const double la0 = std::log1p(-th.alpha) - 0.5 * std::log(th.v1);
    const double lb0 = std::log(th.alpha) - 0.5 * std::log(th.v2);
    const double h1 = 0.5 / th.v1;
    const double h2 = 0.5 / th.v2;
    PassResult r;
    for (double xi : x) {
        double la = la0 - xi * xi * h1;
        double dm = xi - th.mu;
        double lb = lb0 - dm * dm * h2;
        double w, lse;
        if (la >= lb) {
            double e = std::exp(lb - la);
            w = e / (1.0 + e);
            lse = la + std::log1p(e);
        } else {
            double e = std::exp(la - lb);
            w = 1.0 / (1.0 + e);
            lse = lb + std::log1p(e);
        }
        r.sw += w;
        r.swx += w * xi;
        r.swxx += w * xi * xi;
        r.s1xx += (1.0 - w) * xi * xi;
        r.loglik += lse;
    }
    r.loglik -= static_cast<double>(x.size()) * kHalfLog2Pi;
    return r;
}

double penalties(const Theta& th, const PenaltyConfig& pen) {
    double p = std::log(th.alpha);
    double r1 = pen.sigma0_sq / th.v1;
    double r2 = pen.sigma0_sq / th.v2;
    p += -pen.a_n * (r1 - std::log(r1));
    p += -pen.a_n * (r2 - std::log(r2));
    return p;
}

// Closed-form penalized update from the sums of a pass at `cur`. The
// sigma2 residuals are taken around cur.mu; freezing alpha (step 1) just
// skips its update.
Theta update_from(const PassResult& r, const Theta& cur, std::size_t n,
                  const PenaltyConfig& pen, bool freeze_alpha) {
    Theta next;
    double nn = static_cast<double>(n);
    next.alpha = freeze_alpha ? cur.alpha : (r.sw + 1.0) / (nn + 1.0);
    next.mu = r.sw > 0.0 ? r.swx / r.sw : cur.mu;
    double shrink = 2.0 * pen.a_n * pen.sigma0_sq;
    next.v1 = (r.s1xx + shrink) / ((nn - r.sw) + 2.0 * pen.a_n);
    double ss2 = r.swxx - 2.0 * cur.mu * r.swx + cur.mu * cur.mu * r.sw;
    next.v2 = (std::max(ss2, 0.0) + shrink) / (r.sw + 2.0 * pen.a_n);
    return next;
}

struct FitOutcome {
    Theta theta;
    double pl;
};

// Coordinate EM with alpha frozen, from one starting point.
FitOutcome run_frozen_em(const Theta& start, std::span<const double> x,
                         const PenaltyConfig& pen, double tol,
                         unsigned max_iter) {
    Theta th = start;
    double pl_prev = -INFINITY;
    for (unsigned it = 0; it < max_iter; ++it) {
        PassResult r = fused_pass(th, x);
        double pl = r.loglik + penalties(th, pen);
        if (std::fabs(pl - pl_prev) <= tol * (1.0 + std::fabs(pl))) {
            return FitOutcome{th, pl};
        }
        pl_prev = pl;
        th = update_from(r, th, x.size(), pen, /*freeze_alpha=*/true);
    }
    PassResult r = fused_pass(th, x);
    return FitOutcome{th, r.loglik + penalties(th, pen)};
}

std::vector<double> start_points(double alpha, std::span<const double> x,
                                 const EmTestConfig& cfg) {
    std::vector<double> starts{0.0};
    if (!cfg.mu_start_quantiles.empty()) {
        std::vector<double> sorted(x.begin(), x.end());
        std::sort(sorted.begin(), sorted.end());
        for (double level : cfg.mu_start_quantiles) {
            double h = level * static_cast<double>(sorted.size() - 1);
            std::size_t lo = static_cast<std::size_t>(h);
            if (lo + 1 >= sorted.size()) {
                starts.push_back(sorted.back());
                continue;
            }
            double frac = h - static_cast<double>(lo);
            starts.push_back(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]));
        }
    }
    // Exact duplicates re-run the same trajectory; drop them.
    std::vector<double> unique;
    for (double s : starts) {
        if (std::find(unique.begin(), unique.end(), s) == unique.end()) {
            unique.push_back(s);
        }
    }
    (void)alpha;
    return unique;
}

FitOutcome profile_fit_impl(double alpha, std::span<const double> x,
                            const PenaltyConfig& pen, const EmTestConfig& cfg) {
    const double sigma0_sq = pen.sigma0_sq;
    FitOutcome best{};
    best.pl = -INFINITY;
    for (double mu0 : start_points(alpha, x, cfg)) {
        Theta start{alpha, mu0, sigma0_sq, sigma0_sq};
        FitOutcome out =
            run_frozen_em(start, x, pen, cfg.step1_tol, cfg.step1_max_iter);
        if (out.pl > best.pl) best = out;
    }
    return best;
}

void validate_data_for_test(std::span<const double> data) {
    if (data.size() < 10) {
        throw degenerate_data_error(
            "em_test: need at least 10 observations, got " +
            std::to_string(data.size()));
    }
    for (double x : data) {
        if (!std::isfinite(x)) {
            throw degenerate_data_error("em_test: data must be finite");
        }
    }
}

} // namespace

void EmTestConfig::validate() const {
    if (alpha_grid.empty()) {
        throw std::invalid_argument("config: alpha_grid must be non-empty");
    }
    for (double a : alpha_grid) {
        if (!(a > 0.0) || !(a < 1.0)) {
            throw std::invalid_argument(
                "config: alpha grid values must lie strictly in (0,1)");
        }
    }
    if (iterations < 1) {
        throw std::invalid_argument("config: iterations must be >= 1");
    }
    if (!(step1_tol > 0.0) || !std::isfinite(step1_tol)) {
        throw std::invalid_argument("config: step1_tol must be positive");
    }
    if (step1_max_iter < 1) {
        throw std::invalid_argument("config: step1_max_iter must be >= 1");
    }
    for (double q : mu_start_quantiles) {
        if (!(q >= 0.0) || !(q <= 1.0)) {
            throw std::invalid_argument(
                "config: quantile levels must lie in [0,1]");
        }
    }
    if (a_n_override && (!(*a_n_override > 0.0) || !std::isfinite(*a_n_override))) {
        throw std::invalid_argument("config: a_n override must be positive");
    }
}

std::vector<double> e_step(const MixtureParams& params,
                           std::span<const double> data) {
    detail::validate_params(params);
    if (!(params.alpha > 0.0) || !(params.alpha < 1.0)) {
        throw std::invalid_argument(
            "e_step: alpha must lie strictly in (0,1)");
    }
    Theta th{params.alpha, params.mu, params.sigma1 * params.sigma1,
             params.sigma2 * params.sigma2};
    const double la0 = std::log1p(-th.alpha) - 0.5 * std::log(th.v1);
    const double lb0 = std::log(th.alpha) - 0.5 * std::log(th.v2);
    const double h1 = 0.5 / th.v1;
    const double h2 = 0.5 / th.v2;
    std::vector<double> w(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        double xi = data[i];
        double la = la0 - xi * xi * h1;
        double dm = xi - th.mu;
        double lb = lb0 - dm * dm * h2;
        if (la >= lb) {
            double e = std::exp(lb - la);
            w[i] = e / (1.0 + e);
        } else {
            double e = std::exp(la - lb);
            w[i] = 1.0 / (1.0 + e);
        }
    }
    return w;
}

MixtureParams m_step(std::span<const double> weights,
                     std::span<const double> data, double mu_current,
                     const PenaltyConfig& pen) {
    detail::validate_penalty(pen);
    if (weights.size() != data.size()) {
        throw std::invalid_argument("m_step: weights/data size mismatch");
    }
    if (data.empty()) {
        throw std::invalid_argument("m_step: empty data");
    }
    PassResult r;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double w = weights[i];
        if (!(w >= 0.0) || !(w <= 1.0)) {
            throw std::invalid_argument("m_step: weights must lie in [0,1]");
        }
        double x = data[i];
        r.sw += w;
        r.swx += w * x;
        r.swxx += w * x * x;
        r.s1xx += (1.0 - w) * x * x;
    }
    Theta cur{0.0, mu_current, pen.sigma0_sq, pen.sigma0_sq};
    Theta next = update_from(r, cur, data.size(), pen, /*freeze_alpha=*/false);
    return MixtureParams{next.alpha, next.mu, std::sqrt(next.v1),
                         std::sqrt(next.v2)};
}

MixtureParams step1_profile_fit(double alpha, std::span<const double> data,
                                const PenaltyConfig& pen,
                                const EmTestConfig& cfg) {
    cfg.validate();
    detail::validate_penalty(pen);
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument(
            "step1_profile_fit: alpha must lie strictly in (0,1)");
    }
    if (data.empty()) {
        throw degenerate_data_error("step1_profile_fit: empty sample");
    }
    FitOutcome out = profile_fit_impl(alpha, data, pen, cfg);
    return MixtureParams{out.theta.alpha, out.theta.mu,
                         std::sqrt(out.theta.v1), std::sqrt(out.theta.v2)};
}

EmTestResult em_test(std::span<const double> data, const EmTestConfig& cfg) {
    cfg.validate();
    validate_data_for_test(data);
    const std::size_t n = data.size();

    double ssq = 0.0;
    for (double x : data) ssq += x * x;
    double sigma0_sq = ssq / static_cast<double>(n);
    if (!(sigma0_sq > 0.0)) {
        throw degenerate_data_error("em_test: sample is identically zero");
    }
    double a_n = cfg.a_n_override ? *cfg.a_n_override : a_n_default(n);

    // The statistic is scale-invariant; running on data standardized to
    // unit sigma0 makes that hold to rounding noise and keeps the EM
    // arithmetic well-scaled. Parameters map back by sigma0 at the end.
    double sigma0 = std::sqrt(sigma0_sq);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = data[i] / sigma0;

    NullFit nf = null_fit(y, a_n);
    PenaltyConfig pen{a_n, nf.sigma0_sq};
    const double pl_shift = static_cast<double>(n) * std::log(sigma0);

    EmTestResult result;
    result.n = n;
    result.a_n = a_n;
    result.sigma0_sq = sigma0_sq;
    result.traces.reserve(cfg.alpha_grid.size());

    for (double alpha0 : cfg.alpha_grid) {
        EmTrace trace;
        trace.alpha_init = alpha0;
        trace.steps.reserve(cfg.iterations);

        FitOutcome fit = profile_fit_impl(alpha0, y, pen, cfg);
        Theta th = fit.theta;
        PassResult pass = fused_pass(th, y);
        double pl = pass.loglik + penalties(th, pen);
        for (unsigned k = 0;; ++k) {
            trace.steps.push_back(EmIterate{
                th.alpha, sigma0 * th.mu, sigma0 * std::sqrt(th.v1),
                sigma0 * std::sqrt(th.v2), pl - pl_shift,
                2.0 * (pl - nf.pl_null)});
            if (k + 1 >= cfg.iterations) break;
            th = update_from(pass, th, n, pen, /*freeze_alpha=*/false);
            pass = fused_pass(th, y);
            pl = pass.loglik + penalties(th, pen);
        }
        result.traces.push_back(std::move(trace));
    }

    double best = -INFINITY;
    for (std::size_t j = 0; j < result.traces.size(); ++j) {
        double m = result.traces[j].steps.back().statistic;
        if (m > best) {
            best = m;
            result.best_trace = j;
        }
    }
    for (auto& trace : result.traces) {
        trace.tied_for_max = trace.steps.back().statistic == best;
    }
    result.statistic = best;

    double alpha_max = *std::max_element(cfg.alpha_grid.begin(),
                                         cfg.alpha_grid.end());
    result.shift = 2.0 * std::log(alpha_max);
    result.p_value = limiting_pvalue(result.statistic, result.shift);

    const EmIterate& win = result.traces[result.best_trace].steps.back();
    result.best_params = MixtureParams{win.alpha, win.mu, win.sigma1,
                                       win.sigma2};
    return result;
}

MixtureParams fit_report(std::span<const double> data,
                         const EmTestConfig& cfg) {
    return em_test(data, cfg).best_params;
}

double limiting_pvalue(double statistic, double shift) {
    if (!std::isfinite(statistic) || !std::isfinite(shift)) {
        throw std::domain_error("limiting_pvalue: arguments must be finite");
    }
    double s = statistic - shift;
    if (s <= 0.0) return 1.0;
    return 0.5 * (chisq_survival(s, 1) + chisq_survival(s, 2));
}

} // namespace emtest
