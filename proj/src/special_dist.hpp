#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace emtest {

// Counter-based pseudo-random generator (Philox4x64-10). A given
// (seed, stream) pair always replays the same sequence; distinct streams
// are statistically independent, which is what lets simulation
// replications run in parallel without coordination.
class RngState {
public:
    RngState(uint64_t seed, uint64_t stream);

    uint64_t next_u64();
    // Uniform draw strictly inside (0,1).
    double next_uniform();
    // Standard normal via the inverse CDF (monotone in the uniform draw).
    double next_normal();

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

private:
    void refill();

    uint64_t seed_;
    uint64_t stream_;
    uint64_t block_ = 0;
    uint64_t buf_[4];
    int pos_ = 4;
};

// log of the N(mu, sigma^2) density at x; sigma must be positive.
double normal_logpdf(double x, double mu, double sigma);

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal survival function 1 - Phi(x), accurate in the far tail.
double normal_sf(double x);

// Standard normal quantile; p strictly in (0,1).
double normal_quantile(double p);

// Student-t CDF, df >= 1.
double student_t_cdf(double t, int df);

// Chi-square survival function for df in {1, 2}; s <= 0 gives 1.
double chisq_survival(double s, int df);

// n iid draws from N(mu, sigma^2); sigma = 0 yields a constant sample.
std::vector<double> sample_normal(RngState& state, double mu, double sigma,
                                  std::size_t n);

} // namespace emtest
