#include "special_dist.hpp"

#include <cmath>
#include <stdexcept>

namespace emtest {

namespace {

constexpr double kHalfLog2Pi = 0.918938533204672741780329736406; // log(2*pi)/2
constexpr double kSqrt1_2 = 0.707106781186547524400844362105;    // 1/sqrt(2)

inline void mulhilo(uint64_t a, uint64_t b, uint64_t& hi, uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<uint64_t>(p >> 64);
    lo = static_cast<uint64_t>(p);
}

struct Block {
    uint64_t v[4];
};

// Philox4x64-10 (Salmon et al. constants).
Block philox(uint64_t c0, uint64_t c1, uint64_t c2, uint64_t c3, uint64_t k0,
             uint64_t k1) {
    constexpr uint64_t M0 = 0xD2E7470EE14C6C93ULL;
    constexpr uint64_t M1 = 0xCA5A826395121157ULL;
    constexpr uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    constexpr uint64_t W1 = 0xBB67AE8584CAA73BULL;
    for (int round = 0; round < 10; ++round) {
        uint64_t hi0, lo0, hi1, lo1;
        mulhilo(M0, c0, hi0, lo0);
        mulhilo(M1, c2, hi1, lo1);
        uint64_t n0 = hi1 ^ c1 ^ k0;
        uint64_t n1 = lo1;
        uint64_t n2 = hi0 ^ c3 ^ k1;
        uint64_t n3 = lo0;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += W0;
        k1 += W1;
    }
    return Block{{c0, c1, c2, c3}};
}

// Regularized incomplete beta continued fraction (Lentz).
double betacf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 3e-16;
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

double betai_reg(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lnbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                  a * std::log(x) + b * std::log1p(-x);
    double bt = std::exp(lnbt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * betacf(a, b, x) / a;
    }
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

} // namespace

RngState::RngState(uint64_t seed, uint64_t stream)
    : seed_(seed), stream_(stream) {}

void RngState::refill() {
    Block blk = philox(block_, 0, 0, 0, seed_, stream_);
    for (int i = 0; i < 4; ++i) buf_[i] = blk.v[i];
    ++block_;
    pos_ = 0;
}

uint64_t RngState::next_u64() {
    if (pos_ >= 4) refill();
    return buf_[pos_++];
}

double RngState::next_uniform() {
    // 53-bit mantissa centered in its cell: never exactly 0 or 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngState::next_normal() { return normal_quantile(next_uniform()); }

double normal_logpdf(double x, double mu, double sigma) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("normal_logpdf: sigma must be positive");
    }
    double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - kHalfLog2Pi;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kSqrt1_2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * kSqrt1_2); }

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::domain_error("normal_quantile: p must lie in (0,1)");
    }
    if (p == 0.5) return 0.0; // exact symmetry point
    bool lower = p <= 0.5;
    double q = lower ? p : 1.0 - p;
    // Hastings rational start (abs error < 4.5e-4), then Halley steps on
    // Phi(x) - q using the tail-accurate erfc form; two steps reach full
    // double precision from that start.
    double t = std::sqrt(-2.0 * std::log(q));
    double num = 2.515517 + t * (0.802853 + t * 0.010328);
    double den = 1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308));
    double x = -(t - num / den); // lower-tail quantile, x <= 0
    for (int i = 0; i < 2; ++i) {
        double f = normal_cdf(x) - q;
        double pdf = std::exp(-0.5 * x * x) * (0.5 * M_2_SQRTPI * kSqrt1_2);
        double u = f / pdf;
        x -= 2.0 * u / (2.0 + x * u);
    }
    return lower ? x : -x;
}

double student_t_cdf(double t, int df) {
    if (df < 1) {
        throw std::invalid_argument("student_t_cdf: df must be >= 1");
    }
    if (std::isnan(t)) return t;
    double nu = static_cast<double>(df);
    double x = nu / (nu + t * t);
    double tail = 0.5 * betai_reg(0.5 * nu, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double chisq_survival(double s, int df) {
    if (df != 1 && df != 2) {
        throw std::invalid_argument("chisq_survival: df must be 1 or 2");
    }
    if (s <= 0.0) return 1.0;
    if (df == 1) return std::erfc(std::sqrt(0.5 * s));
    return std::exp(-0.5 * s);
}

std::vector<double> sample_normal(RngState& state, double mu, double sigma,
                                  std::size_t n) {
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("sample_normal: sigma must be >= 0");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = sigma == 0.0 ? mu : mu + sigma * state.next_normal();
    }
    return out;
}

} // namespace emtest
