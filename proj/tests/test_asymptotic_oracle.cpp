#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "asymptotic_oracle.hpp"
#include "errors.hpp"

using namespace emtest;

TEST_CASE("hermite transforms at anchor points") {
    // x = 1: z = 0, u = -1/3, v = -1/12
    HermiteStats one = hermite_stats(std::vector<double>{1.0});
    CHECK(one.sum_z == 0.0);
    CHECK(one.sum_u == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(one.sum_v == doctest::Approx(-1.0 / 12.0).epsilon(1e-14));
    // x = 0: z = -1/2, u = 0, v = 1/8
    HermiteStats zero = hermite_stats(std::vector<double>{0.0});
    CHECK(zero.sum_z == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(zero.sum_u == 0.0);
    CHECK(zero.sum_v == doctest::Approx(0.125).epsilon(1e-14));
    // accumulation over {0, 2}
    HermiteStats two = hermite_stats(std::vector<double>{0.0, 2.0});
    CHECK(two.n == 2);
    CHECK(two.sum_x == 2.0);
    CHECK(two.sum_x_sq == 4.0);
    CHECK(two.sum_z == doctest::Approx(-0.5 + 1.5).epsilon(1e-14));
}

TEST_CASE("t_hat ratios and the positive-part constraint") {
    HermiteStats s = hermite_stats(std::vector<double>{0.0, 2.0});
    THat t = t_hat(s);
    CHECK(t.t1 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.t2 == doctest::Approx(s.sum_z / s.sum_z_sq).epsilon(1e-14));
    // the fourth Hermite transform is negative for |x| between about 0.74
    // and 2.33, so a spread-out sample in that band has sum_v < 0 while the
    // squared sums stay positive; t4 clamps to zero
    HermiteStats neg = hermite_stats(
        std::vector<double>{0.9, 1.1, -0.95, 1.05, -1.2, 1.15, 0.85, -1.3});
    CHECK(neg.sum_v < 0.0);
    CHECK(neg.sum_z_sq > 0.0);
    CHECK(t_hat(neg).t4 == 0.0);
    CHECK_THROWS_AS(t_hat(HermiteStats{}), degenerate_data_error);
    // a sample concentrated at x = 1 zeroes every z, which leaves t2
    // undefined; that is reported as degenerate rather than silently 0/0
    CHECK_THROWS_AS(t_hat(hermite_stats(std::vector<double>(20, 1.0))),
                    degenerate_data_error);
}

TEST_CASE("sample moments of the transforms match the standard normal law") {
    RngState rng(777, 3);
    const std::size_t n = 1000000;
    std::vector<double> x(n);
    for (auto& xi : x) xi = rng.next_normal();

    // moments computed directly from the transform definitions
    double sz = 0, szz = 0, su = 0, suu = 0, sv = 0, svv = 0;
    double sxz = 0, sxu = 0, sxv = 0, szu = 0, szv = 0, suv = 0, sx = 0,
           sxx = 0;
    for (double xi : x) {
        double z = 0.5 * (xi * xi - 1.0);
        double u = (xi * xi * xi - 3.0 * xi) / 6.0;
        double w = (xi * xi * xi * xi - 6.0 * xi * xi + 3.0) / 24.0;
        sx += xi;
        sxx += xi * xi;
        sz += z;
        szz += z * z;
        su += u;
        suu += u * u;
        sv += w;
        svv += w * w;
        sxz += xi * z;
        sxu += xi * u;
        sxv += xi * w;
        szu += z * u;
        szv += z * w;
        suv += u * w;
    }
    double nn = static_cast<double>(n);
    // means vanish: standard errors are sqrt(var)/1000, so 0.005 is generous
    CHECK(std::fabs(sz / nn) < 0.005);
    CHECK(std::fabs(su / nn) < 0.005);
    CHECK(std::fabs(sv / nn) < 0.005);
    double var_z = szz / nn - (sz / nn) * (sz / nn);
    double var_u = suu / nn - (su / nn) * (su / nn);
    double var_v = svv / nn - (sv / nn) * (sv / nn);
    CHECK(std::fabs(var_z - 0.5) < 0.01);
    CHECK(std::fabs(var_u - 1.0 / 6.0) < 0.01);
    CHECK(std::fabs(var_v - 1.0 / 24.0) < 0.005);
    // the transforms are pairwise uncorrelated, but products of high-order
    // polynomials in a normal draw are heavy-tailed, so the sample
    // correlation itself is noisy: its sd at n = 1e6 is about 0.003 for the
    // x pairs, 0.006 for the z pairs and 0.013 for u with v.  Bounds sit at
    // roughly five sigma; a genuine correlation would show up as O(1).
    auto corr = [&](double sab, double va, double vb, double ma, double mb) {
        return (sab / nn - ma * mb) / std::sqrt(va * vb);
    };
    double var_x = sxx / nn - (sx / nn) * (sx / nn);
    CHECK(std::fabs(corr(sxz, var_x, var_z, sx / nn, sz / nn)) < 0.015);
    CHECK(std::fabs(corr(sxu, var_x, var_u, sx / nn, su / nn)) < 0.015);
    CHECK(std::fabs(corr(sxv, var_x, var_v, sx / nn, sv / nn)) < 0.015);
    CHECK(std::fabs(corr(szu, var_z, var_u, sz / nn, su / nn)) < 0.03);
    CHECK(std::fabs(corr(szv, var_z, var_v, sz / nn, sv / nn)) < 0.03);
    CHECK(std::fabs(corr(suv, var_u, var_v, su / nn, sv / nn)) < 0.065);

    // hermite_stats carries exactly these sums
    HermiteStats hs = hermite_stats(x);
    CHECK(hs.sum_z == doctest::Approx(sz).epsilon(1e-12));
    CHECK(hs.sum_v_sq == doctest::Approx(svv).epsilon(1e-12));
}

TEST_CASE("asymptotic_em_statistic composition") {
    std::vector<double> data{0.4, -1.1, 2.0, 0.3, -0.6, 1.5, -2.2, 0.9};
    double ssq = 0.0;
    for (double x : data) ssq += x * x;
    double sigma0 = std::sqrt(ssq / static_cast<double>(data.size()));
    double shift = 2.0 * std::log(0.25);

    std::vector<double> y;
    for (double x : data) y.push_back(x / sigma0);
    HermiteStats s = hermite_stats(y);
    double expect = s.sum_x * s.sum_x / s.sum_x_sq +
                    std::max(s.sum_v, 0.0) * std::max(s.sum_v, 0.0) / s.sum_v_sq +
                    shift;
    CHECK(asymptotic_em_statistic(data, sigma0, shift) ==
          doctest::Approx(expect).epsilon(1e-13));
    // never falls below the shift
    CHECK(asymptotic_em_statistic(data, sigma0, shift) >= shift);
    // clamped fourth-order term drops out when sum_v is negative
    std::vector<double> ones(30, 1.0);
    double stat = asymptotic_em_statistic(ones, 1.0, shift);
    HermiteStats hs = hermite_stats(ones);
    CHECK(hs.sum_v < 0.0);
    CHECK(stat == doctest::Approx(hs.sum_x * hs.sum_x / hs.sum_x_sq + shift)
                      .epsilon(1e-13));

    CHECK_THROWS_AS(asymptotic_em_statistic(data, 0.0, shift),
                    std::domain_error);
    CHECK_THROWS_AS(asymptotic_em_statistic(std::vector<double>{}, 1.0, shift),
                    degenerate_data_error);
}

TEST_CASE("mc_limiting_sample distribution and determinism") {
    RngState a(11, 0);
    RngState b(11, 0);
    auto da = mc_limiting_sample(5000, a);
    auto db = mc_limiting_sample(5000, b);
    CHECK(da == db);
    for (double v : da) CHECK(v >= 0.0);
    // survival at a few points against the analytic mixture (5000 draws,
    // so roughly +-0.02 at three sigma)
    for (double s : {0.5, 1.5, 3.0, 6.0}) {
        std::size_t above = 0;
        for (double v : da) above += v > s;
        double emp = static_cast<double>(above) / 5000.0;
        double analytic =
            0.5 * chisq_survival(s, 1) + 0.5 * chisq_survival(s, 2);
        CHECK(std::fabs(emp - analytic) < 0.025);
    }
}
