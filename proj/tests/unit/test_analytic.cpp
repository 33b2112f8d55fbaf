#include "agelab/analytic.hpp"
#include "agelab/rng.hpp"
#include "agelab/stats.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace agelab;

namespace {

// the arcsine law: both h and H reduce to I_{1/(1+theta)}(alpha, 1 - alpha)
double arcsine_oracle(double theta, double alpha) { return boost::math::ibeta(alpha, 1.0 - alpha, 1.0 / (1.0 + theta)); }

// 1 - F_inf(t) = E exp(-t/X), X Pareto(alpha) on [1, inf) = alpha t^-alpha gamma(alpha, t)
double F_oracle(double t, double alpha)
{
    if (t == 0.0) return 0.0;
    return 1.0 - alpha * std::pow(t, -alpha) * boost::math::tgamma_lower(alpha, t);
}

}  // namespace

TEST_CASE("normalizations at zero")
{
    for (double alpha : {0.2, 0.5, 0.8}) {
        CHECK(std::abs(h_theta(0.0, alpha) - 1.0) < 1e-10);
        CHECK(std::abs(H_theta(0.0, alpha) - 1.0) < 1e-10);
        CHECK(std::abs(F_infinity(0.0, alpha)) < 1e-12);
        for (double a : {0.0, 0.4, 1.0}) CHECK(std::abs(g_a_laplace(0.0, a, alpha) - 1.0) < 1e-12);
    }
    CHECK(std::abs(h_theta(1.0, 0.5) - 0.5) < 1e-10);
}

TEST_CASE("h and H agree with the incomplete beta function")
{
    for (double alpha : {0.3, 0.5, 0.8})
        for (double theta : {1e-3, 0.1, 0.5, 1.0, 3.0, 10.0, 1e3}) {
            CAPTURE(alpha);
            CAPTURE(theta);
            CHECK(h_theta(theta, alpha) == doctest::Approx(arcsine_oracle(theta, alpha)).epsilon(1e-8));
            CHECK(H_theta(theta, alpha) == doctest::Approx(arcsine_oracle(theta, alpha)).epsilon(1e-8));
        }
}

TEST_CASE("h and H are decreasing in theta")
{
    double ph = 2, pH = 2;
    for (double th = 0.0; th < 50; th += 0.37) {
        const double h = h_theta(th, 0.6), H = H_theta(th, 0.6);
        CHECK(h < ph);
        CHECK(H < pH);
        CHECK(h >= 0.0);
        ph = h;
        pH = H;
    }
}

TEST_CASE("H asymptotic slopes")
{
    for (double alpha : {0.3, 0.5, 0.8}) {
        std::vector<double> small = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}, one_minus;
        for (double t : small) one_minus.push_back(1.0 - H_theta(t, alpha));
        CHECK(std::abs(loglog_fit(small, one_minus).slope - (1.0 - alpha)) < 0.02);
        std::vector<double> large = {1e2, 3e2, 1e3, 3e3, 1e4}, vals;
        for (double t : large) vals.push_back(H_theta(t, alpha));
        CHECK(std::abs(loglog_fit(large, vals).slope + alpha) < 0.02);
    }
}

TEST_CASE("F_infinity against the lower incomplete gamma")
{
    for (double alpha : {0.3, 0.5, 0.8})
        for (double t : {1e-3, 0.1, 1.0, 5.0, 50.0, 1e3}) CHECK(F_infinity(t, alpha) == doctest::Approx(F_oracle(t, alpha)).epsilon(1e-8));
    double prev = -1;
    for (double t = 0; t < 100; t += 0.5) {
        const double f = F_infinity(t, 0.5);
        CHECK(f >= prev);
        prev = f;
    }
    CHECK(F_infinity(1e7, 0.5) > 0.999);
}

TEST_CASE("F_infinity tail constant is Gamma(1 + alpha)")
{
    for (double alpha : {0.3, 0.5, 0.8}) {
        const double target = std::tgamma(1.0 + alpha);
        const double got = (1.0 - F_infinity(1e4, alpha)) * std::pow(1e4, alpha);
        CHECK(std::abs(got / target - 1.0) < 0.02);
    }
}

TEST_CASE("g_a closed forms and a Monte Carlo oracle")
{
    for (double lambda : {0.1, 1.0, 7.0}) CHECK(std::abs(g_a_laplace(lambda, 0.0, 0.5) - std::exp(-lambda)) < 1e-10);

    Rng rng(2024);
    const int n = 1'000'000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double tau = std::pow(rng.uniform(), -1.0 / 0.5);
        const double v = std::exp(-std::sqrt(tau));
        s += v;
        s2 += v * v;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / (n - 1));
    CHECK(std::abs(g_a_laplace(1.0, 0.5, 0.5) - mean) < 3 * se);
}

TEST_CASE("constant C")
{
    CHECK(constant_C(0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(constant_C(0.5, 0.5) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-10));
    for (double a : {0.0, 0.3, 1.0})
        for (double alpha : {0.1, 0.9}) CHECK(constant_C(a, alpha) > 0.0);
}

TEST_CASE("q_a on a synthetic table")
{
    DistributionTable F;
    F.u = {1e-3, 0.01, 0.1, 1, 10, 100};
    F.cdf = {0.0, 0.05, 0.2, 0.55, 0.9, 1.0};
    double prev = 2;
    for (double th : {0.0, 0.01, 0.1, 1.0, 10.0}) {
        const double q = q_a_theta(th, 0.3, 0.5, F);
        CHECK(q <= prev);
        prev = q;
        CHECK(std::abs(q_a_theta(th, 0.0, 0.5, F) - q_0_theta(th, F)) < 1e-10);
    }
    CHECK(std::abs(q_a_theta(0.0, 0.7, 0.5, F) - 1.0) < 1e-8);
}

TEST_CASE("renewal solution: diagonal, grid halving and convergence to H")
{
    const std::vector<double> offsets{0.0, 10.0, 100.0};
    const auto sol = solve_renewal(0.5, 200.0, 0.25, offsets);
    for (std::size_t k = 0; k < sol.rows(); k += 37) CHECK(std::abs(sol.at(k, 0) - 1.0) < 1e-9);
    const auto fine = solve_renewal(0.5, 200.0, 0.125, offsets);
    CHECK(renewal_halving_gap(sol, fine) < 1e-3);
}

TEST_CASE("renewal solution against a direct Monte Carlo of the renewal process")
{
    // waiting times W = X * Exp(1), X Pareto(alpha) on [1, inf), have law F_inf
    const double alpha = 0.5, t_w = 50.0;
    const std::vector<double> offsets{5.0, 50.0, 150.0};
    const auto sol = solve_renewal(alpha, t_w, 0.125, offsets);
    Rng rng(77);
    const int n = 100000;
    std::vector<int> quiet(offsets.size(), 0);
    for (int i = 0; i < n; ++i) {
        double s = 0;
        while (s <= t_w) s += std::pow(rng.uniform(), -1.0 / alpha) * rng.exponential(1.0);
        for (std::size_t j = 0; j < offsets.size(); ++j) quiet[j] += s > t_w + offsets[j];
    }
    for (std::size_t j = 0; j < offsets.size(); ++j) {
        const double p = quiet[j] / double(n), se = std::sqrt(p * (1 - p) / n);
        CAPTURE(offsets[j]);
        CHECK(std::abs(sol.value(t_w, j) - p) < 3 * se);
    }
}
