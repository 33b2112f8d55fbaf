#include "agelab/rem.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <memory>

using namespace agelab;

namespace {

RemChain chain_with(int n, std::vector<double> energies, double beta, double E)
{
    auto land = std::make_shared<EnergyLandscape>(
        EnergyLandscape::from_energies(Graph::hypercube(n), std::move(energies), beta, EnergyDistribution::gaussian));
    return RemChain(land, beta, E);
}

double exit_oracle(double beta, int n, double e) { return std::exp(-beta * std::sqrt(double(n)) * std::max(e, 0.0)); }

}  // namespace

TEST_CASE("kernel: exit probabilities")
{
    const auto c = chain_with(4, {1.0, -0.5, 0.0, 2.0, 0.3, 0.3, 0.3, 0.3, -1, -1, -1, -1, 0, 0, 0, 0}, 1.0, -3.0);
    for (Vertex s = 0; s < 16; ++s) {
        const double p = c.exit_probability(s);
        CHECK(p == doctest::Approx(exit_oracle(1.0, 4, c.landscape().energy(s))).epsilon(1e-14));
        CHECK(p + (1.0 - p) == 1.0);
    }
    CHECK(c.exit_probability(1) == 1.0);

    Rng rng(1);
    const int n = 100000;
    int stay = 0;
    for (int i = 0; i < n; ++i) stay += rem_transition(c, 0, rng) == 0;
    const double p = 1.0 - std::exp(-2.0);
    CHECK(std::abs(stay / double(n) - p) < 3 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("geometric sojourns match stepwise simulation")
{
    const auto c = RemChain::sample(4, 1.0, -1.0, 31);
    const int runs = 100000;
    std::vector<int> fast(16, 0), slow(16, 0);
    Rng a(5), b(6);
    for (int i = 0; i < runs; ++i) {
        ++fast[simulate_rem_from(c, 0, 100, a).state_at(100)];
        Vertex s = 0;
        for (int k = 0; k < 100; ++k) s = rem_transition(c, s, b);
        ++slow[s];
    }
    // two-sample chi-square, 15 degrees of freedom, 99.9% quantile 37.7
    double chi2 = 0;
    for (int s = 0; s < 16; ++s)
        if (fast[s] + slow[s] > 0) chi2 += double(fast[s] - slow[s]) * (fast[s] - slow[s]) / (fast[s] + slow[s]);
    CHECK(chi2 < 37.7);
}

TEST_CASE("flat energies give a uniform simple random walk")
{
    const auto c = chain_with(4, std::vector<double>(16, 0.0), 2.0, -3.0);
    Rng rng(7);
    std::vector<int> hist(16, 0);
    const int runs = 32000;
    for (int i = 0; i < runs; ++i) ++hist[simulate_rem_from(c, 0, 1001, rng).state_at(1001)];
    // 1001 flips from 0 reach only odd-parity states, uniformly
    double chi2 = 0;
    for (int s = 0; s < 16; ++s) {
        const bool odd = __builtin_popcount(unsigned(s)) % 2;
        if (!odd) {
            CHECK(hist[s] == 0);
            continue;
        }
        const double e = runs / 8.0;
        chi2 += (hist[s] - e) * (hist[s] - e) / e;
    }
    CHECK(chi2 < 24.3);  // 7 degrees of freedom, 99.9%
}

TEST_CASE("a deep trap holds the chain")
{
    std::vector<double> e(16, 0.0);
    e[5] = 4.0;
    const auto c = chain_with(4, e, 1.0, -3.0);
    Rng rng(8);
    const auto path = simulate_rem_from(c, 5, 100000, rng);
    std::uint64_t at_trap = 0, prev = 0;
    for (std::size_t k = 0; k < path.jump_steps.size(); ++k) {
        if (path.states[k] == 5) at_trap += path.jump_steps[k] - prev;
        prev = path.jump_steps[k];
    }
    if (path.states.back() == 5) at_trap += path.n_steps - prev;
    CHECK(double(at_trap) / 100000.0 > 0.99);
}

TEST_CASE("Pi_N: m = 0 gives one, non-increasing in m")
{
    const auto c = RemChain::sample(10, 2.0, -2.0, 3);
    REQUIRE(!c.top().empty());
    const std::vector<std::uint64_t> m{0, 1, 10, 100, 1000};
    const auto tab = estimate_Pi_N(c, 50, m, 2000, 4);
    CHECK(tab.Pi[0].value == 1.0);
    for (std::size_t k = 1; k < m.size(); ++k) {
        CHECK(tab.Pi[k].value <= tab.Pi[k - 1].value);
        CHECK(tab.Pi[k].value >= 0.0);
    }
}

TEST_CASE("N = 2 with one top state against exact enumeration")
{
    const double beta = 1.0, E = -1.0;
    const auto probe = chain_with(2, {0, 0, 0, 0}, beta, E);
    const double u = probe.threshold();
    const std::vector<double> energies{u + 0.2, u - 0.3, u - 0.8, u - 1.5};
    const auto c = chain_with(2, energies, beta, E);
    REQUIRE(c.top().size() == 1);
    REQUIRE(c.in_top(0));

    // distribution over states after n steps, then mass that avoids any jump
    // into the top set during m further steps
    const auto kernel = [&](const std::vector<double>& p, bool kill) {
        std::vector<double> q(4, 0.0);
        for (int s = 0; s < 4; ++s) {
            const double leave = exit_oracle(beta, 2, energies[s]);
            q[s] += p[s] * (1 - leave);
            for (int b = 0; b < 2; ++b) {
                const int t = s ^ (1 << b);
                if (!(kill && t == 0)) q[t] += p[s] * leave / 2;
            }
        }
        return q;
    };
    const std::uint64_t n = 6;
    const std::vector<std::uint64_t> m{1, 3, 8, 14};
    std::vector<double> p{1, 0, 0, 0};
    for (std::uint64_t k = 0; k < n; ++k) p = kernel(p, false);
    std::vector<double> exact;
    for (std::uint64_t k = 1; k <= m.back(); ++k) {
        p = kernel(p, true);
        if (std::find(m.begin(), m.end(), k) != m.end()) exact.push_back(p[0] + p[1] + p[2] + p[3]);
    }
    const auto tab = estimate_Pi_N(c, n, m, 100000, 9);
    for (std::size_t j = 0; j < m.size(); ++j) {
        CAPTURE(m[j]);
        CHECK(std::abs(tab.Pi[j].value - exact[j]) < 3 * tab.Pi[j].stderr + 1e-12);
    }
}

TEST_CASE("expected top size")
{
    for (int n : {8, 12, 20})
        for (double E : {-3.0, 0.0}) {
            const double q = 0.5 * boost::math::erfc(rem_threshold(n, E) / std::sqrt(2.0));
            CHECK(expected_top_size(n, E) == doctest::Approx(std::ldexp(q, n)).epsilon(1e-12));
        }
    const int d = 300;
    double s = 0, s2 = 0;
    for (int i = 0; i < d; ++i) {
        const double k = double(RemChain::sample(10, 2.0, -1.0, stream_key(5, "top", i)).top().size());
        s += k;
        s2 += k * k;
    }
    const double mean = s / d, se = std::sqrt((s2 / d - mean * mean) / (d - 1));
    CHECK(std::abs(mean - expected_top_size(10, -1.0)) < 3 * se);
}

TEST_CASE("rescaled check near theta = 0 and the time scale")
{
    RemEnsemble e;
    e.n_spins = 10;
    e.disorders = 16;
    e.paths_per_disorder = 64;
    const std::vector<double> theta{1e-4, 1.0};
    const auto rep = rescaled_aging_check(e, theta, 10.0);
    const auto c = RemChain::sample(10, 2.0, -3.0, 1);
    CHECK(rep.c == doctest::Approx(std::exp(2.0 * std::sqrt(10.0) * rem_threshold(10, -3.0))));
    CHECK(c.time_scale() == doctest::Approx(rep.c));
    CHECK(rep.rows[0].ratio == doctest::Approx(1.0).epsilon(0.05));
    CHECK(rep.rows[1].Pi <= rep.rows[0].Pi);
}
