#include "agelab/landscape.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <cmath>

using namespace agelab;

TEST_CASE("exponential energies pass a KS test at the 1% level")
{
    const auto land = EnergyLandscape::sample(Graph::complete(1'000'000), EnergyDistribution::exponential, 2.0, 17);
    std::vector<double> e(land.energies().begin(), land.energies().end());
    const double ks = ks_statistic(e, [](double x) { return 1.0 - std::exp(-x); });
    CHECK(ks * std::sqrt(double(e.size())) < 1.628);
    for (double x : e) REQUIRE(x >= 0.0);
}

TEST_CASE("same seed gives identical energies; smaller graphs share the prefix")
{
    const auto a = EnergyLandscape::sample(Graph::segment(50), EnergyDistribution::exponential, 2.0, 99);
    const auto b = EnergyLandscape::sample(Graph::segment(50), EnergyDistribution::exponential, 2.0, 99);
    const auto c = EnergyLandscape::sample(Graph::segment(20), EnergyDistribution::exponential, 2.0, 99);
    CHECK(std::equal(a.energies().begin(), a.energies().end(), b.energies().begin()));
    CHECK(std::equal(c.energies().begin(), c.energies().end(), a.energies().begin()));
    for (Vertex x = 0; x < a.graph().vertex_count(); ++x)
        CHECK(a.energy(x) == vertex_energy(EnergyDistribution::exponential, 99, x));
}

TEST_CASE("depths are exp(beta E) exactly")
{
    const auto land = EnergyLandscape::sample(Graph::torus(10), EnergyDistribution::exponential, 1.7, 3);
    for (Vertex x = 0; x < land.graph().vertex_count(); ++x) CHECK(land.depth(x) == std::exp(1.7 * land.energy(x)));
    const auto rebuilt = EnergyLandscape::from_energies(
        land.graph(), std::vector<double>(land.energies().begin(), land.energies().end()), 1.7);
    CHECK(std::equal(rebuilt.depths().begin(), rebuilt.depths().end(), land.depths().begin()));
}

TEST_CASE("gaussian energies have mean zero")
{
    const auto land = EnergyLandscape::sample(Graph::complete(1'000'000), EnergyDistribution::gaussian, 1.0, 5);
    double s = 0;
    for (double x : land.energies()) s += x;
    CHECK(std::abs(s / 1e6) < 4e-3);
}

TEST_CASE("depth tail against a^-alpha")
{
    const auto half = EnergyLandscape::sample(Graph::complete(1'000'000), EnergyDistribution::exponential, 2.0, 8);
    const std::vector<double> grid{1.0, 4.0};
    const auto rows = depth_tail_check(half, grid);
    CHECK(rows[0].exact == 1.0);
    CHECK(rows[0].empirical == 1.0);
    CHECK(rows[1].exact == doctest::Approx(0.5));

    const auto land = EnergyLandscape::sample(Graph::complete(1'000'000), EnergyDistribution::exponential, 1.25, 8);
    const std::vector<double> ten{10.0};
    const auto r = depth_tail_check(land, ten)[0];
    CHECK(r.exact == doctest::Approx(std::pow(10.0, -0.8)));
    const double se = std::sqrt(r.exact * (1 - r.exact) / 1e6);
    CHECK(std::abs(r.empirical - r.exact) < 3 * se);
}

TEST_CASE("rem threshold matches a 50-digit evaluation")
{
    using big = boost::multiprecision::cpp_bin_float_50;
    const auto oracle = [](int n, double e) {
        const big ln2 = boost::multiprecision::log(big(2));
        const big s = boost::multiprecision::sqrt(2 * big(n) * ln2);
        const big pi = boost::math::constants::pi<big>();
        return (s + big(e) / s - (boost::multiprecision::log(big(n) * ln2) + boost::multiprecision::log(4 * pi)) / (2 * s))
            .convert_to<double>();
    };
    CHECK(rem_threshold(100, 0.0) == doctest::Approx(oracle(100, 0.0)).epsilon(1e-12));
    CHECK(rem_threshold(12, -3.0) == doctest::Approx(oracle(12, -3.0)).epsilon(1e-12));
}

TEST_CASE("rem threshold is increasing in E and approaches sqrt(2N ln 2)")
{
    CHECK(rem_threshold(16, -3.0) < rem_threshold(16, -2.0));
    CHECK(rem_threshold(16, -2.0) < rem_threshold(16, 1.0));
    double prev = 0.0;
    for (int n : {100, 10000, 1000000}) {
        const double ratio = rem_threshold(n, 0.0) / std::sqrt(2.0 * n * std::log(2.0));
        CHECK(ratio < 1.0);
        CHECK(ratio > prev);
        prev = ratio;
    }
    CHECK(prev > 0.999);
}
