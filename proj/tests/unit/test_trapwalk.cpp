#include "agelab/trapwalk.hpp"
#include "agelab/twopoint.hpp"

#include "semigroup.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>

using namespace agelab;

namespace {

EnergyLandscape with_depths(const Graph& g, const std::vector<double>& tau, double beta = 1.0)
{
    std::vector<double> e;
    for (double t : tau) e.push_back(std::log(t) / beta);
    return EnergyLandscape::from_energies(g, e, beta);
}

}  // namespace

TEST_CASE("flat landscape: every rate is nu")
{
    const auto land = with_depths(Graph::torus(3), std::vector<double>(9, 1.0));
    WalkParams p;
    p.a = 0.4;
    p.nu = 2.5;
    const TrapWalk w(land, p);
    for (Vertex x = 0; x < 9; ++x)
        for (auto [y, r] : w.jump_rates(x)) CHECK(r == doctest::Approx(2.5));
}

TEST_CASE("a = 0: outgoing rates depend only on the departure site")
{
    const auto land = EnergyLandscape::sample(Graph::complete(6), EnergyDistribution::exponential, 2.0, 4);
    WalkParams p;
    p.start = StartPolicy::uniform();
    const TrapWalk w(land, p);
    for (Vertex x = 0; x < 6; ++x)
        for (auto [y, r] : w.jump_rates(x)) CHECK(r == doctest::Approx(1.0 / land.depth(x)).epsilon(1e-14));
}

TEST_CASE("detailed balance on every edge")
{
    for (const char* spec : {"segment:4", "torus:3", "complete:8"})
        for (double a : {0.0, 0.3, 0.5, 1.0}) {
            const auto land = EnergyLandscape::sample(Graph::parse(spec), EnergyDistribution::exponential, 2.0, 12);
            WalkParams p;
            p.a = a;
            p.boundary = BoundaryPolicy::allow;
            const TrapWalk w(land, p);
            for (Vertex x = 0; x < land.graph().vertex_count(); ++x)
                for (Vertex y : land.graph().neighbors(x)) {
                    const double l = w.rate(x, y) * land.depth(x), r = w.rate(y, x) * land.depth(y);
                    CHECK(std::abs(l - r) <= 1e-12 * std::max(l, r));
                }
        }
}

TEST_CASE("flat complete graph: mean holding time 1/(nu (M-1))")
{
    const int M = 5;
    const auto land = with_depths(Graph::complete(M), std::vector<double>(M, 1.0));
    WalkParams p;
    p.nu = 0.5;
    const TrapWalk w(land, p);
    Rng rng(1);
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double h = w.step(0, rng).holding_time;
        s += h;
        s2 += h * h;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0 / (0.5 * (M - 1))) < 3 * se);
}

TEST_CASE("a = 0 holding times are exponential with mean tau/(nu deg)")
{
    const auto land = with_depths(Graph::torus(3), {7, 1, 1, 1, 1, 1, 1, 1, 1});
    const TrapWalk w(land, WalkParams{});
    Rng rng(2);
    std::vector<double> h(20000);
    for (auto& v : h) v = w.step(0, rng).holding_time;
    const double mean = 7.0 / 4.0;
    CHECK(ks_statistic(h, [&](double x) { return 1.0 - std::exp(-x / mean); }) * std::sqrt(double(h.size())) < 1.628);
}

TEST_CASE("next vertex follows the rates")
{
    // middle of a 3-site segment, a = 1: rates to the ends are tau(y) = 1 and 3
    const auto land = with_depths(Graph::segment(1), {1, 5, 3});
    WalkParams p;
    p.a = 1.0;
    p.boundary = BoundaryPolicy::allow;
    const TrapWalk w(land, p);
    Rng rng(3);
    const int n = 100000;
    int right = 0;
    for (int i = 0; i < n; ++i) right += w.step(1, rng).next == 2;
    CHECK(std::abs(right / double(n) - 0.75) < 3 * std::sqrt(0.75 * 0.25 / n));
}

TEST_CASE("a = 0 jump chain is the simple random walk")
{
    const auto land = EnergyLandscape::sample(Graph::torus(3), EnergyDistribution::exponential, 3.0, 5);
    const TrapWalk w(land, WalkParams{});
    Rng rng(6);
    std::map<Vertex, int> counts;
    const int n = 80000;
    for (int i = 0; i < n; ++i) ++counts[w.step(4, rng).next];
    CHECK(counts.size() == 4);
    for (auto [y, c] : counts) CHECK(std::abs(c / double(n) - 0.25) < 3.5 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("trajectories: short horizons, determinism, right-continuity")
{
    const auto land = EnergyLandscape::sample(Graph::segment(50), EnergyDistribution::exponential, 2.0, 8);
    WalkParams p;
    p.horizon = 1e-12;
    p.start = StartPolicy::fixed(land.graph().origin());
    const TrapWalk w0(land, p);
    CHECK(w0.simulate(std::uint64_t{3}).jump_count() == 0);

    p.horizon = 100.0;
    const TrapWalk w(land, p);
    const auto a = w.simulate(std::uint64_t{17}), b = w.simulate(std::uint64_t{17});
    CHECK(a.jump_times == b.jump_times);
    CHECK(a.states == b.states);
    REQUIRE(a.jump_count() > 2);
    CHECK(a.position_at(0.0) == land.graph().origin());
    CHECK(a.position_at(a.jump_times[0]) == a.states[1]);
    CHECK(a.position_at(100.0) == a.states.back());
    CHECK_THROWS(a.position_at(101.0));
    for (std::size_t k = 0; k + 1 < a.states.size(); ++k) CHECK(a.states[k] != a.states[k + 1]);
    for (double t : a.jump_times) CHECK(t <= 100.0);
}

TEST_CASE("hypercubes are left to the REM kernel")
{
    const auto land = EnergyLandscape::sample(Graph::hypercube(3), EnergyDistribution::exponential, 2.0, 1);
    CHECK_THROWS_AS(TrapWalk(land, WalkParams{}), std::invalid_argument);
}

TEST_CASE("boundary and event caps raise")
{
    const auto land = with_depths(Graph::segment(1), {1, 1, 1});
    WalkParams p;
    p.start = StartPolicy::fixed(1);
    p.horizon = 100.0;
    const TrapWalk w(land, p);
    CHECK_THROWS_AS(w.simulate(std::uint64_t{1}), BoundaryHit);

    const auto flat = with_depths(Graph::complete(3), {1, 1, 1});
    WalkParams q;
    q.horizon = 1e6;
    q.max_events = 100;
    CHECK_THROWS_AS(TrapWalk(flat, q).simulate(std::uint64_t{1}), EventCapExceeded);
}

TEST_CASE("flat segment occupation matches the matrix exponential")
{
    const Graph g = Graph::segment(10);
    const auto land = with_depths(g, std::vector<double>(21, 1.0));
    WalkParams p;
    p.start = StartPolicy::fixed(g.origin());
    p.boundary = BoundaryPolicy::allow;
    p.horizon = 8.0;
    const TrapWalk w(land, p);
    const Eigen::MatrixXd P = (oracle::generator(land, 0.0, 1.0) * 8.0).exp();
    const int n = 40000;
    std::vector<int> hist(21, 0);
    for (int i = 0; i < n; ++i) ++hist[w.simulate(stream_key(1, "flat", i)).states.back()];
    double chi2 = 0;
    int cells = 0;
    for (Vertex x = 0; x < 21; ++x) {
        const double e = n * P(g.origin(), x);
        if (e < 5) continue;
        chi2 += (hist[x] - e) * (hist[x] - e) / e;
        ++cells;
    }
    // chi-square 99.9% quantile for <= 20 degrees of freedom is below 45.4
    CHECK(cells >= 10);
    CHECK(chi2 < 45.4);
}

TEST_CASE("Complete(3) occupation tends to tau / sum tau")
{
    const auto land = with_depths(Graph::complete(3), {1, 2, 4});
    WalkParams p;
    p.start = StartPolicy::fixed(0);
    p.horizon = 1000.0;
    const TrapWalk w(land, p);
    const int n = 20000;
    std::vector<int> hist(3, 0);
    for (int i = 0; i < n; ++i) ++hist[w.simulate(stream_key(2, "c3", i)).states.back()];
    const double pi[3] = {1.0 / 7, 2.0 / 7, 4.0 / 7};
    for (int x = 0; x < 3; ++x) CHECK(std::abs(hist[x] / double(n) - pi[x]) < 3 * std::sqrt(pi[x] * (1 - pi[x]) / n));
}
