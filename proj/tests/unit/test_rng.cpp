#include "agelab/parallel.hpp"
#include "agelab/rng.hpp"
#include "agelab/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace agelab;

TEST_CASE("stream keys depend on master, domain and index")
{
    std::set<std::uint64_t> keys;
    for (std::uint64_t m : {1, 2})
        for (const char* d : {"path", "landscape"})
            for (std::uint64_t i = 0; i < 100; ++i) keys.insert(stream_key(m, d, i));
    CHECK(keys.size() == 400);
    CHECK(stream_key(7, "path", 3) == stream_key(7, "path", 3));
}

TEST_CASE("uniforms stay in the open unit interval with the right moments")
{
    Rng rng(42);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        s += u;
        s2 += u * u;
    }
    CHECK(std::abs(s / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(s2 / n - 1.0 / 3) < 0.003);
}

TEST_CASE("below is unbiased over a small range")
{
    Rng rng(5);
    std::vector<int> hits(3, 0);
    const int n = 300000;
    for (int i = 0; i < n; ++i) ++hits[rng.below(3)];
    for (int h : hits) CHECK(std::abs(h / double(n) - 1.0 / 3) < 4 * std::sqrt(2.0 / 9 / n));
}

TEST_CASE("normals have unit variance")
{
    Rng rng(9);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 4 / std::sqrt(double(n)));
    CHECK(std::abs(s2 / n - 1.0) < 4 * std::sqrt(2.0 / n));
}

TEST_CASE("parallel tasks reproduce the serial reference")
{
    auto work = [](Execution ex) {
        std::vector<double> out(257);
        for_each_task(out.size(), ex, [&](std::size_t i) {
            Rng rng = make_stream(11, "task", i);
            double acc = 0;
            for (int k = 0; k < 100; ++k) acc += rng.uniform();
            out[i] = acc;
        });
        return out;
    };
    CHECK(work(Execution::serial) == work(Execution::parallel));
}

TEST_CASE("the lowest failing task's exception is rethrown")
{
    try {
        for_each_task(64, Execution::parallel, [](std::size_t i) {
            if (i == 5 || i == 40) throw std::runtime_error(std::to_string(i));
        });
        FAIL("no exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "5");
    }
}

TEST_CASE("grouped means merge to the pooled estimate")
{
    Rng rng(3);
    std::vector<std::pair<double, std::uint64_t>> groups;
    for (int g = 0; g < 40; ++g) {
        std::uint64_t hits = 0;
        for (int p = 0; p < 25; ++p) hits += rng.uniform() < 0.3;
        groups.push_back({double(hits), 25});
    }
    GroupedMean all, left, right;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        all.add_group(groups[i].first, groups[i].first, groups[i].second);
        (i % 3 ? left : right).add_group(groups[i].first, groups[i].first, groups[i].second);
    }
    left.merge(right);
    const auto a = all.estimate(), b = left.estimate();
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-15));
    CHECK(a.stderr == doctest::Approx(b.stderr).epsilon(1e-12));
    CHECK(a.n == 1000);
}

TEST_CASE("one group gives a binomial standard error")
{
    GroupedMean g;
    g.add_group(30, 30, 100);
    const auto e = g.estimate();
    CHECK(e.value == doctest::Approx(0.3));
    CHECK(e.stderr == doctest::Approx(std::sqrt(0.3 * 0.7 / 99)));
}

TEST_CASE("fits and combined z")
{
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    const std::vector<double> px{1, 10, 100}, py{2, 2 * std::pow(10, -0.5), 2 * std::pow(100, -0.5)};
    CHECK(loglog_fit(px, py).slope == doctest::Approx(-0.5));
    CHECK(combined_z(1.0, 0.3, 2.0, 0.4) == doctest::Approx(2.0));
    CHECK(combined_z(1.0, 0.0, 1.0, 0.0) == 0.0);
}
