// Serial reference against the OpenMP path for the hot kernels. Both paths
// return identical numbers; only wall time differs.

#include "agelab/fin.hpp"
#include "agelab/ssk.hpp"
#include "agelab/twopoint.hpp"

#include <benchmark/benchmark.h>

using namespace agelab;

namespace {

Execution mode(const benchmark::State& s) { return s.range(0) ? Execution::parallel : Execution::serial; }

void two_point(benchmark::State& state)
{
    TrapEnsemble e;
    e.graph = Graph::segment(1000);
    e.beta = 2.0;
    e.walk.start = StartPolicy::fixed(e.graph.origin());
    e.disorders = 64;
    e.paths_per_disorder = 4;
    e.execution = mode(state);
    const std::vector<double> t{100.0, 1000.0};
    for (auto _ : state) benchmark::DoNotOptimize(sample_two_point(e, 1000.0, t));
}

void ssk_matvec(benchmark::State& state)
{
    const auto J = sample_coupling(1500, 1);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(1500), y(1500);
    for (auto _ : state) {
        matvec(J.A, x, y, mode(state));
        benchmark::DoNotOptimize(y.data());
    }
}

void fin_f(benchmark::State& state)
{
    FinEnsemble e;
    e.disorders = 8;
    e.paths_per_disorder = 20;
    e.execution = mode(state);
    const std::vector<double> theta{0.3, 1.0, 3.0};
    for (auto _ : state) benchmark::DoNotOptimize(estimate_f_theta(theta, e));
}

}  // namespace

// argument: 0 serial, 1 OpenMP
BENCHMARK(two_point)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(ssk_matvec)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(fin_f)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
