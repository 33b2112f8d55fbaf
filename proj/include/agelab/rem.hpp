#pragma once

#include "agelab/landscape.hpp"
#include "agelab/parallel.hpp"
#include "agelab/rng.hpp"
#include "agelab/stats.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace agelab {

/// sqrt(2 ln 2).
double rem_beta_c();

/// Discrete-time REM dynamics on the hypercube: from sigma, leave with
/// probability exp(-beta sqrt(N) E_sigma^+) to a uniform single-flip
/// neighbour, otherwise stay.
class RemChain {
public:
    RemChain(std::shared_ptr<const EnergyLandscape> landscape, double beta, double E);
    /// Fresh Gaussian landscape on Hypercube(N) from `seed`.
    static RemChain sample(int n_spins, double beta, double E, std::uint64_t seed);

    int n_spins() const noexcept { return n_; }
    double beta() const noexcept { return beta_; }
    double E() const noexcept { return E_; }
    double threshold() const noexcept { return threshold_; }
    const EnergyLandscape& landscape() const noexcept { return *landscape_; }
    std::span<const Vertex> top() const noexcept { return top_; }
    bool in_top(Vertex s) const { return in_top_[s] != 0; }
    double exit_probability(Vertex s) const { return exit_[s]; }
    /// c = exp(beta sqrt(N) u_N(E)).
    double time_scale() const;
    /// alpha = beta_c / beta, the index of the limiting complete-graph model.
    double alpha() const { return rem_beta_c() / beta_; }

private:
    std::shared_ptr<const EnergyLandscape> landscape_;
    int n_;
    double beta_, E_, threshold_;
    std::vector<Vertex> top_;
    std::vector<std::uint8_t> in_top_;
    std::vector<double> exit_;
};

/// One step of the kernel.
Vertex rem_transition(const RemChain& chain, Vertex sigma, Rng& rng);

class EmptyTop : public std::runtime_error {
public:
    EmptyTop() : std::runtime_error("REM top set is empty") {}
};

class StepBudgetExceeded : public std::runtime_error {
public:
    explicit StepBudgetExceeded(std::uint64_t cap)
        : std::runtime_error("REM jump budget of " + std::to_string(cap) + " exceeded") {}
};

/// Length of the sojourn at a state with exit probability p, Geometric on {1, 2, ...}.
std::uint64_t geometric_sojourn(double p, Rng& rng);

/// Accelerated event loop: on_jump(k, from, to) for every jump landing at step
/// k <= n_steps, in order; returning false stops early. Returns the final state.
template <class OnJump>
Vertex run_rem(const RemChain& chain, Vertex start, std::uint64_t n_steps, std::uint64_t max_jumps, Rng& rng,
               OnJump&& on_jump);

/// states[k] is occupied on steps [jump_steps[k-1], jump_steps[k]).
struct RemTrajectory {
    std::vector<std::uint64_t> jump_steps;
    std::vector<Vertex> states;
    std::uint64_t n_steps = 0;

    Vertex state_at(std::uint64_t k) const;
};

/// Start uniform over the top set (EmptyTop when it is empty).
RemTrajectory simulate_rem(const RemChain& chain, std::uint64_t n_steps, Rng& rng,
                           std::uint64_t max_jumps = 1'000'000'000);
RemTrajectory simulate_rem_from(const RemChain& chain, Vertex start, std::uint64_t n_steps, Rng& rng,
                                std::uint64_t max_jumps = 1'000'000'000);

/// Disorder d uses landscape seed stream_key(seed, "rem_landscape", d); its
/// path p uses stream (stream_key(seed, "rem_disorder", d), "rem_path", p).
/// Disorders with an empty top are skipped and counted.
struct RemEnsemble {
    int n_spins = 8;
    double beta = 2.0;
    double E = -3.0;
    std::size_t disorders = 32;
    std::size_t paths_per_disorder = 256;
    std::uint64_t seed = 1;
    std::uint64_t max_jumps = 1'000'000'000;
    Execution execution = Execution::parallel;
};

struct RemPiTable {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> m;
    std::vector<Estimate> Pi;
    std::size_t disorders_used = 0;
    std::size_t empty_top_disorders = 0;
};

/// Pi_N(n, n + m) = P(no top-to-top transition landing at any step k with
/// n < k <= n + m), start uniform on the top. A transition is any jump into
/// the top set, from outside it or from another top state; leaving a top
/// state and coming back counts.
RemPiTable estimate_Pi_N(const RemEnsemble& ens, std::uint64_t n, std::span<const std::uint64_t> m);
/// Same, on one fixed chain.
RemPiTable estimate_Pi_N(const RemChain& chain, std::uint64_t n, std::span<const std::uint64_t> m,
                         std::size_t paths, std::uint64_t seed, Execution ex = Execution::parallel,
                         std::uint64_t max_jumps = 1'000'000'000);

struct RemRatioRow {
    double theta = 0.0;
    double Pi = 0.0;
    double stderr = 0.0;
    double H = 0.0;
    double ratio = 0.0;
    bool feasible = true;
};

struct RemRatioReport {
    int n_spins = 0;
    double beta = 0.0;
    double E = 0.0;
    double t_w = 0.0;
    double c = 0.0;
    std::vector<RemRatioRow> rows;
    std::size_t empty_top_disorders = 0;

    /// max over feasible rows of |ratio - 1|.
    double max_deviation() const;
    /// N,beta,E,t_w,theta,Pi_N,H_theta,ratio,stderr
    void write_csv(std::ostream& os, bool header = true) const;
};

/// Pi_N(c t_w, c (t_w + theta t_w)) / H(theta) with alpha = beta_c / beta.
/// Cells whose rescaled step count overflows are marked infeasible.
RemRatioReport rescaled_aging_check(const RemEnsemble& ens, std::span<const double> theta, double t_w);

/// 2^N Q(u_N(E)), the expected top size.
double expected_top_size(int n_spins, double E);

}  // namespace agelab

template <class OnJump>
agelab::Vertex agelab::run_rem(const RemChain& chain, Vertex start, std::uint64_t n_steps, std::uint64_t max_jumps,
                               Rng& rng, OnJump&& on_jump)
{
    const auto n = static_cast<std::uint64_t>(chain.n_spins());
    Vertex s = start;
    std::uint64_t k = 0, jumps = 0;
    for (;;) {
        const std::uint64_t stay = geometric_sojourn(chain.exit_probability(s), rng);
        if (stay > n_steps - k) return s;
        k += stay;
        if (++jumps > max_jumps) throw StepBudgetExceeded(max_jumps);
        const Vertex next = s ^ (Vertex{1} << rng.below(n));
        if (!on_jump(k, s, next)) return next;
        s = next;
    }
}
