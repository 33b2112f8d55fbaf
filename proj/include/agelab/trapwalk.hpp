#pragma once

#include "agelab/graph.hpp"
#include "agelab/landscape.hpp"
#include "agelab/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace agelab {

struct StartPolicy {
    enum class Kind { fixed, uniform };
    Kind kind = Kind::fixed;
    Vertex vertex = 0;

    static StartPolicy fixed(Vertex v) { return {Kind::fixed, v}; }
    static StartPolicy uniform() { return {Kind::uniform, 0}; }
};

/// What happens when a segment walk reaches an endpoint. `error` raises
/// BoundaryHit so that finite-size contamination of Z runs cannot go unnoticed;
/// `allow` treats the segment as an ordinary finite graph (endpoint degree 1).
enum class BoundaryPolicy { error, allow };

struct WalkParams {
    double a = 0.0;   // symmetry index in [0, 1]
    double nu = 1.0;  // time scale
    double horizon = 1.0;
    StartPolicy start{};
    BoundaryPolicy boundary = BoundaryPolicy::error;
    std::uint64_t max_events = 1'000'000'000;

    void validate() const;
};

class BoundaryHit : public std::runtime_error {
public:
    BoundaryHit(Vertex v, double t);
    Vertex vertex;
    double time;
};

class EventCapExceeded : public std::runtime_error {
public:
    explicit EventCapExceeded(std::uint64_t cap);
};

/// Piecewise-constant right-continuous path: states[k] is occupied on
/// [jump_times[k-1], jump_times[k]) with jump_times[-1] = 0.
struct Trajectory {
    std::vector<double> jump_times;
    std::vector<Vertex> states;
    double horizon = 0.0;
    std::uint64_t landscape_seed = 0;
    std::uint64_t path_seed = 0;

    Vertex position_at(double t) const;
    std::size_t jump_count() const noexcept { return jump_times.size(); }
};

struct Step {
    double holding_time;
    Vertex next;
};

/// Bouchaud's continuous-time chain with rates
///   w(x,y) = nu * tau(x)^{-(1-a)} * tau(y)^a    for neighbours x ~ y,
/// simulated exactly, event by event. Holds a reference to the landscape.
class TrapWalk {
public:
    TrapWalk(const EnergyLandscape& landscape, WalkParams params);

    const EnergyLandscape& landscape() const noexcept { return *landscape_; }
    const WalkParams& params() const noexcept { return params_; }

    double rate(Vertex x, Vertex y) const { return exit_scale_[x] * pow_a_[y]; }
    std::vector<std::pair<Vertex, double>> jump_rates(Vertex x) const;
    double total_rate(Vertex x) const { return total_[x]; }

    Step step(Vertex x, Rng& rng) const;
    Vertex start_vertex(Rng& rng) const;

    /// Runs one path until `horizon`, calling on_jump(time, from, to) for every
    /// jump; stops early when on_jump returns false. Returns the final state.
    template <class OnJump>
    Vertex run(Rng& rng, double horizon, OnJump&& on_jump) const;

    Trajectory simulate(Rng& rng) const;
    /// Path drawn from Rng(path_seed); same seeds give the same trajectory.
    Trajectory simulate(std::uint64_t path_seed) const;

private:
    Vertex sample_next(Vertex x, Rng& rng) const;
    bool at_boundary(Vertex v) const noexcept
    {
        return is_segment_ && (v == 0 || v + 1 == landscape_->graph().vertex_count());
    }

    const EnergyLandscape* landscape_;
    WalkParams params_;
    bool is_segment_;
    std::vector<double> exit_scale_;  // nu * tau(x)^{-(1-a)}
    std::vector<double> pow_a_;       // tau(y)^a
    std::vector<double> total_;       // sum_y w(x,y)
    std::vector<double> prefix_;      // complete graph, a > 0: prefix sums of pow_a
};

template <class OnJump>
Vertex TrapWalk::run(Rng& rng, double horizon, OnJump&& on_jump) const
{
    Vertex x = start_vertex(rng);
    if (params_.boundary == BoundaryPolicy::error && at_boundary(x)) throw BoundaryHit(x, 0.0);
    double t = 0.0;
    std::uint64_t events = 0;
    while (total_[x] > 0.0) {
        const Step s = step(x, rng);
        t += s.holding_time;
        if (t > horizon) break;
        if (++events > params_.max_events) throw EventCapExceeded(params_.max_events);
        if (params_.boundary == BoundaryPolicy::error && at_boundary(s.next)) throw BoundaryHit(s.next, t);
        const Vertex from = x;
        x = s.next;
        if (!on_jump(t, from, x)) break;
    }
    return x;
}

}  // namespace agelab
