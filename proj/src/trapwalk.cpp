#include "agelab/trapwalk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace agelab {

void WalkParams::validate() const
{
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("symmetry index a must lie in [0,1]");
    if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (max_events == 0) throw std::invalid_argument("max_events must be positive");
}

BoundaryHit::BoundaryHit(Vertex v, double t)
    : std::runtime_error("walk reached segment endpoint " + std::to_string(v) + " at t=" + std::to_string(t)),
      vertex(v), time(t)
{
}

EventCapExceeded::EventCapExceeded(std::uint64_t cap)
    : std::runtime_error("trajectory exceeded event cap " + std::to_string(cap))
{
}

Vertex Trajectory::position_at(double t) const
{
    if (t < 0.0 || t > horizon) throw std::out_of_range("time outside [0, horizon]");
    // right-continuous: a jump at exactly t has already happened
    const auto k = std::upper_bound(jump_times.begin(), jump_times.end(), t) - jump_times.begin();
    return states[static_cast<std::size_t>(k)];
}

TrapWalk::TrapWalk(const EnergyLandscape& landscape, WalkParams params)
    : landscape_(&landscape), params_(params),
      is_segment_(landscape.graph().kind() == GraphKind::segment)
{
    params_.validate();
    const Graph& g = landscape.graph();
    if (g.kind() == GraphKind::hypercube)
        throw std::invalid_argument("hypercube dynamics are REM dynamics; use the rem module");
    if (params_.start.kind == StartPolicy::Kind::fixed && params_.start.vertex >= g.vertex_count())
        throw std::out_of_range("start vertex out of range");

    const std::size_t n = g.vertex_count();
    const double beta = landscape.beta();
    const double a = params_.a;
    exit_scale_.resize(n);
    pow_a_.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
        const double e = landscape.energy(static_cast<Vertex>(x));
        exit_scale_[x] = params_.nu * std::exp(-(1.0 - a) * beta * e);
        pow_a_[x] = a == 0.0 ? 1.0 : std::exp(a * beta * e);
    }

    total_.assign(n, 0.0);
    if (g.kind() == GraphKind::complete) {
        double sum = 0.0;
        if (a != 0.0) {
            prefix_.resize(n + 1);
            prefix_[0] = 0.0;
            for (std::size_t y = 0; y < n; ++y) prefix_[y + 1] = prefix_[y] + pow_a_[y];
            sum = prefix_[n];
        } else {
            sum = static_cast<double>(n);
        }
        for (std::size_t x = 0; x < n; ++x) total_[x] = exit_scale_[x] * (sum - pow_a_[x]);
    } else {
        for (std::size_t x = 0; x < n; ++x) {
            double s = 0.0;
            g.for_each_neighbor(static_cast<Vertex>(x), [&](Vertex y) { s += pow_a_[y]; });
            total_[x] = exit_scale_[x] * s;
        }
    }
}

std::vector<std::pair<Vertex, double>> TrapWalk::jump_rates(Vertex x) const
{
    const Graph& g = landscape_->graph();
    if (x >= g.vertex_count()) throw std::out_of_range("vertex out of range");
    std::vector<std::pair<Vertex, double>> out;
    for (Vertex y : g.neighbors(x)) out.emplace_back(y, rate(x, y));
    return out;
}

Vertex TrapWalk::start_vertex(Rng& rng) const
{
    if (params_.start.kind == StartPolicy::Kind::fixed) return params_.start.vertex;
    return static_cast<Vertex>(rng.below(landscape_->graph().vertex_count()));
}

Step TrapWalk::step(Vertex x, Rng& rng) const
{
    const double w = total_[x];
    if (!(w > 0.0)) throw std::runtime_error("isolated vertex " + std::to_string(x) + " has zero exit rate");
    const double hold = rng.exponential(w);
    return {hold, sample_next(x, rng)};
}

Vertex TrapWalk::sample_next(Vertex x, Rng& rng) const
{
    const Graph& g = landscape_->graph();
    if (g.kind() == GraphKind::complete) {
        const auto n = static_cast<std::uint64_t>(g.vertex_count());
        if (params_.a == 0.0) {
            const auto j = static_cast<Vertex>(rng.below(n - 1));
            return j < x ? j : j + 1;
        }
        // inverse CDF over all vertices but x
        const double mass_x = pow_a_[x];
        double target = rng.uniform() * (prefix_[n] - mass_x);
        if (target >= prefix_[x]) target += mass_x;
        auto it = std::upper_bound(prefix_.begin() + 1, prefix_.end(), target);
        auto y = static_cast<Vertex>(std::min<std::ptrdiff_t>(it - prefix_.begin() - 1, static_cast<std::ptrdiff_t>(n - 1)));
        if (y == x) y = x + 1 < n ? x + 1 : x - 1;  // rounding at the excluded cell
        return y;
    }

    if (params_.a == 0.0) {
        const std::size_t deg = g.kind() == GraphKind::segment ? (x > 0) + (x + 1 < g.vertex_count()) : 4;
        std::size_t pick = rng.below(deg);
        Vertex chosen = x;
        g.for_each_neighbor(x, [&](Vertex y) {
            if (pick-- == 0) chosen = y;
        });
        return chosen;
    }

    double s = 0.0;
    g.for_each_neighbor(x, [&](Vertex y) { s += pow_a_[y]; });
    double target = rng.uniform() * s;
    Vertex chosen = x;
    g.for_each_neighbor(x, [&](Vertex y) {
        if (chosen != x) return;
        target -= pow_a_[y];
        if (target < 0.0) chosen = y;
    });
    if (chosen == x) g.for_each_neighbor(x, [&](Vertex y) { chosen = y; });  // rounding: take the last
    return chosen;
}

Trajectory TrapWalk::simulate(Rng& rng) const
{
    Trajectory tr;
    tr.horizon = params_.horizon;
    tr.landscape_seed = landscape_->seed();
    bool first = true;
    const Vertex last = run(rng, params_.horizon, [&](double t, Vertex from, Vertex to) {
        if (first) {
            tr.states.push_back(from);
            first = false;
        }
        tr.jump_times.push_back(t);
        tr.states.push_back(to);
        return true;
    });
    if (first) tr.states.push_back(last);
    return tr;
}

Trajectory TrapWalk::simulate(std::uint64_t path_seed) const
{
    Rng rng(path_seed);
    Trajectory tr = simulate(rng);
    tr.path_seed = path_seed;
    return tr;
}

}  // namespace agelab
