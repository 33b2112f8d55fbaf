#pragma once

#include "agelab/analytic.hpp"
#include "agelab/parallel.hpp"
#include "agelab/rng.hpp"
#include "agelab/stats.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace agelab {

/// Atomic speed measure: atoms (x_i, v_i) of a Poisson process on
/// [-L, L] x [v_min, inf) with intensity alpha v^-(1+alpha) dx dv.
struct RandomSpeedMeasure {
    std::vector<double> x;  // strictly increasing
    std::vector<double> v;
    double L = 0.0;
    double v_min = 0.0;
    double alpha = 0.5;
    std::uint64_t seed = 0;

    std::size_t size() const { return x.size(); }
    void validate() const;
    /// x,v
    void write_csv(std::ostream& os) const;
};

class EmptyMeasure : public std::runtime_error {
public:
    EmptyMeasure() : std::runtime_error("speed measure sampled with no atoms; enlarge L or lower v_min") {}
};

RandomSpeedMeasure sample_speed_measure(double L, double v_min, double alpha, std::uint64_t seed);

/// Brownian motion time-changed by an atomic speed measure, as a jump chain on
/// the atoms. From atom i with gaps g_l, g_r the sojourn is v_i times the local
/// time at x_i before exiting (x_{i-1}, x_{i+1}), which is exponential with mean
/// 2 g_l g_r / (g_l + g_r); the exit is to the right with probability
/// g_l / (g_l + g_r). Extreme atoms reflect (sojourn mean 2 v g, always inward)
/// and count as boundary hits.
class FinChain {
public:
    explicit FinChain(const RandomSpeedMeasure& rho);

    const RandomSpeedMeasure& measure() const noexcept { return *rho_; }
    double mean_holding(std::size_t i) const { return mean_hold_[i]; }
    double right_probability(std::size_t i) const { return p_right_[i]; }
    /// Jump rate i -> j (zero unless |i - j| == 1).
    double rate(std::size_t i, std::size_t j) const;
    /// Atoms bracketing the origin (left, right); equal when an atom sits at 0.
    std::pair<std::size_t, std::size_t> bracket() const { return {left_, right_}; }
    /// Probability that the path started at the origin enters at the right bracket.
    double right_entry_probability() const;
    bool is_extreme(std::size_t i) const { return i == 0 || i + 1 == mean_hold_.size(); }

    /// Entry atom drawn by gambler's ruin from the origin.
    std::size_t entry(Rng& rng) const;

    /// Event loop over [0, horizon] from the entry atom. on_jump(s, from, to)
    /// returning false stops early. Returns the state at the stop time.
    /// Throws FinBoundaryError once boundary hits exceed max_boundary_hits.
    template <class OnJump>
    std::size_t run(Rng& rng, double horizon, std::uint64_t max_boundary_hits, std::uint64_t& boundary_hits,
                    OnJump&& on_jump) const;

private:
    const RandomSpeedMeasure* rho_;
    std::vector<double> mean_hold_;
    std::vector<double> p_right_;
    std::size_t left_ = 0, right_ = 0;
};

class FinBoundaryError : public std::runtime_error {
public:
    explicit FinBoundaryError(std::uint64_t hits)
        : std::runtime_error("FIN path reached an extreme atom " + std::to_string(hits) +
                             " times; enlarge the window") {}
};

/// Piecewise-constant path on atom indices: atoms[k] occupied on
/// [jump_times[k-1], jump_times[k]).
struct FinPath {
    std::vector<double> jump_times;
    std::vector<std::size_t> atoms;
    std::size_t entry_atom = 0;
    bool entered_right = false;
    std::uint64_t boundary_hits = 0;
    double duration = 0.0;

    std::size_t atom_at(double s) const;
};

FinPath simulate_fin(const RandomSpeedMeasure& rho, double duration, Rng& rng,
                     std::uint64_t max_boundary_hits = std::numeric_limits<std::uint64_t>::max());

/// Annealed FIN ensemble. Measure d uses stream_key(seed, "fin_measure", d);
/// path p of measure d uses stream (seed, "fin_path", d * paths + p).
/// Observation times are scaled by reference_time: f compares Z(T) with Z(T(1+theta)).
struct FinEnsemble {
    double alpha = 0.5;
    double L = 20.0;
    double v_min = 1e-4;
    std::size_t disorders = 100;
    std::size_t paths_per_disorder = 100;
    std::uint64_t seed = 1;
    double reference_time = 1.0;
    std::uint64_t max_boundary_hits = std::numeric_limits<std::uint64_t>::max();
    Execution execution = Execution::parallel;

    void validate() const;
};

struct FinCurve {
    std::vector<double> theta;
    std::vector<Estimate> f;
    std::uint64_t boundary_hits = 0;
    std::string warning;

    void write_csv(std::ostream& os) const;
};

/// f(theta) = <P(Z(T(1+theta)) = Z(T))>.
FinCurve estimate_f_theta(std::span<const double> theta, const FinEnsemble& ens);

struct FinFTable {
    DistributionTable table;      // F(u) = <P(v(Z(T)) <= u)>
    std::vector<double> stderr;   // per u
    std::vector<double> raw_cdf;  // disorder-averaged empirical CDF of all atom weights
    std::uint64_t boundary_hits = 0;
    std::string warning;

    void write_csv(std::ostream& os) const;
};

FinFTable estimate_F(std::span<const double> u_grid, const FinEnsemble& ens);

}  // namespace agelab

template <class OnJump>
std::size_t agelab::FinChain::run(Rng& rng, double horizon, std::uint64_t max_boundary_hits,
                                  std::uint64_t& boundary_hits, OnJump&& on_jump) const
{
    std::size_t i = entry(rng);
    double s = 0.0;
    for (;;) {
        if (is_extreme(i) && ++boundary_hits > max_boundary_hits) throw FinBoundaryError(boundary_hits);
        s += mean_hold_[i] * rng.exponential(1.0);
        if (s > horizon) return i;
        const std::size_t j = rng.uniform() < p_right_[i] ? i + 1 : i - 1;
        if (!on_jump(s, i, j)) return j;
        i = j;
    }
}
