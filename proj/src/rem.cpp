#include "agelab/rem.hpp"

#include "agelab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace agelab {

double rem_beta_c() { return std::sqrt(2.0 * std::numbers::ln2); }

RemChain::RemChain(std::shared_ptr<const EnergyLandscape> landscape, double beta, double E)
    : landscape_(std::move(landscape)), beta_(beta), E_(E)
{
    if (!landscape_) throw std::invalid_argument("REM chain needs a landscape");
    const Graph& g = landscape_->graph();
    if (g.kind() != GraphKind::hypercube) throw std::invalid_argument("REM chain needs a hypercube landscape");
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    n_ = static_cast<int>(g.param());
    threshold_ = rem_threshold(n_, E);
    const std::size_t size = g.vertex_count();
    in_top_.assign(size, 0);
    exit_.resize(size);
    const double scale = beta * std::sqrt(static_cast<double>(n_));
    for (std::size_t s = 0; s < size; ++s) {
        const double e = landscape_->energy(static_cast<Vertex>(s));
        exit_[s] = std::exp(-scale * std::max(e, 0.0));
        if (e >= threshold_) {
            in_top_[s] = 1;
            top_.push_back(static_cast<Vertex>(s));
        }
    }
}

RemChain RemChain::sample(int n_spins, double beta, double E, std::uint64_t seed)
{
    auto land = std::make_shared<const EnergyLandscape>(
        EnergyLandscape::sample(Graph::hypercube(n_spins), EnergyDistribution::gaussian, beta, seed));
    return RemChain(std::move(land), beta, E);
}

double RemChain::time_scale() const { return std::exp(beta_ * std::sqrt(static_cast<double>(n_)) * threshold_); }

Vertex rem_transition(const RemChain& chain, Vertex sigma, Rng& rng)
{
    if (sigma >= chain.landscape().graph().vertex_count()) throw std::out_of_range("vertex outside hypercube");
    if (rng.uniform() >= chain.exit_probability(sigma)) return sigma;
    return sigma ^ (Vertex{1} << rng.below(static_cast<std::uint64_t>(chain.n_spins())));
}

std::uint64_t geometric_sojourn(double p, Rng& rng)
{
    constexpr auto never = std::numeric_limits<std::uint64_t>::max();
    if (p >= 1.0) return 1;
    if (!(p > 0.0)) return never;
    const double k = std::floor(std::log(rng.uniform()) / std::log1p(-p));
    if (!(k < 1.8e19)) return never;
    return 1 + static_cast<std::uint64_t>(k);
}

Vertex RemTrajectory::state_at(std::uint64_t k) const
{
    if (k > n_steps) throw std::out_of_range("step outside REM trajectory");
    const auto i = std::upper_bound(jump_steps.begin(), jump_steps.end(), k) - jump_steps.begin();
    return states[static_cast<std::size_t>(i)];
}

RemTrajectory simulate_rem_from(const RemChain& chain, Vertex start, std::uint64_t n_steps, Rng& rng,
                                std::uint64_t max_jumps)
{
    RemTrajectory tr;
    tr.n_steps = n_steps;
    tr.states.push_back(start);
    run_rem(chain, start, n_steps, max_jumps, rng, [&](std::uint64_t k, Vertex, Vertex to) {
        tr.jump_steps.push_back(k);
        tr.states.push_back(to);
        return true;
    });
    return tr;
}

RemTrajectory simulate_rem(const RemChain& chain, std::uint64_t n_steps, Rng& rng, std::uint64_t max_jumps)
{
    if (chain.top().empty()) throw EmptyTop();
    const Vertex start = chain.top()[rng.below(chain.top().size())];
    return simulate_rem_from(chain, start, n_steps, rng, max_jumps);
}

namespace {

// Per path: first step k > n at which a jump lands in the top set (max if none).
std::uint64_t first_top_entry_after(const RemChain& chain, std::uint64_t n, std::uint64_t horizon,
                                    std::uint64_t max_jumps, Rng& rng)
{
    const Vertex start = chain.top()[rng.below(chain.top().size())];
    std::uint64_t entry = std::numeric_limits<std::uint64_t>::max();
    run_rem(chain, start, horizon, max_jumps, rng, [&](std::uint64_t k, Vertex, Vertex to) {
        if (k > n && chain.in_top(to)) {
            entry = k;
            return false;
        }
        return true;
    });
    return entry;
}

std::uint64_t checked_horizon(std::uint64_t n, std::span<const std::uint64_t> m)
{
    std::uint64_t mx = 0;
    for (auto x : m) mx = std::max(mx, x);
    if (mx > std::numeric_limits<std::uint64_t>::max() - n) throw std::overflow_error("REM step window overflows");
    return n + mx;
}

void count_chain(const RemChain& chain, std::uint64_t n, std::span<const std::uint64_t> m, std::size_t first,
                 std::size_t paths, std::uint64_t seed, std::uint64_t max_jumps, std::vector<std::uint64_t>& hits)
{
    const std::uint64_t horizon = checked_horizon(n, m);
    hits.assign(m.size(), 0);
    for (std::size_t p = first; p < first + paths; ++p) {
        Rng rng = make_stream(seed, "rem_path", p);
        const std::uint64_t entry = first_top_entry_after(chain, n, horizon, max_jumps, rng);
        for (std::size_t j = 0; j < m.size(); ++j) hits[j] += entry > n + m[j];
    }
}

}  // namespace

RemPiTable estimate_Pi_N(const RemChain& chain, std::uint64_t n, std::span<const std::uint64_t> m,
                         std::size_t paths, std::uint64_t seed, Execution ex, std::uint64_t max_jumps)
{
    if (chain.top().empty()) throw EmptyTop();
    if (paths == 0) throw std::invalid_argument("need >= 1 path");
    constexpr std::size_t chunk = 256;
    const std::size_t tasks = (paths + chunk - 1) / chunk;
    std::vector<std::vector<std::uint64_t>> hits(tasks);
    for_each_task(tasks, ex, [&](std::size_t t) {
        const std::size_t first = t * chunk;
        count_chain(chain, n, m, first, std::min(chunk, paths - first), seed, max_jumps, hits[t]);
    });
    RemPiTable out;
    out.n = n;
    out.m.assign(m.begin(), m.end());
    out.disorders_used = 1;
    for (std::size_t j = 0; j < m.size(); ++j) {
        std::uint64_t total = 0;
        for (const auto& h : hits) total += h[j];
        GroupedMean acc;
        acc.add_group(static_cast<double>(total), static_cast<double>(total), paths);
        out.Pi.push_back(acc.estimate());
    }
    return out;
}

RemPiTable estimate_Pi_N(const RemEnsemble& ens, std::uint64_t n, std::span<const std::uint64_t> m)
{
    if (ens.paths_per_disorder == 0 || ens.disorders == 0) throw std::invalid_argument("REM ensemble must be non-empty");
    std::vector<std::vector<std::uint64_t>> hits(ens.disorders);
    std::vector<std::uint8_t> empty(ens.disorders, 0);
    for_each_task(ens.disorders, ens.execution, [&](std::size_t d) {
        const RemChain chain = RemChain::sample(ens.n_spins, ens.beta, ens.E, stream_key(ens.seed, "rem_landscape", d));
        if (chain.top().empty()) {
            empty[d] = 1;
            return;
        }
        const std::uint64_t path_seed = stream_key(ens.seed, "rem_disorder", d);
        count_chain(chain, n, m, 0, ens.paths_per_disorder, path_seed, ens.max_jumps, hits[d]);
    });
    RemPiTable out;
    out.n = n;
    out.m.assign(m.begin(), m.end());
    for (std::size_t d = 0; d < ens.disorders; ++d) (empty[d] ? out.empty_top_disorders : out.disorders_used)++;
    for (std::size_t j = 0; j < m.size(); ++j) {
        GroupedMean acc;
        for (std::size_t d = 0; d < ens.disorders; ++d) {
            if (empty[d]) continue;
            const auto c = static_cast<double>(hits[d][j]);
            acc.add_group(c, c, ens.paths_per_disorder);
        }
        out.Pi.push_back(acc.estimate());
    }
    if (out.disorders_used == 0) throw EmptyTop();
    return out;
}

double RemRatioReport::max_deviation() const
{
    double d = 0.0;
    for (const auto& r : rows)
        if (r.feasible) d = std::max(d, std::abs(r.ratio - 1.0));
    return d;
}

void RemRatioReport::write_csv(std::ostream& os, bool header) const
{
    if (header) os << "N,beta,E,t_w,theta,Pi_N,H_theta,ratio,stderr\n";
    os.precision(17);
    for (const auto& r : rows) {
        os << n_spins << ',' << beta << ',' << E << ',' << t_w << ',' << r.theta << ',';
        if (r.feasible)
            os << r.Pi << ',' << r.H << ',' << r.ratio << ',' << r.stderr << '\n';
        else
            os << "nan," << r.H << ",nan,nan\n";
    }
}

RemRatioReport rescaled_aging_check(const RemEnsemble& ens, std::span<const double> theta, double t_w)
{
    if (!(t_w > 0.0)) throw std::invalid_argument("t_w must be > 0");
    if (!(ens.beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    const double c = std::exp(ens.beta * std::sqrt(static_cast<double>(ens.n_spins)) * rem_threshold(ens.n_spins, ens.E));
    const double alpha = rem_beta_c() / ens.beta;
    if (!(alpha < 1.0)) throw std::invalid_argument("rescaled aging check needs beta > beta_c");

    RemRatioReport rep;
    rep.n_spins = ens.n_spins;
    rep.beta = ens.beta;
    rep.E = ens.E;
    rep.t_w = t_w;
    rep.c = c;
    constexpr double step_cap = 9.0e18;
    const double n_real = std::round(c * t_w);
    std::vector<std::uint64_t> m;
    std::vector<std::size_t> feasible;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        RemRatioRow row;
        row.theta = theta[i];
        row.H = H_theta(theta[i], alpha);
        const double m_real = std::round(c * theta[i] * t_w);
        row.feasible = n_real + m_real < step_cap;
        if (row.feasible) {
            feasible.push_back(i);
            m.push_back(static_cast<std::uint64_t>(m_real));
        }
        rep.rows.push_back(row);
    }
    if (feasible.empty() || !(n_real < step_cap)) {
        for (auto& r : rep.rows) r.feasible = false;
        return rep;
    }
    const RemPiTable tab = estimate_Pi_N(ens, static_cast<std::uint64_t>(n_real), m);
    rep.empty_top_disorders = tab.empty_top_disorders;
    for (std::size_t j = 0; j < feasible.size(); ++j) {
        auto& row = rep.rows[feasible[j]];
        row.Pi = tab.Pi[j].value;
        row.stderr = tab.Pi[j].stderr;
        row.ratio = row.Pi / row.H;
    }
    return rep;
}

double expected_top_size(int n_spins, double E)
{
    const double u = rem_threshold(n_spins, E);
    return std::ldexp(0.5 * std::erfc(u / std::numbers::sqrt2), n_spins);
}

}  // namespace agelab
