#include "agelab/fin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

namespace agelab {

void RandomSpeedMeasure::validate() const
{
    if (x.size() != v.size()) throw std::invalid_argument("speed measure columns differ in length");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i > 0 && !(x[i] > x[i - 1])) throw std::invalid_argument("atom positions must increase strictly");
        if (!(v[i] > 0.0) || v[i] < v_min) throw std::invalid_argument("atom weight below cutoff");
        if (L > 0.0 && (x[i] < -L || x[i] > L)) throw std::invalid_argument("atom outside window");
    }
}

void RandomSpeedMeasure::write_csv(std::ostream& os) const
{
    os << "x,v\n";
    os.precision(17);
    for (std::size_t i = 0; i < x.size(); ++i) os << x[i] << ',' << v[i] << '\n';
}

RandomSpeedMeasure sample_speed_measure(double L, double v_min, double alpha, std::uint64_t seed)
{
    if (!(L > 0.0) || !(v_min > 0.0)) throw std::invalid_argument("speed measure needs L > 0 and v_min > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    Rng rng(seed);
    const double mean = 2.0 * L * std::pow(v_min, -alpha);
    std::poisson_distribution<std::uint64_t> count(mean);
    const std::uint64_t n = count(rng);
    if (n == 0) throw EmptyMeasure();
    std::vector<std::pair<double, double>> atoms(n);
    for (auto& [x, v] : atoms) {
        x = -L + 2.0 * L * rng.uniform();
        v = v_min * std::pow(rng.uniform(), -1.0 / alpha);
    }
    std::sort(atoms.begin(), atoms.end());
    RandomSpeedMeasure rho;
    rho.L = L;
    rho.v_min = v_min;
    rho.alpha = alpha;
    rho.seed = seed;
    rho.x.reserve(n);
    rho.v.reserve(n);
    for (const auto& [x, v] : atoms) {
        if (!rho.x.empty() && x == rho.x.back()) continue;  // measure-zero tie
        rho.x.push_back(x);
        rho.v.push_back(v);
    }
    return rho;
}

FinChain::FinChain(const RandomSpeedMeasure& rho) : rho_(&rho)
{
    const std::size_t n = rho.size();
    if (n < 2) throw std::invalid_argument("FIN chain needs at least 2 atoms");
    if (!(rho.x.front() <= 0.0 && rho.x.back() >= 0.0) || rho.x.front() == 0.0 || rho.x.back() == 0.0)
        throw std::invalid_argument("origin must lie strictly inside the atoms' hull");
    mean_hold_.resize(n);
    p_right_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            mean_hold_[i] = rho.v[i] * 2.0 * (rho.x[1] - rho.x[0]);
            p_right_[i] = 1.0;
        } else if (i + 1 == n) {
            mean_hold_[i] = rho.v[i] * 2.0 * (rho.x[i] - rho.x[i - 1]);
            p_right_[i] = 0.0;
        } else {
            const double gl = rho.x[i] - rho.x[i - 1];
            const double gr = rho.x[i + 1] - rho.x[i];
            mean_hold_[i] = rho.v[i] * 2.0 * gl * gr / (gl + gr);
            p_right_[i] = gl / (gl + gr);
        }
    }
    const auto it = std::lower_bound(rho.x.begin(), rho.x.end(), 0.0);
    right_ = static_cast<std::size_t>(it - rho.x.begin());
    left_ = *it == 0.0 ? right_ : right_ - 1;
}

double FinChain::rate(std::size_t i, std::size_t j) const
{
    if (j == i + 1) return p_right_[i] / mean_hold_[i];
    if (i > 0 && j == i - 1) return (1.0 - p_right_[i]) / mean_hold_[i];
    return 0.0;
}

double FinChain::right_entry_probability() const
{
    if (left_ == right_) return 1.0;
    const double xl = rho_->x[left_], xr = rho_->x[right_];
    return -xl / (xr - xl);
}

std::size_t FinChain::entry(Rng& rng) const
{
    if (left_ == right_) return left_;
    return rng.uniform() < right_entry_probability() ? right_ : left_;
}

std::size_t FinPath::atom_at(double s) const
{
    if (!(s >= 0.0 && s <= duration)) throw std::out_of_range("time outside FIN path");
    const auto k = std::upper_bound(jump_times.begin(), jump_times.end(), s) - jump_times.begin();
    return atoms[static_cast<std::size_t>(k)];
}

FinPath simulate_fin(const RandomSpeedMeasure& rho, double duration, Rng& rng, std::uint64_t max_boundary_hits)
{
    if (!(duration >= 0.0)) throw std::invalid_argument("duration must be >= 0");
    const FinChain chain(rho);
    FinPath path;
    path.duration = duration;
    // peek the entry with a copy so run() draws the same one
    Rng peek = rng;
    path.entry_atom = chain.entry(peek);
    path.entered_right = path.entry_atom == chain.bracket().second && chain.bracket().first != chain.bracket().second;
    path.atoms.push_back(path.entry_atom);
    chain.run(rng, duration, max_boundary_hits, path.boundary_hits, [&](double s, std::size_t, std::size_t to) {
        path.jump_times.push_back(s);
        path.atoms.push_back(to);
        return true;
    });
    return path;
}

void FinEnsemble::validate() const
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(L > 0.0) || !(v_min > 0.0)) throw std::invalid_argument("FIN window needs L > 0 and v_min > 0");
    if (disorders == 0 || paths_per_disorder == 0) throw std::invalid_argument("FIN ensemble must be non-empty");
    if (!(reference_time > 0.0)) throw std::invalid_argument("reference_time must be > 0");
}

namespace {

// Samples a measure for disorder d that admits a chain; resampling under a
// counter keeps the stream deterministic.
RandomSpeedMeasure measure_for(const FinEnsemble& ens, std::size_t d)
{
    for (std::uint64_t attempt = 0;; ++attempt) {
        const auto key = stream_key(ens.seed, "fin_measure", (static_cast<std::uint64_t>(d) << 8) | attempt);
        try {
            auto rho = sample_speed_measure(ens.L, ens.v_min, ens.alpha, key);
            if (rho.size() >= 2 && rho.x.front() < 0.0 && rho.x.back() > 0.0) return rho;
        } catch (const EmptyMeasure&) {
        }
        if (attempt == 255) throw EmptyMeasure();
    }
}

// Atom occupied at each of the sorted probe times.
void probe_fin(const FinChain& chain, Rng& rng, std::span<const double> probes, std::uint64_t max_hits,
               std::uint64_t& hits, std::vector<std::size_t>& at)
{
    at.assign(probes.size(), 0);
    std::size_t k = 0;
    const std::size_t last = chain.run(rng, probes.back(), max_hits, hits, [&](double s, std::size_t from, std::size_t) {
        while (k < probes.size() && probes[k] < s) at[k++] = from;
        return k < probes.size();
    });
    while (k < probes.size()) at[k++] = last;
}

std::string boundary_warning(std::uint64_t hits)
{
    if (hits == 0) return {};
    return "window inadequate: " + std::to_string(hits) + " boundary hits";
}

}  // namespace

FinCurve estimate_f_theta(std::span<const double> theta, const FinEnsemble& ens)
{
    ens.validate();
    for (double th : theta)
        if (!(th >= 0.0)) throw std::invalid_argument("theta must be >= 0");
    std::vector<std::size_t> order(theta.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return theta[a] < theta[b]; });
    std::vector<double> probes{ens.reference_time};
    for (auto i : order) probes.push_back(ens.reference_time * (1.0 + theta[i]));

    const std::size_t m = theta.size();
    std::vector<std::vector<std::uint64_t>> same(ens.disorders);
    std::vector<std::uint64_t> hits(ens.disorders, 0);
    for_each_task(ens.disorders, ens.execution, [&](std::size_t d) {
        const auto rho = measure_for(ens, d);
        const FinChain chain(rho);
        auto& c = same[d];
        c.assign(m, 0);
        std::vector<std::size_t> at;
        for (std::size_t p = 0; p < ens.paths_per_disorder; ++p) {
            Rng rng = make_stream(ens.seed, "fin_path", d * ens.paths_per_disorder + p);
            probe_fin(chain, rng, probes, ens.max_boundary_hits, hits[d], at);
            for (std::size_t j = 0; j < m; ++j) c[order[j]] += at[j + 1] == at[0];
        }
    });

    FinCurve out;
    out.theta.assign(theta.begin(), theta.end());
    for (std::size_t j = 0; j < m; ++j) {
        GroupedMean acc;
        for (std::size_t d = 0; d < ens.disorders; ++d) {
            const auto c = static_cast<double>(same[d][j]);
            acc.add_group(c, c, ens.paths_per_disorder);
        }
        out.f.push_back(acc.estimate());
    }
    for (auto h : hits) out.boundary_hits += h;
    out.warning = boundary_warning(out.boundary_hits);
    return out;
}

void FinCurve::write_csv(std::ostream& os) const
{
    os << "theta,f,stderr,n_paths\n";
    os.precision(17);
    for (std::size_t j = 0; j < theta.size(); ++j)
        os << theta[j] << ',' << f[j].value << ',' << f[j].stderr << ',' << f[j].n << '\n';
}

FinFTable estimate_F(std::span<const double> u_grid, const FinEnsemble& ens)
{
    ens.validate();
    for (std::size_t k = 0; k < u_grid.size(); ++k)
        if (!(u_grid[k] > 0.0) || (k > 0 && !(u_grid[k] > u_grid[k - 1])))
            throw std::invalid_argument("u grid must be positive and increasing");
    if (u_grid.empty()) throw std::invalid_argument("empty u grid");
    const std::size_t m = u_grid.size();
    std::vector<std::vector<std::uint64_t>> below(ens.disorders);
    std::vector<std::vector<double>> raw(ens.disorders);
    std::vector<std::uint64_t> hits(ens.disorders, 0);
    const double probe[1] = {ens.reference_time};

    for_each_task(ens.disorders, ens.execution, [&](std::size_t d) {
        const auto rho = measure_for(ens, d);
        const FinChain chain(rho);
        std::vector<double> sorted_v = rho.v;
        std::sort(sorted_v.begin(), sorted_v.end());
        raw[d].resize(m);
        for (std::size_t k = 0; k < m; ++k)
            raw[d][k] = static_cast<double>(std::upper_bound(sorted_v.begin(), sorted_v.end(), u_grid[k]) -
                                            sorted_v.begin()) /
                        static_cast<double>(sorted_v.size());
        below[d].assign(m, 0);
        std::vector<std::size_t> at;
        for (std::size_t p = 0; p < ens.paths_per_disorder; ++p) {
            Rng rng = make_stream(ens.seed, "fin_path", d * ens.paths_per_disorder + p);
            probe_fin(chain, rng, probe, ens.max_boundary_hits, hits[d], at);
            const double w = rho.v[at[0]];
            for (std::size_t k = 0; k < m; ++k) below[d][k] += w <= u_grid[k];
        }
    });

    FinFTable out;
    out.table.u.assign(u_grid.begin(), u_grid.end());
    out.table.cdf.resize(m);
    out.stderr.resize(m);
    out.raw_cdf.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        GroupedMean acc;
        for (std::size_t d = 0; d < ens.disorders; ++d) {
            const auto c = static_cast<double>(below[d][k]);
            acc.add_group(c, c, ens.paths_per_disorder);
            out.raw_cdf[k] += raw[d][k] / static_cast<double>(ens.disorders);
        }
        const Estimate e = acc.estimate();
        out.table.cdf[k] = e.value;
        out.stderr[k] = e.stderr;
    }
    // float noise in the group means must not break monotonicity
    for (std::size_t k = 1; k < m; ++k) out.table.cdf[k] = std::max(out.table.cdf[k], out.table.cdf[k - 1]);
    for (auto h : hits) out.boundary_hits += h;
    out.warning = boundary_warning(out.boundary_hits);
    return out;
}

void FinFTable::write_csv(std::ostream& os) const
{
    os << "u,F,stderr,raw_F\n";
    os.precision(17);
    for (std::size_t k = 0; k < table.u.size(); ++k)
        os << table.u[k] << ',' << table.cdf[k] << ',' << stderr[k] << ',' << raw_cdf[k] << '\n';
}

}  // namespace agelab
