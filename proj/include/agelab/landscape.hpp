#pragma once

#include "agelab/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace agelab {

enum class EnergyDistribution { exponential, gaussian };

std::string to_string(EnergyDistribution d);
EnergyDistribution parse_distribution(std::string_view s);

/// Per-vertex energies E_x and trap depths tau(x) = exp(beta * E_x) for one
/// disorder realization. Immutable after construction.
///
/// Energies are a pure function of (seed, distribution, vertex index): vertex x
/// draws from the counter-based stream (seed, x), so landscapes on graphs of
/// different sizes agree on their common index range.
class EnergyLandscape {
public:
    static EnergyLandscape sample(const Graph& graph, EnergyDistribution dist, double beta, std::uint64_t seed);

    /// Landscape with prescribed energies (tests, hand-built instances).
    static EnergyLandscape from_energies(const Graph& graph, std::vector<double> energies, double beta,
                                         EnergyDistribution dist = EnergyDistribution::exponential);

    const Graph& graph() const noexcept { return graph_; }
    std::span<const double> energies() const noexcept { return energies_; }
    std::span<const double> depths() const noexcept { return depths_; }
    double energy(Vertex x) const { return energies_[x]; }
    double depth(Vertex x) const { return depths_[x]; }
    double beta() const noexcept { return beta_; }
    double alpha() const noexcept { return 1.0 / beta_; }
    std::uint64_t seed() const noexcept { return seed_; }
    EnergyDistribution distribution() const noexcept { return dist_; }

    /// vertex_index,energy,depth with a leading "# beta=..,seed=..,distribution=.." line.
    void write_csv(std::ostream& os) const;

private:
    EnergyLandscape(Graph graph, std::vector<double> energies, double beta, std::uint64_t seed,
                    EnergyDistribution dist);

    Graph graph_;
    std::vector<double> energies_;
    std::vector<double> depths_;
    double beta_;
    std::uint64_t seed_;
    EnergyDistribution dist_;
};

/// Energy of vertex x under the counter-based derivation used by sample().
double vertex_energy(EnergyDistribution dist, std::uint64_t seed, std::uint64_t x);

struct TailPoint {
    double a;
    double empirical;  // fraction of vertices with tau > a
    double exact;      // a^{-alpha}
    double stderr;     // binomial, from the exact value
};

/// Empirical P(tau > a) against a^{-alpha}. Exponential landscapes only.
std::vector<TailPoint> depth_tail_check(const EnergyLandscape& landscape, std::span<const double> a_grid);

/// Extreme-value threshold of N i.i.d. standard Gaussians over 2^N sites:
/// sqrt(2N ln2) + E/sqrt(2N ln2) - (ln(N ln2) + ln(4 pi)) / (2 sqrt(2N ln2)).
double rem_threshold(int n_spins, double e);

/// Kolmogorov-Smirnov statistic of `samples` against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf);

}  // namespace agelab

#include <algorithm>

template <class Cdf>
double agelab::ks_statistic(std::vector<double> samples, Cdf&& cdf)
{
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}
