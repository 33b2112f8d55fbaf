#include "agelab/landscape.hpp"

#include "agelab/rng.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace agelab {

std::string to_string(EnergyDistribution d)
{
    return d == EnergyDistribution::exponential ? "exponential" : "gaussian";
}

EnergyDistribution parse_distribution(std::string_view s)
{
    if (s == "exponential") return EnergyDistribution::exponential;
    if (s == "gaussian") return EnergyDistribution::gaussian;
    throw std::invalid_argument("unknown energy distribution '" + std::string(s) + "'");
}

double vertex_energy(EnergyDistribution dist, std::uint64_t seed, std::uint64_t x)
{
    if (dist == EnergyDistribution::exponential) return -std::log(counter_uniform(seed, x));
    return counter_normal(seed, x);
}

EnergyLandscape::EnergyLandscape(Graph graph, std::vector<double> energies, double beta, std::uint64_t seed,
                                 EnergyDistribution dist)
    : graph_(graph), energies_(std::move(energies)), beta_(beta), seed_(seed), dist_(dist)
{
    if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw std::invalid_argument("beta must be positive");
    if (energies_.size() != graph_.vertex_count())
        throw std::invalid_argument("energy count does not match vertex count");
    depths_.resize(energies_.size());
    for (std::size_t i = 0; i < energies_.size(); ++i) depths_[i] = std::exp(beta_ * energies_[i]);
}

EnergyLandscape EnergyLandscape::sample(const Graph& graph, EnergyDistribution dist, double beta,
                                        std::uint64_t seed)
{
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (graph.vertex_count() == 0) throw std::invalid_argument("empty graph");
    std::vector<double> e(graph.vertex_count());
    for (std::size_t x = 0; x < e.size(); ++x) e[x] = vertex_energy(dist, seed, x);
    return EnergyLandscape(graph, std::move(e), beta, seed, dist);
}

EnergyLandscape EnergyLandscape::from_energies(const Graph& graph, std::vector<double> energies, double beta,
                                               EnergyDistribution dist)
{
    return EnergyLandscape(graph, std::move(energies), beta, 0, dist);
}

void EnergyLandscape::write_csv(std::ostream& os) const
{
    os.precision(17);
    os << "# beta=" << beta_ << ",seed=" << seed_ << ",distribution=" << to_string(dist_) << "\n";
    os << "vertex_index,energy,depth\n";
    for (std::size_t i = 0; i < energies_.size(); ++i) os << i << ',' << energies_[i] << ',' << depths_[i] << '\n';
}

std::vector<TailPoint> depth_tail_check(const EnergyLandscape& landscape, std::span<const double> a_grid)
{
    if (landscape.distribution() != EnergyDistribution::exponential)
        throw std::invalid_argument("depth tail law holds for exponential landscapes only");
    const auto depths = landscape.depths();
    const double n = static_cast<double>(depths.size());
    std::vector<TailPoint> out;
    out.reserve(a_grid.size());
    for (double a : a_grid) {
        std::size_t above = 0;
        for (double t : depths) above += t > a;
        const double exact = a <= 1.0 ? 1.0 : std::pow(a, -landscape.alpha());
        out.push_back({a, static_cast<double>(above) / n, exact, std::sqrt(exact * (1.0 - exact) / n)});
    }
    return out;
}

double rem_threshold(int n_spins, double e)
{
    if (n_spins < 1) throw std::invalid_argument("rem_threshold needs N >= 1");
    const double n = n_spins;
    const double s = std::sqrt(2.0 * n * std::numbers::ln2);
    return s + e / s - (std::log(n * std::numbers::ln2) + std::log(4.0 * std::numbers::pi)) / (2.0 * s);
}

}  // namespace agelab
