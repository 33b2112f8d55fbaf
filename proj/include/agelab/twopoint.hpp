#pragma once

#include "agelab/landscape.hpp"
#include "agelab/parallel.hpp"
#include "agelab/stats.hpp"
#include "agelab/trapwalk.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace agelab {

enum class TwoPointKind { R, Pi };
enum class Averaging { quenched, annealed };

std::string to_string(TwoPointKind k);
std::string to_string(Averaging a);

/// Time-scaling law t = theta * s(t_w).
struct Scaling {
    enum class Kind { linear, power, log };
    Kind kind = Kind::linear;
    double gamma = 1.0;  // power only

    static Scaling linear() { return {Kind::linear, 1.0}; }
    static Scaling power(double g) { return {Kind::power, g}; }
    static Scaling log() { return {Kind::log, 1.0}; }
    /// "linear", "log", "power:<gamma>".
    static Scaling parse(std::string_view s);

    double scale(double t_w) const;
    std::string name() const;
    bool operator==(const Scaling&) const = default;
};

/// A family of trap-model paths: either one fixed disorder (quenched) or
/// fresh landscapes per disorder (annealed).
///
/// Streams: the landscape of disorder d uses seed stream_key(seed, "landscape", d)
/// (quenched: d = 0 unless `landscape` is supplied); path p of disorder d uses
/// stream_key(seed, "path", d * paths_per_disorder + p).
struct TrapEnsemble {
    Graph graph = Graph::complete(2);
    double beta = 2.0;
    EnergyDistribution distribution = EnergyDistribution::exponential;
    WalkParams walk{};  // horizon is set per query
    Averaging averaging = Averaging::annealed;
    std::size_t disorders = 1;
    std::size_t paths_per_disorder = 1;
    std::uint64_t seed = 1;
    std::shared_ptr<const EnergyLandscape> landscape;  // quenched override
    Execution execution = Execution::parallel;

    std::size_t disorder_count() const { return averaging == Averaging::quenched ? 1 : disorders; }
    EnergyLandscape landscape_for(std::size_t disorder) const;
};

struct TwoPointEstimate {
    double t_w = 0.0;
    double t = 0.0;
    double value = 0.0;
    double stderr = 0.0;
    std::uint64_t n_paths = 0;
    std::uint64_t n_disorders = 0;
    TwoPointKind kind = TwoPointKind::R;
    Averaging averaging = Averaging::annealed;
};

/// R and Pi at (t_w, t_w + t_k) for every offset, evaluated on shared paths.
///   R:  X(t_w) == X(t_w + t)   (right-continuous path)
///   Pi: no jump at any time s with t_w < s <= t_w + t
struct TwoPointTable {
    double t_w = 0.0;
    std::vector<double> t;
    std::vector<TwoPointEstimate> R;
    std::vector<TwoPointEstimate> Pi;
};

TwoPointTable sample_two_point(const TrapEnsemble& ens, double t_w, std::span<const double> t);
TwoPointEstimate estimate_R(const TrapEnsemble& ens, double t_w, double t);
TwoPointEstimate estimate_Pi(const TrapEnsemble& ens, double t_w, double t);

struct AgingCurve {
    TwoPointKind kind = TwoPointKind::R;
    Scaling scaling{};
    double t_w = 0.0;
    std::vector<double> theta;
    std::vector<TwoPointEstimate> values;
};

AgingCurve build_aging_curve(const TrapEnsemble& ens, TwoPointKind kind, const Scaling& scaling, double t_w,
                             std::span<const double> theta_grid);

/// One curve per scaling, all read off the same paths (the union of offsets is
/// sampled once).
std::vector<AgingCurve> build_aging_curves(const TrapEnsemble& ens, TwoPointKind kind,
                                           std::span<const Scaling> scalings, double t_w,
                                           std::span<const double> theta_grid);

/// Log-spaced grid with `n` points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

struct CollapseRow {
    double theta = 0.0;
    double max_abs_diff = 0.0;
    double max_z = 0.0;
};

struct CollapseReport {
    std::vector<CollapseRow> rows;
    double max_z = 0.0;
    double z_threshold = 3.0;
    bool pass = true;

    void write_table(std::ostream& os) const;
    void write_csv(std::ostream& os) const;
};

/// Pairwise comparison of curves on a common theta grid and scaling; fails
/// when any pair differs by more than z_threshold combined standard errors.
CollapseReport collapse_report(std::span<const AgingCurve> curves, double z_threshold = 3.0);

/// Curve against a reference function of theta (stderr of the curve only).
CollapseReport reference_report(const AgingCurve& curve, const std::function<double(double)>& reference,
                                double z_threshold = 3.0);

void write_curves_csv(std::ostream& os, std::span<const AgingCurve> curves);

/// d=1 / d=2 localization diagnostic at each time in `times`.
///   annealed_max: max over x of the disorder-averaged occupation <P(X(t)=x)>;
///   quenched_sup: disorder average of max over x of the per-disorder
///                 histogram estimate of P^omega(X(t)=x).
struct LocalizationPoint {
    double t = 0.0;
    Estimate annealed_max;
    Vertex annealed_argmax = 0;
    Estimate quenched_sup;
};

struct LocalizationProfile {
    std::vector<LocalizationPoint> points;
    std::string warning;  // non-empty when histograms are too coarse
};

LocalizationProfile localization_profile(const TrapEnsemble& ens, std::span<const double> times);

}  // namespace agelab
