#include "agelab/twopoint.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <ostream>
#include <unordered_map>

namespace agelab {

namespace {

constexpr std::size_t paths_per_chunk = 256;

struct Task {
    std::size_t disorder;
    std::size_t first_path;  // within the disorder
    std::size_t path_count;
};

std::vector<Task> split_tasks(const TrapEnsemble& ens)
{
    if (ens.paths_per_disorder == 0) throw std::invalid_argument("ensemble needs >= 1 path per disorder");
    if (ens.averaging == Averaging::annealed && ens.disorders == 0)
        throw std::invalid_argument("annealed ensemble needs >= 1 disorder");
    std::vector<Task> tasks;
    for (std::size_t d = 0; d < ens.disorder_count(); ++d)
        for (std::size_t p = 0; p < ens.paths_per_disorder; p += paths_per_chunk)
            tasks.push_back({d, p, std::min(paths_per_chunk, ens.paths_per_disorder - p)});
    return tasks;
}

// States at each probe time (sorted ascending) and the first jump time after t_w.
struct ProbeResult {
    std::vector<Vertex> at;
    double first_jump_after = std::numeric_limits<double>::infinity();
};

void probe_path(const TrapWalk& walk, Rng& rng, std::span<const double> probes, double t_w, double horizon,
                ProbeResult& out)
{
    out.at.assign(probes.size(), 0);
    out.first_jump_after = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    const Vertex final_state = walk.run(rng, horizon, [&](double t, Vertex from, Vertex) {
        // `from` occupies [previous jump, t); probes at exactly t see the new state
        while (k < probes.size() && probes[k] < t) out.at[k++] = from;
        if (t > t_w && out.first_jump_after == std::numeric_limits<double>::infinity()) out.first_jump_after = t;
        return k < probes.size() || out.first_jump_after == std::numeric_limits<double>::infinity();
    });
    // run() stopped either at the horizon or because every probe was filled
    while (k < probes.size()) out.at[k++] = final_state;
}

TrapWalk make_walk(const TrapEnsemble& ens, const EnergyLandscape& land, double horizon)
{
    WalkParams p = ens.walk;
    p.horizon = horizon;
    return TrapWalk(land, p);
}

}  // namespace

std::string to_string(TwoPointKind k) { return k == TwoPointKind::R ? "R" : "Pi"; }
std::string to_string(Averaging a) { return a == Averaging::quenched ? "quenched" : "annealed"; }

Scaling Scaling::parse(std::string_view s)
{
    if (s == "linear") return linear();
    if (s == "log") return log();
    if (s.starts_with("power:")) return power(std::stod(std::string(s.substr(6))));
    throw std::invalid_argument("unknown scaling '" + std::string(s) + "'");
}

double Scaling::scale(double t_w) const
{
    switch (kind) {
    case Kind::linear: return t_w;
    case Kind::power: return std::pow(t_w, gamma);
    case Kind::log:
        if (!(t_w > 1.0)) throw std::invalid_argument("log scaling needs t_w > 1");
        return t_w / std::log(t_w);
    }
    return t_w;
}

std::string Scaling::name() const
{
    switch (kind) {
    case Kind::linear: return "linear";
    case Kind::log: return "log";
    case Kind::power: {
        std::ostringstream os;
        os << "power:" << gamma;
        return os.str();
    }
    }
    return {};
}

EnergyLandscape TrapEnsemble::landscape_for(std::size_t disorder) const
{
    if (averaging == Averaging::quenched && landscape) return *landscape;
    return EnergyLandscape::sample(graph, distribution, beta, stream_key(seed, "landscape", disorder));
}

TwoPointTable sample_two_point(const TrapEnsemble& ens, double t_w, std::span<const double> t)
{
    if (!(t_w >= 0.0)) throw std::invalid_argument("t_w must be >= 0");
    for (double ti : t)
        if (!(ti >= 0.0)) throw std::invalid_argument("t must be >= 0");

    // probe 0 is t_w, then offsets in ascending order
    std::vector<std::size_t> order(t.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t[a] < t[b]; });
    std::vector<double> probes{t_w};
    for (auto i : order) probes.push_back(t_w + t[i]);
    const double horizon = std::max(probes.back(), std::nextafter(0.0, 1.0));

    const auto tasks = split_tasks(ens);
    const std::size_t m = t.size();
    // per task: R hits then Pi hits for each original offset index
    std::vector<std::vector<std::uint64_t>> hits(tasks.size());

    for_each_task(tasks.size(), ens.execution, [&](std::size_t ti) {
        const Task& task = tasks[ti];
        const EnergyLandscape land = ens.landscape_for(task.disorder);
        const TrapWalk walk = make_walk(ens, land, horizon);
        auto& h = hits[ti];
        h.assign(2 * m, 0);
        ProbeResult pr;
        for (std::size_t p = task.first_path; p < task.first_path + task.path_count; ++p) {
            Rng rng = make_stream(ens.seed, "path", task.disorder * ens.paths_per_disorder + p);
            probe_path(walk, rng, probes, t_w, horizon, pr);
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t idx = order[j];
                h[idx] += pr.at[j + 1] == pr.at[0];
                h[m + idx] += pr.first_jump_after > t_w + t[idx];
            }
        }
    });

    // reduce in task order
    const std::size_t nd = ens.disorder_count();
    std::vector<std::uint64_t> per_disorder(nd * 2 * m, 0);
    for (std::size_t ti = 0; ti < tasks.size(); ++ti)
        for (std::size_t j = 0; j < 2 * m; ++j) per_disorder[tasks[ti].disorder * 2 * m + j] += hits[ti][j];

    TwoPointTable out;
    out.t_w = t_w;
    out.t.assign(t.begin(), t.end());
    for (std::size_t j = 0; j < 2 * m; ++j) {
        GroupedMean acc;
        for (std::size_t d = 0; d < nd; ++d) {
            const auto c = static_cast<double>(per_disorder[d * 2 * m + j]);
            acc.add_group(c, c, ens.paths_per_disorder);
        }
        const Estimate e = acc.estimate();
        TwoPointEstimate tp;
        tp.t_w = t_w;
        tp.t = t[j % m];
        tp.value = e.value;
        tp.stderr = e.stderr;
        tp.n_paths = e.n;
        tp.n_disorders = nd;
        tp.kind = j < m ? TwoPointKind::R : TwoPointKind::Pi;
        tp.averaging = ens.averaging;
        (j < m ? out.R : out.Pi).push_back(tp);
    }
    return out;
}

TwoPointEstimate estimate_R(const TrapEnsemble& ens, double t_w, double t)
{
    const double ts[1] = {t};
    return sample_two_point(ens, t_w, ts).R[0];
}

TwoPointEstimate estimate_Pi(const TrapEnsemble& ens, double t_w, double t)
{
    const double ts[1] = {t};
    return sample_two_point(ens, t_w, ts).Pi[0];
}

std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0 && hi > lo) || n < 2) throw std::invalid_argument("log_grid needs 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

AgingCurve build_aging_curve(const TrapEnsemble& ens, TwoPointKind kind, const Scaling& scaling, double t_w,
                             std::span<const double> theta_grid)
{
    return build_aging_curves(ens, kind, std::span(&scaling, 1), t_w, theta_grid).front();
}

std::vector<AgingCurve> build_aging_curves(const TrapEnsemble& ens, TwoPointKind kind,
                                           std::span<const Scaling> scalings, double t_w,
                                           std::span<const double> theta_grid)
{
    for (std::size_t i = 1; i < theta_grid.size(); ++i)
        if (!(theta_grid[i] > theta_grid[i - 1])) throw std::invalid_argument("theta grid must be strictly increasing");
    std::vector<double> t;
    for (const Scaling& sc : scalings) {
        const double s = sc.scale(t_w);
        for (double th : theta_grid) t.push_back(th * s);
    }
    const TwoPointTable table = sample_two_point(ens, t_w, t);
    const auto& all = kind == TwoPointKind::R ? table.R : table.Pi;
    std::vector<AgingCurve> out;
    for (std::size_t k = 0; k < scalings.size(); ++k) {
        AgingCurve c;
        c.kind = kind;
        c.scaling = scalings[k];
        c.t_w = t_w;
        c.theta.assign(theta_grid.begin(), theta_grid.end());
        const auto first = all.begin() + static_cast<std::ptrdiff_t>(k * theta_grid.size());
        c.values.assign(first, first + static_cast<std::ptrdiff_t>(theta_grid.size()));
        out.push_back(std::move(c));
    }
    return out;
}

CollapseReport collapse_report(std::span<const AgingCurve> curves, double z_threshold)
{
    if (curves.size() < 2) throw std::invalid_argument("collapse_report needs >= 2 curves");
    for (const auto& c : curves) {
        if (c.theta != curves[0].theta) throw std::invalid_argument("curves have mismatched theta grids");
        if (!(c.scaling == curves[0].scaling)) throw std::invalid_argument("curves have mismatched scalings");
        if (c.values.size() != c.theta.size()) throw std::invalid_argument("curve values do not match grid");
    }
    CollapseReport rep;
    rep.z_threshold = z_threshold;
    for (std::size_t k = 0; k < curves[0].theta.size(); ++k) {
        CollapseRow row{curves[0].theta[k], 0.0, 0.0};
        for (std::size_t i = 0; i < curves.size(); ++i)
            for (std::size_t j = i + 1; j < curves.size(); ++j) {
                const auto& a = curves[i].values[k];
                const auto& b = curves[j].values[k];
                row.max_abs_diff = std::max(row.max_abs_diff, std::abs(a.value - b.value));
                row.max_z = std::max(row.max_z, combined_z(a.value, a.stderr, b.value, b.stderr));
            }
        rep.max_z = std::max(rep.max_z, row.max_z);
        rep.rows.push_back(row);
    }
    rep.pass = rep.max_z <= z_threshold;
    return rep;
}

CollapseReport reference_report(const AgingCurve& curve, const std::function<double(double)>& reference,
                                double z_threshold)
{
    CollapseReport rep;
    rep.z_threshold = z_threshold;
    for (std::size_t k = 0; k < curve.theta.size(); ++k) {
        const double ref = reference(curve.theta[k]);
        const auto& v = curve.values[k];
        CollapseRow row{curve.theta[k], std::abs(v.value - ref), combined_z(v.value, v.stderr, ref, 0.0)};
        rep.max_z = std::max(rep.max_z, row.max_z);
        rep.rows.push_back(row);
    }
    rep.pass = rep.max_z <= z_threshold;
    return rep;
}

void CollapseReport::write_table(std::ostream& os) const
{
    os << std::setw(12) << "theta" << std::setw(14) << "max|diff|" << std::setw(10) << "max z" << '\n';
    for (const auto& r : rows)
        os << std::setw(12) << std::setprecision(5) << r.theta << std::setw(14) << r.max_abs_diff << std::setw(10)
           << std::setprecision(3) << r.max_z << '\n';
    os << "max z " << max_z << " (threshold " << z_threshold << "): " << (pass ? "PASS" : "FAIL") << '\n';
}

void CollapseReport::write_csv(std::ostream& os) const
{
    os << std::setprecision(10) << "theta,max_abs_diff,max_z\n";
    for (const auto& r : rows) os << r.theta << ',' << r.max_abs_diff << ',' << r.max_z << '\n';
}

void write_curves_csv(std::ostream& os, std::span<const AgingCurve> curves)
{
    os << std::setprecision(10) << "kind,averaging,scaling,t_w,theta,t,value,stderr,n_paths,n_disorders\n";
    for (const auto& c : curves)
        for (std::size_t k = 0; k < c.theta.size(); ++k) {
            const auto& v = c.values[k];
            os << to_string(c.kind) << ',' << to_string(v.averaging) << ',' << c.scaling.name() << ',' << c.t_w
               << ',' << c.theta[k] << ',' << v.t << ',' << v.value << ',' << v.stderr << ',' << v.n_paths << ','
               << v.n_disorders << '\n';
        }
}

LocalizationProfile localization_profile(const TrapEnsemble& ens, std::span<const double> times)
{
    if (ens.averaging != Averaging::annealed) throw std::invalid_argument("localization profile needs an annealed ensemble");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("times must be strictly increasing");
    if (times.empty() || times.front() < 0.0) throw std::invalid_argument("times must be non-negative");

    const auto tasks = split_tasks(ens);
    const std::size_t nt = times.size();
    const double horizon = std::max(times.back(), std::nextafter(0.0, 1.0));
    std::vector<std::vector<Vertex>> positions(tasks.size());

    for_each_task(tasks.size(), ens.execution, [&](std::size_t ti) {
        const Task& task = tasks[ti];
        const EnergyLandscape land = ens.landscape_for(task.disorder);
        const TrapWalk walk = make_walk(ens, land, horizon);
        auto& pos = positions[ti];
        pos.resize(task.path_count * nt);
        ProbeResult pr;
        for (std::size_t p = 0; p < task.path_count; ++p) {
            Rng rng = make_stream(ens.seed, "path", task.disorder * ens.paths_per_disorder + task.first_path + p);
            probe_path(walk, rng, times, -1.0, horizon, pr);
            std::copy(pr.at.begin(), pr.at.end(), pos.begin() + static_cast<std::ptrdiff_t>(p * nt));
        }
    });

    LocalizationProfile prof;
    const std::size_t nd = ens.disorder_count();
    const auto total_paths = static_cast<double>(nd * ens.paths_per_disorder);
    for (std::size_t k = 0; k < nt; ++k) {
        std::unordered_map<Vertex, std::uint64_t> global;
        GroupedMean quenched;
        std::size_t ti = 0;
        for (std::size_t d = 0; d < nd; ++d) {
            std::unordered_map<Vertex, std::uint64_t> local;
            for (; ti < tasks.size() && tasks[ti].disorder == d; ++ti)
                for (std::size_t p = 0; p < tasks[ti].path_count; ++p) {
                    const Vertex v = positions[ti][p * nt + k];
                    ++local[v];
                    ++global[v];
                }
            std::uint64_t best = 0;
            for (const auto& [v, c] : local) best = std::max(best, c);
            const double frac = static_cast<double>(best) / static_cast<double>(ens.paths_per_disorder);
            quenched.add_group(frac, frac * frac, 1);
        }
        LocalizationPoint pt;
        pt.t = times[k];
        pt.quenched_sup = quenched.estimate();
        pt.quenched_sup.n = nd * ens.paths_per_disorder;
        std::uint64_t best = 0;
        Vertex arg = 0;
        for (const auto& [v, c] : global)
            if (c > best || (c == best && v < arg)) {
                best = c;
                arg = v;
            }
        const double p = static_cast<double>(best) / total_paths;
        // disorder-clustered stderr of the indicator at the argmax
        GroupedMean at_arg;
        ti = 0;
        for (std::size_t d = 0; d < nd; ++d) {
            std::uint64_t c = 0;
            for (; ti < tasks.size() && tasks[ti].disorder == d; ++ti)
                for (std::size_t q = 0; q < tasks[ti].path_count; ++q) c += positions[ti][q * nt + k] == arg;
            at_arg.add_group(static_cast<double>(c), static_cast<double>(c), ens.paths_per_disorder);
        }
        pt.annealed_max = at_arg.estimate();
        pt.annealed_max.value = p;
        pt.annealed_argmax = arg;
        prof.points.push_back(pt);
    }
    if (ens.paths_per_disorder < 32)
        prof.warning = "fewer than 32 paths per disorder: per-disorder histograms are coarse and the quenched "
                       "sup is biased upward";
    return prof;
}

}  // namespace agelab
