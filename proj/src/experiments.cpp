#include "agelab/experiments.hpp"

#include "agelab/analytic.hpp"
#include "agelab/fin.hpp"
#include "agelab/graph.hpp"
#include "agelab/landscape.hpp"
#include "agelab/parallel.hpp"
#include "agelab/rem.hpp"
#include "agelab/ssk.hpp"
#include "agelab/twopoint.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <sstream>

#ifndef AGELAB_VERSION
#define AGELAB_VERSION "unknown"
#endif

namespace agelab {

std::string agelab_version() { return AGELAB_VERSION; }

BudgetRefused::BudgetRefused(double est, double c)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "estimated cost " << std::setprecision(3) << est << " operations exceeds max_events = " << c
             << "; reduce the ensemble or raise max_events";
          return os.str();
      }()),
      estimate(est),
      cap(c)
{
}

namespace {

using VT = ValueType;

KeySpec req(std::string name, VT type, std::string help) { return {std::move(name), type, std::nullopt, std::move(help)}; }
KeySpec opt(std::string name, VT type, std::string def, std::string help)
{
    return {std::move(name), type, std::move(def), std::move(help)};
}

const std::vector<KeySpec>& common_keys()
{
    static const std::vector<KeySpec> keys{
        req("experiment", VT::text, "experiment tag"),
        opt("seed", VT::integer, "1", "master seed; every stream is keyed from it"),
        opt("out", VT::text, "results", "output directory"),
        opt("workers", VT::integer, "0", "OpenMP threads (0: runtime default); does not change results"),
        opt("max_events", VT::real, "1e12", "refuse runs whose estimated cost is larger"),
    };
    return keys;
}

std::vector<KeySpec> trap_keys(bool need_a, std::string graph_key, std::string L_default, std::string t_w_default)
{
    std::vector<KeySpec> k{
        req("alpha", VT::real, "temperature 1/beta in (0,1)"),
        need_a ? req("a", VT::real, "symmetry index in [0,1]") : opt("a", VT::real, "0", "symmetry index in [0,1]"),
        opt(graph_key, VT::integer, L_default, graph_key == "L" ? "segment half-length" : "torus side"),
        opt("t_w", VT::real_list, t_w_default, "waiting times, increasing"),
        opt("theta", VT::real_list, "0.1,0.3,1,3,10", "theta grid, increasing"),
        opt("disorders", VT::integer, "2000", "landscapes (annealed average)"),
        opt("paths", VT::integer, "5", "paths per landscape"),
        opt("z", VT::real, "3", "z threshold"),
    };
    return k;
}

std::vector<ExperimentSchema> make_schemas()
{
    std::vector<ExperimentSchema> s;
    s.push_back({"tail_check",
                 "empirical P(tau > a) of an exponential landscape against a^-alpha",
                 {req("alpha", VT::real, "temperature 1/beta in (0,1)"),
                  opt("graph", VT::graph, "complete:1000000", "graph whose vertices carry the samples"),
                  opt("a_grid", VT::real_list, "1,2,4,10,100,1000", "depth thresholds >= 1"),
                  opt("z", VT::real, "3", "z threshold")}});

    s.push_back({"z1_aging", "d=1 segment: R(t_w, (1+theta) t_w) collapse across t_w", trap_keys(false, "L", "3000", "1e3,1e4,1e5")});

    auto sub = trap_keys(true, "L", "3000", "1e4,1e5");
    sub.push_back(opt("gamma", VT::real, "auto", "sub-aging exponent (auto: (1-a)/(1+alpha))"));
    sub.push_back(opt("gamma_shift", VT::real, "0.15", "shift of the exponents that must fail to collapse"));
    s.push_back({"z1_subaging", "d=1 segment: Pi collapse under t = theta t_w^gamma, failure at gamma +- shift", sub});

    auto z2 = trap_keys(false, "side", "512", "1e3,1e4");
    z2.push_back(opt("quenched_paths", VT::integer, "0", "paths of a single-landscape spot check (0: off)"));
    s.push_back({"z2_aging", "d=2 torus: R under t = theta t_w against h(theta), improving with t_w", z2});

    s.push_back({"z2_subaging",
                 "d=2 torus: Pi under t = theta t_w / ln t_w against the largest t_w, improving with t_w",
                 trap_keys(true, "side", "512", "1e3,1e4,1e5")});

    s.push_back({"localization",
                 "sup_x of the occupation law over a time grid: persists on Z, decays on Z^2",
                 {req("alpha", VT::real, "temperature 1/beta in (0,1)"),
                  opt("a", VT::real, "0", "symmetry index in [0,1]"),
                  req("graph", VT::graph, "segment:L or torus:L"),
                  opt("times", VT::real_list, "1e3,1e4,1e5", "observation times, increasing"),
                  opt("disorders", VT::integer, "200", "landscapes"),
                  opt("paths", VT::integer, "100", "paths per landscape"),
                  opt("expect", VT::text, "auto", "persist | decay | auto (segment persists, torus decays)"),
                  opt("z", VT::real, "3", "z threshold")}});

    s.push_back({"complete_graph_renewal",
                 "complete graph Pi against the renewal solution and H(theta)",
                 {req("M", VT::integer, "number of vertices"),
                  req("alpha", VT::real, "temperature 1/beta in (0,1)"),
                  opt("t_w", VT::real_list, "1e2,1e3", "waiting times"),
                  opt("theta", VT::real_list, "0.3,1,3", "theta grid"),
                  opt("disorders", VT::integer, "100", "landscapes (1: quenched)"),
                  opt("paths", VT::integer, "1000", "paths per landscape"),
                  opt("step", VT::real, "0.25", "renewal grid step"),
                  opt("z", VT::real, "3", "z threshold")}});

    s.push_back({"fin_f_theta",
                 "FIN f(theta) against the lattice R limit, plus the gambler's-ruin entry split",
                 {opt("alpha", VT::real, "0.5", "index of the speed measure"),
                  opt("fin_L", VT::real, "20", "FIN window half-width"),
                  opt("v_min", VT::real, "1e-4", "weight cutoff"),
                  opt("disorders", VT::integer, "400", "speed measures"),
                  opt("paths", VT::integer, "50", "paths per measure"),
                  opt("theta", VT::real_list, "0.3,1,3", "theta grid"),
                  opt("lattice_a", VT::real, "0", "symmetry index of the lattice walk"),
                  opt("lattice_L", VT::integer, "3000", "lattice segment half-length"),
                  opt("lattice_t_w", VT::real, "1e5", "lattice waiting time"),
                  opt("lattice_disorders", VT::integer, "4000", "lattice landscapes"),
                  opt("lattice_paths", VT::integer, "5", "lattice paths per landscape"),
                  opt("entry_left", VT::real, "-1", "left atom of the entry check"),
                  opt("entry_right", VT::real, "3", "right atom of the entry check"),
                  opt("entry_runs", VT::integer, "100000", "entry draws"),
                  opt("z", VT::real, "3", "z threshold")}});

    s.push_back({"fin_F_q_a",
                 "FIN occupied-weight law F and q_a(theta), with the a = 0 cross-check",
                 {opt("alpha", VT::real, "0.5", "index of the speed measure"),
                  req("a", VT::real, "symmetry index in [0,1]"),
                  opt("fin_L", VT::real, "20", "FIN window half-width"),
                  opt("v_min", VT::real, "1e-4", "weight cutoff"),
                  opt("disorders", VT::integer, "400", "speed measures"),
                  opt("paths", VT::integer, "50", "paths per measure"),
                  opt("u_grid", VT::real_list, "log:5e-5:1e4:41", "weight grid for F"),
                  opt("theta", VT::real_list, "log:0.01:100:9", "theta grid for q_a"),
                  opt("z", VT::real, "3", "z threshold")}});

    s.push_back({"rem_rescaled",
                 "REM Pi_N(c t_w, c (t_w + theta t_w)) / H(theta) along N",
                 {opt("N", VT::real_list, "8,12,16", "spin counts, increasing"),
                  opt("beta", VT::real, "2", "inverse temperature (> sqrt(2 ln 2) for aging)"),
                  opt("E", VT::real, "-3", "top-set parameter"),
                  opt("t_w", VT::real, "10", "rescaled waiting time"),
                  opt("theta", VT::real_list, "0.1,0.3,1,3,10", "theta grid"),
                  opt("disorders", VT::integer, "64", "landscapes per N"),
                  opt("paths", VT::integer, "256", "paths per landscape"),
                  opt("max_jumps", VT::real, "1e9", "jump cap per path"),
                  opt("z", VT::real, "3", "z threshold")}});

    s.push_back({"ssk_regimes",
                 "soft spherical SK: exponential, critical and aging regimes",
                 {opt("N", VT::integer, "1000", "spins"),
                  opt("route", VT::text, "spectral", "spectral | tridiagonal"),
                  opt("dt", VT::real, "0.01", "Euler step"),
                  opt("k", VT::real, "1", "constraint f(x) = k x^2 / 2"),
                  opt("matrices", VT::integer, "8", "coupling matrices"),
                  opt("noise_per_matrix", VT::integer, "1", "noise realizations per matrix"),
                  opt("exp_betas", VT::real_list, "0,0.25", "betas of the exponential regime"),
                  opt("exp_t_w", VT::real, "10", "waiting time of the exponential fits"),
                  opt("exp_window", VT::real_list, "log:0.1:3:12", "lags of the exponential fits"),
                  opt("critical_t_w", VT::real, "25", "waiting time of the critical window"),
                  opt("critical_window", VT::real_list, "log:1:25:12", "lags in (0, critical_t_w]"),
                  opt("beta_lo", VT::real, "0", "bisection bracket, exponential side"),
                  opt("beta_hi", VT::real, "1", "bisection bracket, non-exponential side"),
                  opt("iterations", VT::integer, "6", "bisection steps"),
                  opt("aging_beta", VT::real, "1", "beta of the aging regime"),
                  opt("plateau_t_w", VT::real_list, "25,50,100", "waiting times of C(t_w, 2 t_w)"),
                  opt("band_t_w", VT::real, "5", "waiting time of the (t/t_w)^(3/4) band"),
                  opt("band_theta", VT::real_list, "log:10:100:11", "t / t_w of the band"),
                  opt("r2_min", VT::real, "0.99", "R^2 floor of the exponential fits"),
                  opt("slope_target", VT::real, "-0.5", "critical log-log slope"),
                  opt("slope_tol", VT::real, "0.1", "tolerance on the critical slope"),
                  opt("z", VT::real, "3", "z threshold of the plateau")}});
    return s;
}

/// Typed read access to a resolved config.
class Params {
public:
    explicit Params(const Config& c) : c_(c) {}

    const std::string& text(const std::string& k) const { return c_.get(k); }
    double real(const std::string& k) const { return parse_real(k, c_.get(k)); }
    long long integer(const std::string& k) const { return parse_integer(k, c_.get(k)); }
    std::size_t count(const std::string& k) const { return static_cast<std::size_t>(integer(k)); }
    std::vector<double> list(const std::string& k) const { return parse_real_list(k, c_.get(k)); }
    Graph graph(const std::string& k) const
    {
        try {
            return Graph::parse(c_.get(k));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(k + ": " + e.what());
        }
    }
    bool has(const std::string& k) const { return c_.has(k); }
    std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed")); }

private:
    const Config& c_;
};

void check_type(const KeySpec& spec, const std::string& value)
{
    switch (spec.type) {
    case VT::real:
        if (spec.name == "gamma" && value == "auto") return;
        parse_real(spec.name, value);
        break;
    case VT::integer: parse_integer(spec.name, value); break;
    case VT::real_list:
        if (parse_real_list(spec.name, value).empty()) throw ConfigError(spec.name + ": empty list");
        break;
    case VT::graph:
        try {
            Graph::parse(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(spec.name + ": " + e.what());
        }
        break;
    case VT::text: break;
    }
}

bool increasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

void cross_checks(const std::string& tag, const Params& p, std::vector<std::string>& bad)
{
    auto need = [&](bool ok, std::string msg) {
        if (!ok) bad.push_back(std::move(msg));
    };
    auto positive_list = [&](const std::string& k) {
        if (!p.has(k)) return;
        const auto v = p.list(k);
        need(increasing(v), k + " must be strictly increasing");
        need(!v.empty() && v.front() > 0.0, k + " entries must be > 0");
    };
    auto at_least = [&](const std::string& k, long long lo) {
        if (p.has(k)) need(p.integer(k) >= lo, k + " must be >= " + std::to_string(lo));
    };

    need(p.integer("seed") >= 0, "seed must be >= 0");
    need(p.integer("workers") >= 0, "workers must be >= 0");
    need(p.real("max_events") > 0.0, "max_events must be > 0");
    if (p.has("alpha")) need(p.real("alpha") > 0.0 && p.real("alpha") < 1.0, "alpha must lie in (0,1)");
    if (p.has("a")) need(p.real("a") >= 0.0 && p.real("a") <= 1.0, "a must lie in [0,1]");
    if (p.has("z")) need(p.real("z") > 0.0, "z must be > 0");
    for (const char* k : {"t_w", "theta", "times", "exp_window", "critical_window", "plateau_t_w", "band_theta"})
        positive_list(k);
    for (const char* k : {"disorders", "paths", "L", "side", "lattice_L", "lattice_disorders", "lattice_paths",
                          "entry_runs", "matrices", "noise_per_matrix"})
        at_least(k, 1);

    if (tag == "tail_check") {
        for (double a : p.list("a_grid")) need(a >= 1.0, "a_grid entries must be >= 1");
    } else if (tag == "z1_aging" || tag == "z2_aging") {
        need(p.list("t_w").size() >= 2, "t_w needs at least two waiting times");
        if (tag == "z2_aging") at_least("quenched_paths", 0);
    } else if (tag == "z1_subaging") {
        need(p.list("t_w").size() >= 2, "t_w needs at least two waiting times");
        need(p.real("gamma_shift") > 0.0, "gamma_shift must be > 0");
        if (p.text("gamma") != "auto") need(p.real("gamma") > 0.0, "gamma must be > 0");
    } else if (tag == "z2_subaging") {
        need(p.list("t_w").size() >= 3, "t_w needs at least three waiting times (the last is the reference)");
        need(p.list("t_w").front() > 1.0, "log scaling needs t_w > 1");
    } else if (tag == "localization") {
        const Graph g = p.graph("graph");
        need(g.kind() == GraphKind::segment || g.kind() == GraphKind::torus2d, "localization needs a segment or torus");
        const auto& e = p.text("expect");
        need(e == "auto" || e == "persist" || e == "decay", "expect must be auto, persist or decay");
    } else if (tag == "complete_graph_renewal") {
        at_least("M", 2);
        need(p.real("step") > 0.0, "step must be > 0");
    } else if (tag == "fin_f_theta" || tag == "fin_F_q_a") {
        need(p.real("fin_L") > 0.0, "fin_L must be > 0");
        need(p.real("v_min") > 0.0, "v_min must be > 0");
        if (tag == "fin_f_theta") {
            need(p.real("lattice_a") >= 0.0 && p.real("lattice_a") <= 1.0, "lattice_a must lie in [0,1]");
            need(p.real("lattice_t_w") > 0.0, "lattice_t_w must be > 0");
            need(p.real("entry_left") < 0.0 && p.real("entry_right") > 0.0, "entry atoms must bracket the origin");
        } else {
            const auto u = p.list("u_grid");
            need(increasing(u) && u.front() > 0.0, "u_grid must be positive and strictly increasing");
            const auto th = p.list("theta");
            need(increasing(th) && th.front() >= 0.0, "theta must be non-negative and strictly increasing");
        }
    } else if (tag == "rem_rescaled") {
        const auto ns = p.list("N");
        need(increasing(ns), "N must be strictly increasing");
        for (double n : ns) {
            need(n == std::floor(n) && n >= 1.0, "N entries must be positive integers");
            need(n <= max_hypercube_dim,
                 "hypercube N=" + std::to_string(static_cast<long long>(n)) + " exceeds cap " +
                     std::to_string(max_hypercube_dim));
        }
        need(p.real("beta") > 0.0, "beta must be > 0");
        need(p.real("t_w") > 0.0, "t_w must be > 0");
        need(p.real("max_jumps") >= 1.0, "max_jumps must be >= 1");
    } else if (tag == "ssk_regimes") {
        at_least("N", 2);
        const auto& r = p.text("route");
        need(r == "spectral" || r == "tridiagonal", "route must be spectral or tridiagonal");
        need(p.real("dt") > 0.0, "dt must be > 0");
        need(p.real("k") > 0.0, "k must be > 0");
        need(p.real("beta_hi") > p.real("beta_lo"), "beta_hi must exceed beta_lo");
        at_least("iterations", 0);
        for (double w : p.list("critical_window"))
            need(w <= p.real("critical_t_w"), "critical_window lags must not exceed critical_t_w");
        for (double b : p.list("exp_betas")) need(b >= 0.0, "exp_betas must be >= 0");
    }
}

// ---- output helpers -------------------------------------------------------

struct Ctx {
    const Params& p;
    std::filesystem::path dir;
    std::vector<std::filesystem::path> files;
    std::ostringstream report;
    bool pass = true;

    std::ofstream open(const std::string& name)
    {
        const auto path = dir / name;
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        files.push_back(path);
        return os;
    }
    void check(bool ok, const std::string& what)
    {
        report << (ok ? "PASS  " : "FAIL  ") << what << '\n';
        pass = pass && ok;
    }
};

std::string fmt(double v, int prec = 4)
{
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

TrapEnsemble trap_ensemble(const Params& p, const Graph& g, std::uint64_t seed)
{
    TrapEnsemble e;
    e.graph = g;
    e.beta = 1.0 / p.real("alpha");
    e.walk.a = p.has("a") ? p.real("a") : 0.0;
    if (g.kind() == GraphKind::segment)
        e.walk.start = StartPolicy::fixed(g.origin());
    else if (g.kind() == GraphKind::complete)
        e.walk.start = StartPolicy::uniform();
    else
        e.walk.start = StartPolicy::fixed(0);
    if (g.kind() == GraphKind::complete) e.walk.nu = 1.0 / static_cast<double>(g.vertex_count() - 1);
    e.disorders = p.has("disorders") ? p.count("disorders") : 1;
    e.paths_per_disorder = p.has("paths") ? p.count("paths") : 1;
    e.averaging = e.disorders > 1 ? Averaging::annealed : Averaging::quenched;
    e.seed = seed;
    return e;
}

/// Independent paths for each waiting time.
std::uint64_t t_w_seed(const Params& p, std::size_t i) { return stream_key(p.seed(), "t_w", i); }

void write_collapse(std::ostream& os, const std::string& label, const CollapseReport& r, bool header)
{
    if (header) os << "scaling,theta,max_abs_diff,max_z\n";
    os << std::setprecision(10);
    for (const auto& row : r.rows) os << label << ',' << row.theta << ',' << row.max_abs_diff << ',' << row.max_z << '\n';
}

// ---- runners ---------------------------------------------------------------

void run_tail(Ctx& c)
{
    const Params& p = c.p;
    const Graph g = p.graph("graph");
    const auto land = EnergyLandscape::sample(g, EnergyDistribution::exponential, 1.0 / p.real("alpha"),
                                              stream_key(p.seed(), "landscape", 0));
    const auto grid = p.list("a_grid");
    const auto rows = depth_tail_check(land, grid);
    auto os = c.open("tail.csv");
    os << "a,empirical,exact,stderr,z\n" << std::setprecision(12);
    const double zmax = p.real("z");
    double worst = 0.0;
    for (const auto& r : rows) {
        const double z = combined_z(r.empirical, r.stderr, r.exact, 0.0);
        worst = std::max(worst, z);
        os << r.a << ',' << r.empirical << ',' << r.exact << ',' << r.stderr << ',' << z << '\n';
    }
    c.report << "tail_check on " << g.spec() << " (" << g.vertex_count() << " samples), alpha " << p.real("alpha")
             << '\n';
    c.check(worst <= zmax, "empirical tail within " + fmt(zmax) + " binomial stderr of a^-alpha (max z " + fmt(worst, 3) + ")");
}

void run_z1_aging(Ctx& c)
{
    const Params& p = c.p;
    const Graph g = Graph::segment(p.integer("L"));
    const auto tws = p.list("t_w");
    const auto theta = p.list("theta");
    std::vector<AgingCurve> curves;
    for (std::size_t i = 0; i < tws.size(); ++i)
        curves.push_back(build_aging_curve(trap_ensemble(p, g, t_w_seed(p, i)), TwoPointKind::R, Scaling::linear(),
                                           tws[i], theta));
    auto os = c.open("curves.csv");
    write_curves_csv(os, curves);
    const auto rep = collapse_report(curves, p.real("z"));
    auto cs = c.open("collapse.csv");
    write_collapse(cs, "linear", rep, true);
    c.report << "R(t_w, (1+theta) t_w) on " << g.spec() << ", alpha " << p.real("alpha") << ", a " << p.real("a") << '\n';
    rep.write_table(c.report);
    c.check(rep.pass, "R collapses across t_w under t = theta t_w");
}

void run_z1_subaging(Ctx& c)
{
    const Params& p = c.p;
    const Graph g = Graph::segment(p.integer("L"));
    const double alpha = p.real("alpha"), a = p.real("a");
    const double gamma = p.text("gamma") == "auto" ? (1.0 - a) / (1.0 + alpha) : p.real("gamma");
    const double shift = p.real("gamma_shift");
    std::vector<Scaling> sc{Scaling::power(gamma), Scaling::power(gamma - shift), Scaling::power(gamma + shift)};
    if (gamma - shift <= 0.0) sc.erase(sc.begin() + 1);
    const auto tws = p.list("t_w");
    const auto theta = p.list("theta");
    std::vector<std::vector<AgingCurve>> by(sc.size());
    std::vector<AgingCurve> all;
    for (std::size_t i = 0; i < tws.size(); ++i) {
        auto cs = build_aging_curves(trap_ensemble(p, g, t_w_seed(p, i)), TwoPointKind::Pi, sc, tws[i], theta);
        for (std::size_t k = 0; k < sc.size(); ++k) {
            by[k].push_back(cs[k]);
            all.push_back(cs[k]);
        }
    }
    auto os = c.open("curves.csv");
    write_curves_csv(os, all);
    auto cs = c.open("collapse.csv");
    c.report << "Pi sub-aging on " << g.spec() << ", alpha " << alpha << ", a " << a << ", gamma " << fmt(gamma, 6)
             << '\n';
    for (std::size_t k = 0; k < sc.size(); ++k) {
        const auto rep = collapse_report(by[k], p.real("z"));
        write_collapse(cs, sc[k].name(), rep, k == 0);
        c.report << sc[k].name() << '\n';
        rep.write_table(c.report);
        if (k == 0)
            c.check(rep.pass, "Pi collapses under gamma = " + fmt(gamma, 6));
        else
            c.check(!rep.pass, "Pi fails to collapse under gamma' = " + fmt(sc[k].gamma, 6) + " (max z " +
                                   fmt(rep.max_z, 3) + ")");
    }
}

/// Trend rule for collapse improving with t_w: each max z is at most the
/// previous one, or at most the threshold.
bool improving(const std::vector<double>& maxz, double z)
{
    for (std::size_t i = 1; i < maxz.size(); ++i)
        if (maxz[i] > std::max(maxz[i - 1], z)) return false;
    return true;
}

void run_z2_aging(Ctx& c)
{
    const Params& p = c.p;
    const Graph g = Graph::torus(p.integer("side"));
    const double alpha = p.real("alpha"), z = p.real("z");
    const auto tws = p.list("t_w");
    const auto theta = p.list("theta");
    const auto h = [alpha](double th) { return h_theta(th, alpha); };
    std::vector<AgingCurve> curves;
    std::vector<double> maxz;
    auto rs = c.open("reference.csv");
    rs << "t_w,theta,h_theta,value,stderr,z\n" << std::setprecision(10);
    c.report << "R(t_w, (1+theta) t_w) on " << g.spec() << " against h(theta), alpha " << alpha << '\n';
    for (std::size_t i = 0; i < tws.size(); ++i) {
        curves.push_back(
            build_aging_curve(trap_ensemble(p, g, t_w_seed(p, i)), TwoPointKind::R, Scaling::linear(), tws[i], theta));
        const auto rep = reference_report(curves.back(), h, z);
        for (std::size_t k = 0; k < theta.size(); ++k)
            rs << tws[i] << ',' << theta[k] << ',' << h(theta[k]) << ',' << curves.back().values[k].value << ','
               << curves.back().values[k].stderr << ',' << rep.rows[k].max_z << '\n';
        maxz.push_back(rep.max_z);
        c.report << "t_w " << tws[i] << ": max z against h " << fmt(rep.max_z, 3) << '\n';
    }
    if (p.count("quenched_paths") > 0) {
        TrapEnsemble q = trap_ensemble(p, g, stream_key(p.seed(), "quenched", 0));
        q.averaging = Averaging::quenched;
        q.paths_per_disorder = p.count("quenched_paths");
        curves.push_back(build_aging_curve(q, TwoPointKind::R, Scaling::linear(), tws.back(), theta));
        const auto rep = reference_report(curves.back(), h, z);
        c.report << "single-landscape spot check at t_w " << tws.back() << ": max z against h " << fmt(rep.max_z, 3)
                 << " (informational)\n";
    }
    auto os = c.open("curves.csv");
    write_curves_csv(os, curves);
    c.check(improving(maxz, z), "agreement with h(theta) does not worsen as t_w grows");
}

void run_z2_subaging(Ctx& c)
{
    const Params& p = c.p;
    const Graph g = Graph::torus(p.integer("side"));
    const double z = p.real("z");
    const auto tws = p.list("t_w");
    const auto theta = p.list("theta");
    std::vector<AgingCurve> curves;
    for (std::size_t i = 0; i < tws.size(); ++i)
        curves.push_back(
            build_aging_curve(trap_ensemble(p, g, t_w_seed(p, i)), TwoPointKind::Pi, Scaling::log(), tws[i], theta));
    auto os = c.open("curves.csv");
    write_curves_csv(os, curves);
    auto cs = c.open("collapse.csv");
    c.report << "Pi(t_w, t_w + theta t_w / ln t_w) on " << g.spec() << ", reference t_w " << tws.back() << '\n';
    std::vector<double> maxz;
    for (std::size_t i = 0; i + 1 < tws.size(); ++i) {
        const std::vector<AgingCurve> pair{curves[i], curves.back()};
        const auto rep = collapse_report(pair, z);
        write_collapse(cs, "t_w=" + fmt(tws[i], 10), rep, i == 0);
        maxz.push_back(rep.max_z);
        c.report << "t_w " << tws[i] << " against reference: max z " << fmt(rep.max_z, 3) << '\n';
    }
    c.check(improving(maxz, z), "collapse onto the reference does not worsen as t_w grows");
    const auto& first = curves.back().values.front();
    c.check(theta.front() > 0.2 || first.value > 0.5,
            "small-theta end of the reference curve is near 1 (" + fmt(first.value) + ")");
}

void run_localization(Ctx& c)
{
    const Params& p = c.p;
    const Graph g = p.graph("graph");
    TrapEnsemble e = trap_ensemble(p, g, p.seed());
    e.averaging = Averaging::annealed;
    const auto times = p.list("times");
    const auto prof = localization_profile(e, times);
    auto os = c.open("profile.csv");
    os << "t,annealed_max,annealed_stderr,argmax,quenched_sup,quenched_stderr\n" << std::setprecision(10);
    for (const auto& pt : prof.points)
        os << pt.t << ',' << pt.annealed_max.value << ',' << pt.annealed_max.stderr << ',' << pt.annealed_argmax << ','
           << pt.quenched_sup.value << ',' << pt.quenched_sup.stderr << '\n';
    std::string expect = p.text("expect");
    if (expect == "auto") expect = g.kind() == GraphKind::segment ? "persist" : "decay";
    const double z = p.real("z");
    c.report << "localization on " << g.spec() << " (expect " << expect << ")\n";
    for (const auto& pt : prof.points)
        c.report << "  t " << pt.t << ": <sup_x P(X(t)=x)> " << fmt(pt.quenched_sup.value) << " +- "
                 << fmt(pt.quenched_sup.stderr, 2) << ", sup_x <P(X(t)=x)> " << fmt(pt.annealed_max.value) << '\n';
    if (!prof.warning.empty()) c.report << "warning: " << prof.warning << '\n';
    const auto& f = prof.points.front().quenched_sup;
    const auto& l = prof.points.back().quenched_sup;
    const double drop = (f.value - l.value) / std::hypot(f.stderr, l.stderr);
    if (expect == "decay") {
        bool monotone = true;
        for (std::size_t i = 1; i < prof.points.size(); ++i)
            monotone = monotone && prof.points[i].quenched_sup.value < prof.points[i - 1].quenched_sup.value;
        c.check(monotone && drop > z, "sup decreases along the time grid (first-to-last drop " + fmt(drop, 3) + " stderr)");
    } else {
        double floor = INFINITY;
        for (const auto& pt : prof.points) floor = std::min(floor, pt.quenched_sup.value - z * pt.quenched_sup.stderr);
        c.check(drop <= z && floor > 0.0, "sup stays bounded away from 0 (first-to-last drop " + fmt(drop, 3) +
                                              " stderr, lower bound " + fmt(floor) + ")");
    }
}

void run_complete_graph(Ctx& c)
{
    const Params& p = c.p;
    const Graph g = Graph::complete(p.integer("M"));
    const double alpha = p.real("alpha"), z = p.real("z");
    const auto tws = p.list("t_w");
    const auto theta = p.list("theta");
    std::vector<double> offsets;
    for (double tw : tws)
        for (double th : theta) offsets.push_back(th * tw);
    RenewalOptions ro;
    const double step = p.real("step");
    const auto sol = solve_renewal(alpha, tws.back(), step, offsets, ro);
    const auto fine = solve_renewal(alpha, tws.back(), step / 2, offsets, ro);
    const double gap = renewal_halving_gap(sol, fine);

    auto os = c.open("compare.csv");
    os << "t_w,theta,t,Pi_sim,stderr,n_paths,Pi_renewal,H_theta,z\n" << std::setprecision(10);
    c.report << "complete graph M " << g.vertex_count() << ", alpha " << alpha << ", renewal step " << step
             << " (halving gap " << fmt(gap, 3) << ")\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < tws.size(); ++i) {
        std::vector<double> t(theta.size());
        for (std::size_t k = 0; k < theta.size(); ++k) t[k] = theta[k] * tws[i];
        const auto tab = sample_two_point(trap_ensemble(p, g, t_w_seed(p, i)), tws[i], t);
        for (std::size_t k = 0; k < theta.size(); ++k) {
            const auto& e = tab.Pi[k];
            const double ren = fine.value(tws[i], i * theta.size() + k);
            const double zk = combined_z(e.value, e.stderr, ren, 0.0);
            worst = std::max(worst, zk);
            os << tws[i] << ',' << theta[k] << ',' << t[k] << ',' << e.value << ',' << e.stderr << ',' << e.n_paths
               << ',' << ren << ',' << H_theta(theta[k], alpha) << ',' << zk << '\n';
            c.report << "  t_w " << tws[i] << " theta " << theta[k] << ": sim " << fmt(e.value) << " +- "
                     << fmt(e.stderr, 2) << ", renewal " << fmt(ren) << ", H " << fmt(H_theta(theta[k], alpha))
                     << ", z " << fmt(zk, 3) << '\n';
        }
    }
    c.check(worst <= z, "simulated Pi within " + fmt(z) + " stderr of the renewal solution (max z " + fmt(worst, 3) + ")");
    c.check(gap < 1e-3, "renewal grid halving changes values by < 1e-3");
}

FinEnsemble fin_ensemble(const Params& p)
{
    FinEnsemble f;
    f.alpha = p.real("alpha");
    f.L = p.real("fin_L");
    f.v_min = p.real("v_min");
    f.disorders = p.count("disorders");
    f.paths_per_disorder = p.count("paths");
    f.seed = stream_key(p.seed(), "fin", 0);
    return f;
}

void run_fin_f(Ctx& c)
{
    const Params& p = c.p;
    const auto theta = p.list("theta");
    const double z = p.real("z");
    const auto curve = estimate_f_theta(theta, fin_ensemble(p));

    TrapEnsemble lat;
    lat.graph = Graph::segment(p.integer("lattice_L"));
    lat.beta = 1.0 / p.real("alpha");
    lat.walk.a = p.real("lattice_a");
    lat.walk.start = StartPolicy::fixed(lat.graph.origin());
    lat.disorders = p.count("lattice_disorders");
    lat.paths_per_disorder = p.count("lattice_paths");
    lat.seed = stream_key(p.seed(), "lattice", 0);
    const double tw = p.real("lattice_t_w");
    const auto R = build_aging_curve(lat, TwoPointKind::R, Scaling::linear(), tw, theta);

    auto os = c.open("f_theta.csv");
    os << "theta,f,f_stderr,R_lattice,R_stderr,z\n" << std::setprecision(10);
    c.report << "FIN f(theta), alpha " << p.real("alpha") << ", against lattice R at t_w " << tw << '\n';
    double worst = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const auto& f = curve.f[k];
        const auto& r = R.values[k];
        const double zk = combined_z(f.value, f.stderr, r.value, r.stderr);
        worst = std::max(worst, zk);
        os << theta[k] << ',' << f.value << ',' << f.stderr << ',' << r.value << ',' << r.stderr << ',' << zk << '\n';
        c.report << "  theta " << theta[k] << ": f " << fmt(f.value) << " +- " << fmt(f.stderr, 2) << ", R "
                 << fmt(r.value) << " +- " << fmt(r.stderr, 2) << ", z " << fmt(zk, 3) << '\n';
    }
    c.check(worst <= z, "f(theta) matches the lattice R limit (max z " + fmt(worst, 3) + ")");
    c.check(curve.boundary_hits == 0, "no FIN path reached an extreme atom (" + std::to_string(curve.boundary_hits) + ")");

    // gambler's ruin from the origin between two atoms
    RandomSpeedMeasure rho;
    const double xl = p.real("entry_left"), xr = p.real("entry_right");
    rho.x = {xl, xr};
    rho.v = {1.0, 1.0};
    rho.L = std::max(-xl, xr) + 1.0;
    rho.v_min = 1.0;
    rho.alpha = p.real("alpha");
    const FinChain chain(rho);
    const std::size_t runs = p.count("entry_runs");
    Rng rng = make_stream(p.seed(), "fin_entry", 0);
    std::size_t right = 0;
    for (std::size_t i = 0; i < runs; ++i) right += chain.entry(rng) == 1;
    const double exact = -xl / (xr - xl);
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(runs));
    const double emp = static_cast<double>(right) / static_cast<double>(runs);
    const double ze = combined_z(emp, 0.0, exact, se);
    auto es = c.open("entry.csv");
    es << "x_left,x_right,runs,right_fraction,exact,stderr,z\n"
       << std::setprecision(10) << xl << ',' << xr << ',' << runs << ',' << emp << ',' << exact << ',' << se << ','
       << ze << '\n';
    c.check(ze <= z, "right-entry fraction " + fmt(emp) + " against " + fmt(exact) + " (z " + fmt(ze, 3) + ")");
}

void run_fin_F(Ctx& c)
{
    const Params& p = c.p;
    const auto u = p.list("u_grid");
    const auto theta = p.list("theta");
    const double z = p.real("z"), a = p.real("a"), alpha = p.real("alpha"), vmin = p.real("v_min");
    const auto F = estimate_F(u, fin_ensemble(p));
    auto os = c.open("F.csv");
    F.write_csv(os);

    auto qs = c.open("q_a.csv");
    qs << "theta,q_a,q_0_direct,q_0_general\n" << std::setprecision(15);
    double gap0 = 0.0, prev = INFINITY;
    bool monotone = true;
    for (double th : theta) {
        const double q = q_a_theta(th, a, alpha, F.table);
        const double d = q_0_theta(th, F.table);
        const double g = q_a_theta(th, 0.0, alpha, F.table);
        gap0 = std::max(gap0, std::abs(d - g));
        monotone = monotone && q <= prev;
        prev = q;
        qs << th << ',' << q << ',' << d << ',' << g << '\n';
    }
    const double q0 = q_a_theta(0.0, a, alpha, F.table);

    bool below_zero = true, dominated = true, cdf_monotone = true;
    const double n_paths = static_cast<double>(p.count("disorders") * p.count("paths"));
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] < vmin) below_zero = below_zero && F.table.cdf[i] == 0.0;
        // binomial stderr under F = raw covers grid points where every path agreed
        const double r = F.raw_cdf[i];
        const double se = std::max(F.stderr[i], std::sqrt(r * (1.0 - r) / n_paths));
        dominated = dominated && F.table.cdf[i] <= r + z * se;
        if (i > 0) cdf_monotone = cdf_monotone && F.table.cdf[i] >= F.table.cdf[i - 1];
    }
    c.report << "FIN occupied-weight law, alpha " << alpha << ", q_a at a " << a << '\n';
    if (!F.warning.empty()) c.report << "warning: " << F.warning << '\n';
    c.check(below_zero, "F vanishes below v_min");
    c.check(cdf_monotone, "F is non-decreasing");
    c.check(dominated, "occupied weights stochastically dominate raw weights (within " + fmt(z) + " stderr)");
    c.check(std::abs(q0 - 1.0) < 1e-8, "q_a(0) = 1 (" + fmt(q0, 12) + ")");
    c.check(monotone, "q_a is non-increasing on the theta grid");
    c.check(gap0 <= 1e-10, "general q_a path at a = 0 equals the direct q_0 (max gap " + fmt(gap0, 3) + ")");
}

void run_rem(Ctx& c)
{
    const Params& p = c.p;
    const auto ns = p.list("N");
    const auto theta = p.list("theta");
    const double z = p.real("z");
    auto os = c.open("ratios.csv");
    auto ts = c.open("top_size.csv");
    ts << "N,E,mean_top_size,stderr,expected,z\n" << std::setprecision(10);
    std::vector<double> dev;
    bool tops = true;
    c.report << "REM beta " << p.real("beta") << " (beta_c " << fmt(rem_beta_c(), 6) << "), E " << p.real("E")
             << ", t_w " << p.real("t_w") << '\n';
    for (std::size_t i = 0; i < ns.size(); ++i) {
        RemEnsemble e;
        e.n_spins = static_cast<int>(ns[i]);
        e.beta = p.real("beta");
        e.E = p.real("E");
        e.disorders = p.count("disorders");
        e.paths_per_disorder = p.count("paths");
        e.seed = stream_key(p.seed(), "rem_N", static_cast<std::uint64_t>(e.n_spins));
        e.max_jumps = static_cast<std::uint64_t>(p.real("max_jumps"));
        const auto rep = rescaled_aging_check(e, theta, p.real("t_w"));
        rep.write_csv(os, i == 0);
        dev.push_back(rep.max_deviation());
        c.report << "N " << e.n_spins << ": c " << fmt(rep.c, 4) << ", max |ratio - 1| " << fmt(rep.max_deviation())
                 << '\n';
        for (const auto& r : rep.rows)
            c.report << "  theta " << r.theta << ": Pi " << fmt(r.Pi) << " +- " << fmt(r.stderr, 2) << ", H "
                     << fmt(r.H) << ", ratio " << fmt(r.ratio) << (r.feasible ? "" : " (infeasible)") << '\n';

        std::vector<double> sizes(e.disorders);
        for_each_task(e.disorders, e.execution, [&](std::size_t d) {
            sizes[d] = static_cast<double>(
                RemChain::sample(e.n_spins, e.beta, e.E, stream_key(e.seed, "rem_landscape", d)).top().size());
        });
        GroupedMean acc;
        for (double s : sizes) acc.add_group(s, s * s, 1);
        const Estimate m = acc.estimate();
        const double expected = expected_top_size(e.n_spins, e.E);
        const double zt = combined_z(m.value, m.stderr, expected, 0.0);
        tops = tops && zt <= z;
        ts << e.n_spins << ',' << e.E << ',' << m.value << ',' << m.stderr << ',' << expected << ',' << zt << '\n';
        c.report << "  top size " << fmt(m.value) << " +- " << fmt(m.stderr, 2) << " against " << fmt(expected)
                 << '\n';
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < dev.size(); ++i) decreasing = decreasing && dev[i] < dev[i - 1];
    c.check(decreasing, "max_theta |Pi_N / H - 1| decreases along N");
    c.check(tops, "mean top size within " + fmt(z) + " stderr of 2^N Q(u_N(E))");
}

void run_ssk(Ctx& c)
{
    const Params& p = c.p;
    SskEnsemble e;
    e.N = static_cast<int>(p.integer("N"));
    e.route = p.text("route") == "spectral" ? SskRoute::spectral : SskRoute::tridiagonal;
    e.params.dt = p.real("dt");
    e.params.f = Constraint{p.real("k")};
    e.matrices = p.count("matrices");
    e.noise_per_matrix = p.count("noise_per_matrix");
    e.seed = stream_key(p.seed(), "ssk", 0);
    RegimeOptions o;
    o.exp_betas = p.list("exp_betas");
    o.exp_t_w = p.real("exp_t_w");
    o.exp_window = p.list("exp_window");
    o.critical_t_w = p.real("critical_t_w");
    o.critical_window = p.list("critical_window");
    o.beta_lo = p.real("beta_lo");
    o.beta_hi = p.real("beta_hi");
    o.iterations = static_cast<int>(p.integer("iterations"));
    o.aging_beta = p.real("aging_beta");
    o.plateau_t_w = p.list("plateau_t_w");
    o.band_t_w = p.real("band_t_w");
    o.band_theta = p.list("band_theta");
    const auto rep = regime_report(e, o);

    auto os = c.open("regimes.csv");
    rep.write_csv(os);
    auto bs = c.open("band.csv");
    bs << "beta,N,t_w,theta,C_scaled,stderr\n" << std::setprecision(10);
    for (std::size_t i = 0; i < rep.aging.band_theta.size(); ++i)
        bs << rep.aging_beta << ',' << e.N << ',' << rep.aging.band_t_w << ',' << rep.aging.band_theta[i] << ','
           << rep.aging.band_values[i].value << ',' << rep.aging.band_values[i].stderr << '\n';
    c.report << "soft spherical SK, N " << e.N << " (" << p.text("route") << "), " << e.matrices * e.noise_per_matrix
             << " realizations, dt " << e.params.dt << '\n';
    rep.write_text(c.report);
    c.report << "  band ratio B/b " << fmt(rep.aging.band_hi / rep.aging.band_lo) << '\n';

    bool fits = true;
    for (const auto& [beta, fit] : rep.exponential) fits = fits && fit.r2 > p.real("r2_min") && fit.rate > 0.0;
    c.check(fits, "exponential fits below beta_c have R^2 > " + fmt(p.real("r2_min")) + " and positive rate");
    c.check(rep.critical.located && std::abs(rep.critical.slope - p.real("slope_target")) <= p.real("slope_tol"),
            "critical slope " + fmt(rep.critical.slope) + " within " + fmt(p.real("slope_tol")) + " of " +
                fmt(p.real("slope_target")));
    c.check(rep.aging.plateau_max_z <= p.real("z"),
            "C(t_w, 2 t_w) plateau consistent across t_w (max z " + fmt(rep.aging.plateau_max_z, 3) + ")");
    c.check(rep.aging.band_lo > 0.0, "C (t/t_w)^(3/4) stays in a positive band [" + fmt(rep.aging.band_lo) + ", " +
                                         fmt(rep.aging.band_hi) + "]");
}

using Runner = void (*)(Ctx&);

Runner runner_for(const std::string& tag)
{
    static const std::vector<std::pair<std::string, Runner>> table{
        {"tail_check", run_tail},           {"z1_aging", run_z1_aging},
        {"z1_subaging", run_z1_subaging},   {"z2_aging", run_z2_aging},
        {"z2_subaging", run_z2_subaging},   {"localization", run_localization},
        {"complete_graph_renewal", run_complete_graph}, {"fin_f_theta", run_fin_f},
        {"fin_F_q_a", run_fin_F},           {"rem_rescaled", run_rem},
        {"ssk_regimes", run_ssk},
    };
    for (const auto& [t, r] : table)
        if (t == tag) return r;
    throw ConfigError("no runner for '" + tag + "'");
}

// ---- budget ----------------------------------------------------------------

/// Jumps of one trap-model path up to `horizon`.
double trap_jumps(GraphKind kind, double alpha, double a, double horizon)
{
    const double h = std::max(horizon, 2.0);
    switch (kind) {
    case GraphKind::segment: return std::pow(h, std::min(1.0, (2.0 * alpha + a * (1.0 - alpha)) / (1.0 + alpha)));
    case GraphKind::torus2d: return std::pow(h, std::min(1.0, alpha + a * (1.0 - alpha))) * std::log(h);
    default: return std::pow(h, alpha);
    }
}

double trap_budget(const Params& p, const Graph& g, std::span<const double> tws, double theta_max,
                   std::size_t disorders, std::size_t paths)
{
    const double alpha = p.real("alpha"), a = p.has("a") ? p.real("a") : 0.0;
    double total = 0.0;
    for (double tw : tws) {
        double horizon = tw * (1.0 + theta_max);
        total += static_cast<double>(disorders) *
                 (static_cast<double>(g.vertex_count()) + static_cast<double>(paths) * trap_jumps(g.kind(), alpha, a, horizon));
    }
    return total;
}

}  // namespace

std::vector<KeySpec> ExperimentSchema::schema_keys() const
{
    std::vector<KeySpec> k = common_keys();
    k.insert(k.end(), keys.begin(), keys.end());
    return k;
}

const std::vector<ExperimentSchema>& experiment_schemas()
{
    static const std::vector<ExperimentSchema> s = make_schemas();
    return s;
}

const ExperimentSchema* find_schema(std::string_view tag)
{
    for (const auto& s : experiment_schemas())
        if (s.tag == tag) return &s;
    return nullptr;
}

ValidationReport validate(const Config& config)
{
    ValidationReport rep;
    if (!config.has("experiment")) {
        rep.violations.push_back("missing key 'experiment'");
        return rep;
    }
    rep.experiment = config.get("experiment");
    const ExperimentSchema* schema = find_schema(rep.experiment);
    if (!schema) {
        std::string tags;
        for (const auto& s : experiment_schemas()) tags += (tags.empty() ? "" : ", ") + s.tag;
        rep.violations.push_back("unknown experiment '" + rep.experiment + "' (known: " + tags + ")");
        return rep;
    }
    const auto keys = schema->schema_keys();
    for (const auto& [k, v] : config.entries()) {
        const bool known = std::any_of(keys.begin(), keys.end(), [&](const KeySpec& s) { return s.name == k; });
        if (known) continue;
        if (k == "graph" && rep.experiment == "ssk_regimes")
            rep.violations.push_back("ssk_regimes takes no graph spec (the coupling is a dense GOE-type matrix)");
        else
            rep.violations.push_back("unknown key '" + k + "' for experiment " + rep.experiment);
    }
    Config resolved = config;
    for (const auto& s : keys) {
        if (!config.has(s.name)) {
            if (!s.default_value) {
                rep.violations.push_back("missing required key '" + s.name + "' (" + s.help + ")");
                continue;
            }
            resolved.set(s.name, *s.default_value);
        }
        try {
            check_type(s, resolved.get(s.name));
        } catch (const ConfigError& e) {
            rep.violations.push_back(e.what());
        }
    }
    if (!rep.ok()) return rep;
    try {
        cross_checks(rep.experiment, Params(resolved), rep.violations);
    } catch (const ConfigError& e) {
        rep.violations.push_back(e.what());
    }
    return rep;
}

Config resolve(const Config& config)
{
    const auto rep = validate(config);
    if (!rep.ok()) {
        std::string msg = "invalid config:";
        for (const auto& v : rep.violations) msg += "\n  " + v;
        throw ConfigError(msg);
    }
    Config r = config;
    for (const auto& s : find_schema(rep.experiment)->schema_keys())
        if (!r.has(s.name)) r.set(s.name, *s.default_value);
    return r;
}

double estimate_budget(const Config& resolved)
{
    const Params p(resolved);
    const std::string& tag = p.text("experiment");
    auto maxof = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
    if (tag == "tail_check") return static_cast<double>(p.graph("graph").vertex_count());
    if (tag == "z1_aging" || tag == "z1_subaging") {
        const auto tws = p.list("t_w");
        double th = maxof(p.list("theta"));
        if (tag == "z1_subaging") th *= std::pow(tws.back(), 0.5);  // generous: shifted exponents reach further
        return trap_budget(p, Graph::segment(p.integer("L")), tws, th, p.count("disorders"), p.count("paths"));
    }
    if (tag == "z2_aging" || tag == "z2_subaging") {
        const Graph g = Graph::torus(p.integer("side"));
        double b = trap_budget(p, g, p.list("t_w"), maxof(p.list("theta")), p.count("disorders"), p.count("paths"));
        if (tag == "z2_aging" && p.count("quenched_paths") > 0)
            b += trap_budget(p, g, std::vector<double>{p.list("t_w").back()}, maxof(p.list("theta")), 1,
                             p.count("quenched_paths"));
        return b;
    }
    if (tag == "localization") {
        const Graph g = p.graph("graph");
        return trap_budget(p, g, std::vector<double>{maxof(p.list("times"))}, 0.0, p.count("disorders"),
                           p.count("paths"));
    }
    if (tag == "complete_graph_renewal") {
        const auto tws = p.list("t_w");
        const double rows = tws.back() / p.real("step") * 2.0;
        const double renewal = rows * rows * static_cast<double>(tws.size() * p.list("theta").size());
        return renewal + trap_budget(p, Graph::complete(p.integer("M")), tws, maxof(p.list("theta")),
                                     p.count("disorders"), p.count("paths"));
    }
    if (tag == "fin_f_theta" || tag == "fin_F_q_a") {
        const double atoms = 2.0 * p.real("fin_L") * std::pow(p.real("v_min"), -p.real("alpha"));
        const double paths = static_cast<double>(p.count("disorders") * p.count("paths"));
        double b = static_cast<double>(p.count("disorders")) * atoms + paths * std::sqrt(atoms) * 10.0;
        if (tag == "fin_f_theta") {
            TrapEnsemble dummy;
            const double alpha = p.real("alpha");
            b += static_cast<double>(p.count("lattice_disorders")) *
                 (2.0 * static_cast<double>(p.integer("lattice_L")) +
                  static_cast<double>(p.count("lattice_paths")) *
                      trap_jumps(GraphKind::segment, alpha, p.real("lattice_a"),
                                 p.real("lattice_t_w") * (1.0 + maxof(p.list("theta")))));
            b += static_cast<double>(p.count("entry_runs"));
        }
        return b;
    }
    if (tag == "rem_rescaled") {
        const double alpha = rem_beta_c() / p.real("beta");
        double b = 0.0;
        for (double n : p.list("N")) {
            const double states = std::ldexp(1.0, static_cast<int>(n));
            const double top = std::max(1.0, expected_top_size(static_cast<int>(n), p.real("E")));
            const double visits = std::pow(p.real("t_w") * (1.0 + maxof(p.list("theta"))), alpha) + 1.0;
            b += static_cast<double>(p.count("disorders")) *
                 (2.0 * states + static_cast<double>(p.count("paths")) * visits * states / top);
        }
        return b;
    }
    if (tag == "ssk_regimes") {
        const double real = static_cast<double>(p.count("matrices") * p.count("noise_per_matrix"));
        const double N = static_cast<double>(p.integer("N"));
        const double dt = p.real("dt");
        const double crit = (p.real("critical_t_w") + maxof(p.list("critical_window"))) / dt *
                            static_cast<double>(p.integer("iterations") + 3);
        const double expo = (p.real("exp_t_w") + maxof(p.list("exp_window"))) / dt *
                            static_cast<double>(p.list("exp_betas").size());
        const double aging = std::max(2.0 * maxof(p.list("plateau_t_w")),
                                      p.real("band_t_w") * (1.0 + maxof(p.list("band_theta")))) / dt;
        double b = real * N * (crit + expo + aging);
        if (p.text("route") == "spectral") b += static_cast<double>(p.count("matrices")) * 10.0 * N * N * N;
        return b;
    }
    return 0.0;
}

RunResult run_experiment(const Config& config, const RunOptions& ro)
{
    const Config resolved = resolve(config);
    const Params p(resolved);
    const double estimate = estimate_budget(resolved);
    if (estimate > p.real("max_events")) throw BudgetRefused(estimate, p.real("max_events"));

    const int requested = ro.workers > 0 ? ro.workers : static_cast<int>(p.integer("workers"));
    if (requested > 0) set_workers(requested);

    Ctx c{p, ro.out.empty() ? std::filesystem::path(p.text("out")) : ro.out, {}, {}, true};
    std::filesystem::create_directories(c.dir);
    const auto t0 = std::chrono::steady_clock::now();
    c.report << "experiment " << p.text("experiment") << ", seed " << p.seed() << '\n';
    runner_for(p.text("experiment"))(c);
    c.report << (c.pass ? "RESULT PASS" : "RESULT FAIL") << '\n';
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    {
        auto rs = c.open("report.txt");
        rs << c.report.str();
    }
    {
        auto ms = c.open("manifest.txt");
        ms << "# agelab " << agelab_version() << '\n'
           << "# wall_seconds=" << std::setprecision(6) << wall << '\n'
           << "# workers=" << workers() << '\n'
           << "# estimated_cost=" << std::setprecision(4) << estimate << '\n';
        ms << "# files:";
        for (const auto& f : c.files)
            if (f.filename() != "manifest.txt") ms << ' ' << f.filename().string();
        ms << '\n';
        Config echo = resolved;
        echo.erase("out");
        echo.erase("workers");
        echo.write(ms);
    }
    RunResult r;
    r.pass = c.pass;
    r.summary = c.report.str();
    r.files = c.files;
    r.wall_seconds = wall;
    return r;
}

}  // namespace agelab
