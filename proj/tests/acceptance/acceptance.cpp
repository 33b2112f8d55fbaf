// Acceptance gate. `acceptance <n>` runs criterion n (1..13) and prints one
// line "criterion n: PASS|FAIL <detail>"; experiment reports go to stdout
// above it. Outputs land in ./acceptance_out/<n>/. Exit status 0 iff it passed.

#include "agelab/analytic.hpp"
#include "agelab/experiments.hpp"
#include "agelab/fin.hpp"
#include "agelab/rem.hpp"
#include "agelab/ssk.hpp"
#include "agelab/trapwalk.hpp"
#include "agelab/twopoint.hpp"

#include "semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace agelab;
namespace fs = std::filesystem;

namespace {

// tolerances
constexpr double norm_tol = 1e-8;
constexpr double slope_tol = 0.02;
constexpr double renewal_rel_tol = 0.02;
constexpr double halving_tol = 1e-3;
constexpr double z_max = 3.0;
constexpr double balance_rel_tol = 1e-12;
constexpr double q0_tol = 1e-10;
constexpr double edge_tol = 0.1;
constexpr double mass_tol = 0.02;

struct Outcome {
    bool pass = true;
    std::string detail;

    void need(bool ok, const std::string& what)
    {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [fail]");
    }
};

std::string num(double x, int prec = 4)
{
    std::ostringstream os;
    os.precision(prec);
    os << x;
    return os.str();
}

RunResult run(const std::string& text, const fs::path& out, int workers = 0)
{
    RunOptions o;
    o.out = out;
    o.workers = workers;
    const auto r = run_experiment(Config::parse_string(text), o);
    std::cout << "--- " << out.string() << " (" << num(r.wall_seconds, 3) << " s)\n" << r.summary;
    return r;
}

Outcome c01(const fs::path&)
{
    Outcome o;
    double worst = 0.0;
    for (double alpha : {0.3, 0.5, 0.8}) {
        worst = std::max(worst, std::abs(h_theta(0.0, alpha) - 1.0));
        worst = std::max(worst, std::abs(H_theta(0.0, alpha) - 1.0));
        worst = std::max(worst, std::abs(F_infinity(0.0, alpha)));
    }
    DistributionTable F;
    F.u = {1e-3, 0.01, 0.1, 1, 10, 100};
    F.cdf = {0.0, 0.05, 0.2, 0.55, 0.9, 0.97};
    for (double a : {0.0, 0.3, 0.7}) worst = std::max(worst, std::abs(q_a_theta(0.0, a, 0.5, F) - 1.0));
    o.need(worst <= norm_tol, "max |h(0)-1|, |H(0)-1|, |q_a(0)-1|, |F(0)| = " + num(worst));
    const double half = h_theta(1.0, 0.5);
    o.need(std::abs(half - 0.5) <= norm_tol, "h(1; 1/2) - 1/2 = " + num(half - 0.5));
    return o;
}

Outcome c02(const fs::path&)
{
    Outcome o;
    const std::vector<double> small{1e-5, 3e-5, 1e-4, 3e-4, 1e-3}, large{1e3, 3e3, 1e4, 3e4, 1e5};
    for (double alpha : {0.3, 0.5, 0.8}) {
        std::vector<double> lo, hi;
        for (double t : small) lo.push_back(1.0 - H_theta(t, alpha));
        for (double t : large) hi.push_back(H_theta(t, alpha));
        const double s0 = loglog_fit(small, lo).slope, s1 = loglog_fit(large, hi).slope;
        o.need(std::abs(s0 - (1.0 - alpha)) <= slope_tol && std::abs(s1 + alpha) <= slope_tol,
               "alpha " + num(alpha) + ": slopes " + num(s0) + ", " + num(s1));
    }
    return o;
}

Outcome c03(const fs::path&)
{
    Outcome o;
    const double alpha = 0.5, t_w = 1e4;
    const auto theta = log_grid(0.1, 10.0, 9);
    std::vector<double> offsets;
    for (double th : theta) offsets.push_back(th * t_w);
    const auto coarse = solve_renewal(alpha, t_w, 0.25, offsets);
    const auto fine = solve_renewal(alpha, t_w, 0.125, offsets);
    double worst = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j)
        worst = std::max(worst, std::abs(coarse.value(t_w, j) / H_theta(theta[j], alpha) - 1.0));
    o.need(worst <= renewal_rel_tol, "max relative error vs H " + num(worst));
    const double gap = renewal_halving_gap(coarse, fine);
    o.need(gap < halving_tol, "halving gap " + num(gap));
    return o;
}

Outcome c04(const fs::path& dir)
{
    Outcome o;
    const auto r = run("experiment = complete_graph_renewal\nM = 1e4\nalpha = 0.5\nt_w = 1e2,1e3\ntheta = 0.3,1,3\n"
                       "disorders = 100\npaths = 1000\nz = 3\n",
                       dir / "complete");
    o.need(r.pass, "complete_graph_renewal M=1e4, 1e5 paths");
    return o;
}

Outcome c05(const fs::path&)
{
    Outcome o;
    const double t_w = 3.0;
    const std::vector<double> t{0.5, 2.0, 6.0};
    const std::size_t n = 20000;
    std::vector<std::string> graphs{"segment:1", "segment:2", "segment:3"};
    for (int m = 1; m <= 8; ++m) graphs.push_back("complete:" + std::to_string(m));
    double worst = 0.0;
    std::string where;
    int cells = 0;
    for (const auto& spec : graphs)
        for (double a : {0.0, 0.5, 1.0}) {
            const auto land = EnergyLandscape::sample(Graph::parse(spec), EnergyDistribution::exponential, 1.5, 2024);
            TrapEnsemble e;
            e.graph = land.graph();
            e.beta = land.beta();
            e.walk.a = a;
            e.walk.start = StartPolicy::fixed(0);
            e.walk.boundary = BoundaryPolicy::allow;
            e.averaging = Averaging::quenched;
            e.paths_per_disorder = n;
            e.landscape = std::make_shared<EnergyLandscape>(land);
            e.seed = 7;
            const auto tab = sample_two_point(e, t_w, t);
            const auto Q = oracle::generator(land, a, e.walk.nu);
            Eigen::RowVectorXd p0 = Eigen::RowVectorXd::Zero(Q.rows());
            p0(0) = 1.0;
            for (std::size_t k = 0; k < t.size(); ++k) {
                const auto ex = oracle::two_point(Q, p0, t_w, t[k]);
                // indicator means over independent paths: stderr sqrt(p (1 - p) / n) at the exact p
                auto z = [&](double got, double p) {
                    const double se = std::sqrt(p * (1.0 - p) / double(n));
                    const double d = std::abs(got - p);
                    return se > 0.0 ? d / se : (d < 1e-12 ? 0.0 : INFINITY);
                };
                for (auto [zz, kind] : {std::pair{z(tab.R[k].value, ex.R), "R"}, std::pair{z(tab.Pi[k].value, ex.Pi), "Pi"}}) {
                    ++cells;
                    if (zz > worst) {
                        worst = zz;
                        where = std::string(kind) + " " + spec + " a=" + num(a) + " t=" + num(t[k]);
                    }
                }
            }
        }
    o.need(worst <= z_max, std::to_string(cells) + " cells, max z " + num(worst, 3) + " at " + where);
    return o;
}

Outcome c06(const fs::path&)
{
    Outcome o;
    double worst = 0.0;
    std::size_t edges = 0;
    for (const char* spec : {"segment:1000", "torus:64", "complete:400"})
        for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const auto land = EnergyLandscape::sample(Graph::parse(spec), EnergyDistribution::exponential, 2.0, 99);
            WalkParams p;
            p.a = a;
            p.boundary = BoundaryPolicy::allow;
            const TrapWalk w(land, p);
            for (Vertex x = 0; x < land.graph().vertex_count(); ++x)
                for (Vertex y : land.graph().neighbors(x)) {
                    const double l = land.depth(x) * w.rate(x, y), r = land.depth(y) * w.rate(y, x);
                    worst = std::max(worst, std::abs(l - r) / std::max(l, r));
                    ++edges;
                }
        }
    o.need(worst <= balance_rel_tol, std::to_string(edges) + " directed edges, max relative defect " + num(worst));

    const auto land = EnergyLandscape::from_energies(Graph::complete(3), {0.2, 0.9, 1.6}, 2.0);
    double sum = 0.0;
    for (double d : land.depths()) sum += d;
    const std::size_t n = 40000;
    double zmax = 0.0;
    for (double a : {0.0, 0.5, 1.0}) {
        WalkParams p;
        p.a = a;
        p.start = StartPolicy::fixed(0);
        const TrapWalk w(land, p);
        const double horizon = 50.0 * sum;
        std::vector<std::size_t> hist(3, 0);
        for (std::size_t i = 0; i < n; ++i) {
            Rng rng(stream_key(31, "occupation", i));
            ++hist[w.run(rng, horizon, [](double, Vertex, Vertex) { return true; })];
        }
        for (Vertex x = 0; x < 3; ++x) {
            const double pi = land.depth(x) / sum;
            zmax = std::max(zmax, std::abs(double(hist[x]) / double(n) - pi) / std::sqrt(pi * (1 - pi) / double(n)));
        }
    }
    o.need(zmax <= z_max, "Complete(3) occupation vs tau/sum tau, max z " + num(zmax, 3));
    return o;
}

Outcome c07(const fs::path& dir)
{
    Outcome o;
    const std::string base = "alpha = 0.5\nL = 3000\ndisorders = 4000\npaths = 5\nz = 3\n";
    const auto r = run("experiment = z1_aging\nt_w = 1e3,1e4,1e5\n" + base, dir / "aging");
    o.need(r.pass, "R collapse over t_w 1e3,1e4,1e5");
    for (const char* a : {"0", "0.5"}) {
        const auto s = run("experiment = z1_subaging\nt_w = 1e4,1e5\na = " + std::string(a) + "\n" + base,
                           dir / ("subaging_a" + std::string(a)));
        o.need(s.pass, "Pi sub-aging a=" + std::string(a) + " (collapse at gamma, none at gamma +- 0.15)");
    }
    return o;
}

Outcome c08(const fs::path& dir)
{
    Outcome o;
    const auto r = run("experiment = fin_f_theta\nalpha = 0.5\ntheta = 0.3,1,3\n", dir / "fin");
    o.need(r.pass, "FIN f(theta) vs lattice R limit and entry split");
    return o;
}

Outcome c09(const fs::path&)
{
    Outcome o;
    FinEnsemble e;
    e.disorders = 40;
    e.paths_per_disorder = 20;
    e.seed = 3;
    const auto est = estimate_F(log_grid(1e-4, 1e4, 33), e);
    const DistributionTable synth{{1e-3, 0.01, 0.1, 1, 10, 100}, {0.0, 0.05, 0.2, 0.55, 0.9, 1.0}};
    double worst = 0.0;
    for (const auto* F : {&est.table, &synth})
        for (double th : log_grid(1e-3, 1e3, 13)) worst = std::max(worst, std::abs(q_a_theta(th, 0.0, 0.5, *F) - q_0_theta(th, *F)));
    o.need(worst <= q0_tol, "max |q_a(a=0) - q_0| " + num(worst));
    return o;
}

Outcome c10(const fs::path& dir)
{
    Outcome o;
    const auto r = run("experiment = z2_aging\nalpha = 0.5\nside = 512\nt_w = 1e3,1e4\n", dir / "z2_aging");
    o.need(r.pass, "R at t = theta t_w improving over t_w 1e3,1e4");
    const auto s = run("experiment = z2_subaging\nalpha = 0.5\na = 0\nside = 512\nt_w = 1e3,1e4,1e5\n", dir / "z2_subaging");
    o.need(s.pass, "Pi at t = theta t_w / ln t_w improving over t_w 1e3,1e4");
    const std::string loc = "experiment = localization\nalpha = 0.5\ntimes = 1e3,1e4,1e5\n";
    const auto t = run(loc + "graph = torus:512\n", dir / "loc_torus");
    o.need(t.pass, "localization decays on the torus");
    const auto g = run(loc + "graph = segment:3000\n", dir / "loc_segment");
    o.need(g.pass, "localization persists on the segment");
    return o;
}

Outcome c11(const fs::path& dir)
{
    Outcome o;
    const auto r = run("experiment = rem_rescaled\nN = 8,12,16\nbeta = 2\nE = -3\nt_w = 10\n", dir / "rem");
    o.need(r.pass, "REM trend 8 -> 12 -> 16 and top size");
    // kernel: stay with 1 - p, move to each of the N flips with p / N, p = exp(-beta sqrt(N) E^+)
    double worst = 0.0;
    for (int N : {8, 12, 16}) {
        const auto chain = RemChain::sample(N, 2.0, -3.0, 5);
        for (Vertex s = 0; s < (Vertex{1} << N); ++s) {
            const double p = chain.exit_probability(s);
            const double expect = std::exp(-2.0 * std::sqrt(double(N)) * std::max(chain.landscape().energy(s), 0.0));
            double row = 1.0 - p;
            for (int i = 0; i < N; ++i) row += p / N;
            worst = std::max({worst, std::abs(p - expect) / expect, std::abs(row - 1.0)});
        }
    }
    o.need(worst <= 1e-14, "kernel normalization, max defect " + num(worst));
    return o;
}

Outcome c12(const fs::path& dir)
{
    Outcome o;
    const int N = 2000;
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sample_coupling(N, 11).A, Eigen::EigenvaluesOnly).eigenvalues();
    int bulk = 0;
    for (int i = 0; i < N; ++i) bulk += std::abs(ev(i)) <= 1.0;
    // semicircle mass of [-1, 1]: (sqrt(3) + 2 pi / 3) / (2 pi)
    const double mass = (std::sqrt(3.0) + 2.0 * std::numbers::pi / 3.0) / (2.0 * std::numbers::pi);
    o.need(std::abs(ev(N - 1) - 2.0) <= edge_tol, "edge " + num(ev(N - 1)));
    o.need(std::abs(bulk / double(N) - mass) <= mass_tol, "bulk mass " + num(bulk / double(N)) + " vs " + num(mass));
    const auto r = run("experiment = ssk_regimes\nN = 1000\n", dir / "ssk");
    o.need(r.pass, "ssk_regimes N=1000 (exponential fits, critical slope, plateau, band)");
    return o;
}

std::map<std::string, std::string> csv_bytes(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") {
            std::ifstream is(e.path(), std::ios::binary);
            out[e.path().filename().string()] = std::string(std::istreambuf_iterator<char>(is), {});
        }
    return out;
}

Outcome c13(const fs::path& dir)
{
    Outcome o;
    const std::vector<std::pair<std::string, std::string>> family{
        {"trap", "experiment = z1_aging\nalpha = 0.5\nL = 1000\nt_w = 100,1000\ntheta = 0.3,1,3\ndisorders = 200\npaths = 4\n"},
        {"renewal", "experiment = complete_graph_renewal\nM = 500\nalpha = 0.5\nt_w = 50\ndisorders = 8\npaths = 50\n"},
        {"fin", "experiment = fin_F_q_a\na = 0.3\ndisorders = 16\npaths = 8\n"},
        {"rem", "experiment = rem_rescaled\nN = 8,10\ndisorders = 8\npaths = 16\n"},
        {"ssk", "experiment = ssk_regimes\nN = 120\nmatrices = 3\niterations = 2\n"},
    };
    for (const auto& [name, cfg] : family) {
        const auto a = dir / (name + "_w1_a"), b = dir / (name + "_w1_b"), c = dir / (name + "_w8");
        run(cfg, a, 1);
        run(cfg, b, 1);
        run(cfg, c, 8);
        const auto x = csv_bytes(a);
        const bool same = !x.empty() && x == csv_bytes(b) && x == csv_bytes(c);
        o.need(same, name + " (" + std::to_string(x.size()) + " csv)");
    }
    return o;
}

const std::vector<std::function<Outcome(const fs::path&)>> criteria{c01, c02, c03, c04, c05, c06, c07,
                                                                     c08, c09, c10, c11, c12, c13};

}  // namespace

int main(int argc, char** argv)
{
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::stoi(argv[i]));
    if (which.empty())
        for (int i = 1; i <= int(criteria.size()); ++i) which.push_back(i);
    bool all = true;
    for (int n : which) {
        if (n < 1 || n > int(criteria.size())) {
            std::cerr << "no criterion " << n << '\n';
            return 2;
        }
        const fs::path dir = fs::path("acceptance_out") / std::to_string(n);
        fs::remove_all(dir);
        fs::create_directories(dir);
        Outcome r;
        try {
            r = criteria[n - 1](dir);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        std::cout << "criterion " << n << ": " << (r.pass ? "PASS" : "FAIL") << ' ' << r.detail << std::endl;
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
