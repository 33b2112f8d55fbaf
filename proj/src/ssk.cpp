#include "agelab/ssk.hpp"

#include "agelab/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <ostream>
#include <sstream>

namespace agelab {

CouplingMatrix sample_coupling(int N, std::uint64_t seed)
{
    if (N < 2) throw std::invalid_argument("coupling needs N >= 2");
    const auto n = static_cast<std::size_t>(N);
    const std::uint64_t key = stream_key(seed, "ssk_coupling", 0);
    CouplingMatrix J;
    J.N = N;
    J.seed = seed;
    J.A.resize(N, N);
    const double scale = 1.0 / std::sqrt(2.0 * N);
    for (std::size_t i = 0; i < n; ++i) {
        J.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 2.0 * scale * counter_normal(key, i * n + i);
        for (std::size_t j = 0; j < i; ++j) {
            const double v = scale * (counter_normal(key, i * n + j) + counter_normal(key, j * n + i));
            J.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            J.A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return J;
}

Spectrum spectrum(const CouplingMatrix& J)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J.A);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

TridiagonalCoupling sample_tridiagonal_coupling(int N, std::uint64_t seed)
{
    if (N < 2) throw std::invalid_argument("coupling needs N >= 2");
    Rng rng(stream_key(seed, "ssk_tridiagonal", 0));
    TridiagonalCoupling T;
    T.N = N;
    T.seed = seed;
    T.diag.resize(N);
    T.off.resize(N - 1);
    const double Nd = static_cast<double>(N);
    for (int i = 0; i < N; ++i) T.diag(i) = rng.normal() * std::sqrt(2.0 / Nd);
    for (int k = 0; k < N - 1; ++k) {
        std::chi_squared_distribution<double> chi2(static_cast<double>(N - 1 - k));
        T.off(k) = std::sqrt(chi2(rng) / Nd);
    }
    return T;
}

TridiagonalCoupling tridiagonalize(const CouplingMatrix& J, Eigen::MatrixXd* Q)
{
    Eigen::Tridiagonalization<Eigen::MatrixXd> tri(J.A);
    TridiagonalCoupling T;
    T.N = J.N;
    T.seed = J.seed;
    T.diag = tri.diagonal();
    T.off = tri.subDiagonal();
    if (Q) *Q = tri.matrixQ();
    return T;
}

std::string Constraint::tag() const
{
    std::ostringstream os;
    os << "quadratic:" << k;
    return os.str();
}

Constraint Constraint::parse(std::string_view tag)
{
    if (tag == "quadratic") return {1.0};
    if (tag.starts_with("quadratic:")) {
        const double k = std::stod(std::string(tag.substr(10)));
        if (!(k > 0.0)) throw std::invalid_argument("constraint scale must be > 0");
        return {k};
    }
    throw std::invalid_argument("unknown constraint '" + std::string(tag) + "'");
}

void SskParams::validate() const
{
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    if (!(f.k > 0.0)) throw std::invalid_argument("constraint scale must be > 0");
    if (snapshots.empty()) throw std::invalid_argument("at least one snapshot time is required");
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        if (!(snapshots[i] >= 0.0)) throw std::invalid_argument("snapshot times must be >= 0");
        if (i > 0 && !(snapshots[i] > snapshots[i - 1])) throw std::invalid_argument("snapshots must increase");
        const double steps = snapshots[i] / dt;
        if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps))
            throw std::invalid_argument("snapshot time " + std::to_string(snapshots[i]) + " is not a multiple of dt");
    }
}

std::size_t SskRun::index_of(double t) const
{
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
    throw std::out_of_range("no snapshot at t = " + std::to_string(t));
}

double SskRun::overlap(double s, double t) const
{
    return states[index_of(s)].dot(states[index_of(t)]) / static_cast<double>(N);
}

void matvec(const Eigen::MatrixXd& A, const Eigen::VectorXd& x, Eigen::VectorXd& y, Execution ex)
{
    // A is symmetric, so row i is column i: contiguous in column-major storage
    const Eigen::Index n = A.rows();
    y.resize(n);
    if (ex == Execution::serial) {
        for (Eigen::Index i = 0; i < n; ++i) y(i) = A.col(i).dot(x);
        return;
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) y(i) = A.col(i).dot(x);
}

namespace {

constexpr double stability_limit = 0.1;

// Shared Euler-Maruyama driver; `drift(v, out)` writes the linear part of
// the drift excluding -f'(r) v.
template <class Drift>
SskRun em_loop(int N, const SskParams& p, const NoiseSource& noise, Drift&& drift)
{
    p.validate();
    SskRun run;
    run.N = N;
    run.beta = p.beta;
    run.dt = p.dt;
    Eigen::VectorXd v(N), xi(N), lin(N);
    noise(v);
    const double Nd = static_cast<double>(N);
    const auto last = static_cast<std::uint64_t>(std::llround(p.snapshots.back() / p.dt));
    std::size_t next = 0;
    for (std::uint64_t step = 0;; ++step) {
        const double r = v.squaredNorm() / Nd;
        if (!std::isfinite(r)) throw SskDivergence("non-finite radius at t = " + std::to_string(step * p.dt));
        if (r > p.radius_cap) throw SskDivergence("radius exceeded cap; reduce dt");
        while (next < p.snapshots.size() && std::llround(p.snapshots[next] / p.dt) == static_cast<long long>(step)) {
            run.times.push_back(p.snapshots[next]);
            run.states.push_back(v);
            run.radius.push_back(r);
            ++next;
        }
        if (step == last) break;
        // split the step when dt * (2 beta + f'(r)) breaks the guard; 2 is the
        // semicircle edge, so every route splits identically
        const double stiffness = 2.0 * p.beta + p.f.derivative(r);
        const auto parts = static_cast<int>(std::max(1.0, std::ceil(p.dt * stiffness / stability_limit)));
        const double h = p.dt / parts;
        run.substeps += static_cast<std::uint64_t>(parts - 1);
        for (int s = 0; s < parts; ++s) {
            const double rs = s == 0 ? r : v.squaredNorm() / Nd;
            drift(v, lin);
            v += h * (lin - p.f.derivative(rs) * v);
            if (p.noise) {
                noise(xi);
                v += std::sqrt(h) * xi;
            }
        }
    }
    return run;
}

NoiseSource rng_noise(Rng& rng)
{
    return [&rng](Eigen::Ref<Eigen::VectorXd> out) {
        for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = rng.normal();
    };
}

}  // namespace

SskRun integrate_dense(const CouplingMatrix& J, const SskParams& p, const NoiseSource& noise, Execution ex)
{
    Eigen::VectorXd Av(J.N);
    return em_loop(J.N, p, noise, [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        matvec(J.A, v, Av, ex);
        out = p.beta * Av;
    });
}

SskRun integrate_dense(const CouplingMatrix& J, const SskParams& p, Rng& rng, Execution ex)
{
    return integrate_dense(J, p, rng_noise(rng), ex);
}

SskRun integrate_spectral(const Spectrum& S, const SskParams& p, const NoiseSource& noise)
{
    const Eigen::VectorXd bl = p.beta * S.lambda;
    return em_loop(static_cast<int>(S.lambda.size()), p, noise,
                   [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) { out = bl.cwiseProduct(v); });
}

SskRun integrate_spectral(const Spectrum& S, const SskParams& p, Rng& rng)
{
    return integrate_spectral(S, p, rng_noise(rng));
}

SskRun integrate_tridiagonal(const TridiagonalCoupling& T, const SskParams& p, const NoiseSource& noise)
{
    const Eigen::Index n = T.diag.size();
    return em_loop(T.N, p, noise, [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        out = T.diag.cwiseProduct(v);
        out.head(n - 1) += T.off.cwiseProduct(v.tail(n - 1));
        out.tail(n - 1) += T.off.cwiseProduct(v.head(n - 1));
        out *= p.beta;
    });
}

SskRun integrate_tridiagonal(const TridiagonalCoupling& T, const SskParams& p, Rng& rng)
{
    return integrate_tridiagonal(T, p, rng_noise(rng));
}

std::vector<Spectrum> ensemble_spectra(const SskEnsemble& ens)
{
    if (ens.route != SskRoute::spectral) throw std::invalid_argument("spectra belong to the spectral route");
    std::vector<Spectrum> out(ens.matrices);
    for_each_task(ens.matrices, ens.execution, [&](std::size_t m) {
        out[m] = spectrum(sample_coupling(ens.N, stream_key(ens.seed, "ssk_matrix", m)));
    });
    return out;
}

SskEnsembleResult run_ssk_ensemble(const SskEnsemble& ens, const std::vector<Spectrum>* spectra)
{
    if (ens.matrices == 0 || ens.noise_per_matrix == 0) throw std::invalid_argument("SSK ensemble must be non-empty");
    if (spectra && spectra->size() != ens.matrices) throw std::invalid_argument("spectra do not match the ensemble");
    ens.params.validate();
    SskEnsembleResult res;
    res.runs.resize(ens.matrices * ens.noise_per_matrix);
    res.top_eigenvalues.resize(ens.matrices);
    if (ens.route == SskRoute::tridiagonal) {
        if (spectra) throw std::invalid_argument("spectra belong to the spectral route");
        res.top_eigenvalues.clear();
        for_each_task(ens.matrices, ens.execution, [&](std::size_t m) {
            const auto T = sample_tridiagonal_coupling(ens.N, stream_key(ens.seed, "ssk_matrix", m));
            for (std::size_t k = 0; k < ens.noise_per_matrix; ++k) {
                const std::size_t r = m * ens.noise_per_matrix + k;
                Rng rng = make_stream(ens.seed, "ssk_noise", r);
                res.runs[r] = integrate_tridiagonal(T, ens.params, rng);
            }
        });
        return res;
    }
    for_each_task(ens.matrices, ens.execution, [&](std::size_t m) {
        Spectrum local;
        const Spectrum* S = spectra ? &(*spectra)[m] : nullptr;
        if (!S) {
            local = spectrum(sample_coupling(ens.N, stream_key(ens.seed, "ssk_matrix", m)));
            S = &local;
        }
        if (S->lambda.size() != ens.N) throw std::invalid_argument("spectrum size differs from N");
        res.top_eigenvalues[m] = S->lambda.maxCoeff();
        for (std::size_t k = 0; k < ens.noise_per_matrix; ++k) {
            const std::size_t r = m * ens.noise_per_matrix + k;
            Rng rng = make_stream(ens.seed, "ssk_noise", r);
            res.runs[r] = integrate_spectral(*S, ens.params, rng);
        }
    });
    return res;
}

Estimate empirical_covariance(const SskEnsembleResult& res, double s, double t)
{
    GroupedMean acc;
    for (const auto& run : res.runs) {
        const double c = run.overlap(s, t);
        acc.add_group(c, c * c, 1);
    }
    return acc.estimate();
}

Estimate mean_radius(const SskEnsembleResult& res, double t) { return empirical_covariance(res, t, t); }

SskMeanField::SskMeanField(std::function<double(double)> Mtilde, double edge, double beta, double t_max, double h,
                           double k)
    : beta_(beta), edge_(edge), h_(h), k_(k)
{
    if (!(h > 0.0) || !(t_max > 0.0)) throw std::invalid_argument("mean-field grid needs h > 0 and t_max > 0");
    const auto n = static_cast<std::size_t>(std::ceil(t_max / h));
    Mt_.resize(2 * n + 1);
    for (std::size_t i = 0; i <= 2 * n; ++i) Mt_[i] = Mtilde(0.5 * h * static_cast<double>(i));
    // trapezoid in time and in the convolution; G enters the new point linearly
    Gt_.assign(n + 1, 0.0);
    Gt_[0] = 1.0;
    const double decay = 2.0 * beta_ * edge_;
    auto M = [&](std::size_t i) { return Mt_[2 * i]; };
    std::vector<double> F(n + 1);
    F[0] = 2.0 * k_ * M(0) - decay;
    for (std::size_t m = 1; m <= n; ++m) {
        double conv = 0.5 * M(m) * Gt_[0];
        for (std::size_t j = 1; j < m; ++j) conv += M(m - j) * Gt_[j];
        conv *= h;
        // F_m = 2k (M_m + conv + h/2 M_0 G_m) - decay G_m
        const double a = 2.0 * k_ * (M(m) + conv);
        const double b = 2.0 * k_ * 0.5 * h * M(0) - decay;
        Gt_[m] = (Gt_[m - 1] + 0.5 * h * (F[m - 1] + a)) / (1.0 - 0.5 * h * b);
        F[m] = a + b * Gt_[m];
    }
}

SskMeanField SskMeanField::semicircle(double beta, double t_max, double h, double k)
{
    auto Mt = [beta](double t) {
        // x = 2 - lambda = y^2 puts the edge singularity at y = 0
        const double c = 2.0 * beta * t;
        const double ymax = c > 0.0 ? std::min(2.0, std::sqrt(60.0 / c)) : 2.0;
        QuadOptions q;
        q.abs_tol = 1e-13;
        q.rel_tol = 1e-11;
        return integrate_or_throw(
            [c](double y) { return y * y * std::sqrt(std::max(0.0, 4.0 - y * y)) * std::exp(-c * y * y) / std::numbers::pi; },
            0.0, ymax, q, "semicircle moment");
    };
    return SskMeanField(Mt, 2.0, beta, t_max, h, k);
}

SskMeanField SskMeanField::empirical(std::span<const double> lambda, double beta, double t_max, double h, double k)
{
    if (lambda.empty()) throw std::invalid_argument("empty spectrum");
    const double edge = *std::max_element(lambda.begin(), lambda.end());
    std::vector<double> gaps(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) gaps[i] = edge - lambda[i];
    auto Mt = [gaps, beta](double t) {
        double s = 0.0;
        for (double g : gaps) s += std::exp(-2.0 * beta * g * t);
        return s / static_cast<double>(gaps.size());
    };
    return SskMeanField(Mt, edge, beta, t_max, h, k);
}

double SskMeanField::Mt_at(double t) const
{
    const double x = t / (0.5 * h_);
    const auto i = static_cast<std::size_t>(std::llround(x));
    if (std::abs(x - static_cast<double>(i)) > 1e-6 || i >= Mt_.size())
        throw std::out_of_range("mean-field time off grid");
    return Mt_[i];
}

double SskMeanField::radius(double t) const
{
    const auto n = static_cast<std::size_t>(std::llround(t / h_));
    if (n >= Gt_.size() || std::abs(t / h_ - static_cast<double>(n)) > 1e-6)
        throw std::out_of_range("mean-field time off grid");
    double conv = 0.5 * Mt_[2 * n] * Gt_[0] + (n > 0 ? 0.5 * Mt_[0] * Gt_[n] : 0.0);
    for (std::size_t j = 1; j < n; ++j) conv += Mt_[2 * (n - j)] * Gt_[j];
    return (Mt_[2 * n] + (n > 0 ? h_ * conv : 0.0)) / Gt_[n];
}

double SskMeanField::covariance(double s, double t) const
{
    if (s > t) std::swap(s, t);
    const auto ns = static_cast<std::size_t>(std::llround(s / h_));
    const auto nt = static_cast<std::size_t>(std::llround(t / h_));
    if (nt >= Gt_.size() || std::abs(s / h_ - static_cast<double>(ns)) > 1e-6 ||
        std::abs(t / h_ - static_cast<double>(nt)) > 1e-6)
        throw std::out_of_range("mean-field time off grid");
    const std::size_t mid = ns + nt;  // half-grid index of (s+t)/2
    double integral = 0.0;
    if (ns > 0) {
        integral = 0.5 * (Mt_[mid] * Gt_[0] + Mt_[mid - 2 * ns] * Gt_[ns]);
        for (std::size_t j = 1; j < ns; ++j) integral += Mt_[mid - 2 * j] * Gt_[j];
        integral *= h_;
    }
    return (Mt_[mid] + integral) / std::sqrt(Gt_[ns] * Gt_[nt]);
}

ExpFit exponential_fit(std::span<const double> t, std::span<const double> C)
{
    std::vector<double> y(C.size());
    for (std::size_t i = 0; i < C.size(); ++i) {
        if (!(C[i] > 0.0)) throw std::invalid_argument("exponential fit needs positive values");
        y[i] = std::log(C[i]);
    }
    const LinearFit f = linear_fit(t, y);
    return {-f.slope, f.r2};
}

namespace {

struct DecayFits {
    double exp_r2 = 1.0, pow_r2 = 0.0;
    bool exponential = true;
};

DecayFits classify(std::span<const double> t, std::span<const double> C)
{
    DecayFits d;
    for (double c : C)
        if (!(c > 0.0)) return d;  // decayed into noise inside the window
    d.exp_r2 = exponential_fit(t, C).r2;
    d.pow_r2 = loglog_fit(t, C).r2;
    d.exponential = d.exp_r2 > d.pow_r2;
    return d;
}

std::vector<double> window_times(double t_w, std::span<const double> window, double dt)
{
    std::vector<double> snaps{t_w};
    for (double w : window) snaps.push_back(std::round((t_w + w) / dt) * dt);
    return snaps;
}

std::vector<double> mean_curve(const SskEnsembleResult& res, double t_w, std::span<const double> snaps)
{
    std::vector<double> c;
    for (std::size_t i = 1; i < snaps.size(); ++i) c.push_back(empirical_covariance(res, t_w, snaps[i]).value);
    return c;
}

}  // namespace

bool decays_exponentially(std::span<const double> t, std::span<const double> C) { return classify(t, C).exponential; }

CriticalResult locate_beta_c(const SskEnsemble& base, double t_w, std::span<const double> window, double beta_lo,
                             double beta_hi, int iterations, const std::vector<Spectrum>* spectra)
{
    if (!(beta_hi > beta_lo)) throw std::invalid_argument("bisection needs beta_lo < beta_hi");
    for (double w : window)
        if (!(w > 0.0 && w <= t_w)) throw std::invalid_argument("critical window must satisfy 0 < t <= t_w");
    std::vector<Spectrum> own;
    if (!spectra) {
        own = ensemble_spectra(base);
        spectra = &own;
    }
    SskEnsemble ens = base;
    ens.params.snapshots = window_times(t_w, window, base.params.dt);
    std::vector<double> lag(window.begin(), window.end());
    for (std::size_t i = 0; i < lag.size(); ++i) lag[i] = ens.params.snapshots[i + 1] - t_w;

    CriticalResult out;
    auto probe = [&](double beta) {
        ens.params.beta = beta;
        const auto res = run_ssk_ensemble(ens, spectra);
        const auto C = mean_curve(res, t_w, ens.params.snapshots);
        const DecayFits d = classify(lag, C);
        out.history.push_back({beta, d.exponential, d.exp_r2, d.pow_r2});
        return std::make_pair(d.exponential, C);
    };
    if (!probe(beta_lo).first || probe(beta_hi).first) return out;  // no sign change: not located
    double lo = beta_lo, hi = beta_hi;
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        (probe(mid).first ? lo : hi) = mid;
    }
    out.beta_c = 0.5 * (lo + hi);
    const auto C = probe(out.beta_c).second;
    out.history.pop_back();
    bool positive = std::all_of(C.begin(), C.end(), [](double c) { return c > 0.0; });
    if (!positive) return out;
    const LinearFit f = loglog_fit(lag, C);
    out.slope = f.slope;
    out.slope_r2 = f.r2;
    out.located = true;
    return out;
}

void RegimeReport::write_text(std::ostream& os) const
{
    os << "exponential regime\n";
    for (const auto& [beta, fit] : exponential)
        os << "  beta " << beta << ": rate " << fit.rate << ", R^2 " << fit.r2 << '\n';
    os << "critical regime\n";
    if (critical.located)
        os << "  beta_c " << critical.beta_c << ": slope " << critical.slope << ", R^2 " << critical.slope_r2 << '\n';
    else
        os << "  beta_c not located (no change of decay behaviour across the bracket)\n";
    for (const auto& s : critical.history)
        os << "  probe beta " << s.beta << (s.exponential ? " exponential" : " non-exponential") << " (R^2 exp "
           << s.exp_r2 << ", pow " << s.pow_r2 << ")\n";
    os << "aging regime at beta " << aging_beta << '\n';
    for (const auto& p : aging.plateau)
        os << "  C(" << p.t_w << ", " << 2 * p.t_w << ") = " << p.C.value << " +- " << p.C.stderr << '\n';
    os << "  plateau max z " << aging.plateau_max_z << '\n';
    os << "  band of C theta^(3/4) at t_w " << aging.band_t_w << ": [" << aging.band_lo << ", " << aging.band_hi
       << "]\n";
}

void RegimeReport::write_csv(std::ostream& os) const
{
    os << "regime,beta,quantity,value\n";
    os.precision(17);
    for (const auto& [beta, fit] : exponential) {
        os << "exponential," << beta << ",rate," << fit.rate << '\n';
        os << "exponential," << beta << ",r2," << fit.r2 << '\n';
    }
    os << "critical," << critical.beta_c << ",located," << (critical.located ? 1 : 0) << '\n';
    os << "critical," << critical.beta_c << ",slope," << critical.slope << '\n';
    os << "critical," << critical.beta_c << ",slope_r2," << critical.slope_r2 << '\n';
    for (const auto& p : aging.plateau) os << "aging," << aging_beta << ",plateau_t_w_" << p.t_w << ',' << p.C.value << '\n';
    os << "aging," << aging_beta << ",plateau_max_z," << aging.plateau_max_z << '\n';
    os << "aging," << aging_beta << ",band_lo," << aging.band_lo << '\n';
    os << "aging," << aging_beta << ",band_hi," << aging.band_hi << '\n';
}

void write_covariance_csv(std::ostream& os, const SskEnsembleResult& res, std::span<const double> t_w,
                          std::span<const double> t, bool header)
{
    if (res.runs.empty()) throw std::invalid_argument("empty SSK ensemble");
    if (header) os << "beta,N,t_w,t,C,stderr,n_realizations\n";
    os.precision(17);
    for (double s : t_w)
        for (double u : t) {
            const Estimate e = empirical_covariance(res, s, s + u);
            os << res.runs.front().beta << ',' << res.runs.front().N << ',' << s << ',' << u << ',' << e.value << ','
               << e.stderr << ',' << e.n << '\n';
        }
}

namespace {

double on_grid(double t, double dt) { return std::round(t / dt) * dt; }

}  // namespace

RegimeReport regime_report(const SskEnsemble& base, const RegimeOptions& opt)
{
    std::vector<Spectrum> spectra;
    const std::vector<Spectrum>* sp = nullptr;
    if (base.route == SskRoute::spectral) {
        spectra = ensemble_spectra(base);
        sp = &spectra;
    }
    const double dt = base.params.dt;
    RegimeReport rep;

    SskEnsemble ens = base;
    ens.params.snapshots = {on_grid(opt.exp_t_w, dt)};
    std::vector<double> lag;
    for (double w : opt.exp_window) {
        ens.params.snapshots.push_back(on_grid(opt.exp_t_w + w, dt));
        lag.push_back(ens.params.snapshots.back() - ens.params.snapshots.front());
    }
    for (double beta : opt.exp_betas) {
        ens.params.beta = beta;
        const auto res = run_ssk_ensemble(ens, sp);
        const auto C = mean_curve(res, ens.params.snapshots.front(), ens.params.snapshots);
        rep.exponential.emplace_back(beta, exponential_fit(lag, C));
    }

    rep.critical = locate_beta_c(base, on_grid(opt.critical_t_w, dt), opt.critical_window, opt.beta_lo, opt.beta_hi,
                                 opt.iterations, sp);

    rep.aging_beta = opt.aging_beta;
    ens.params.beta = opt.aging_beta;
    std::vector<double> snaps;
    for (double t_w : opt.plateau_t_w) {
        snaps.push_back(on_grid(t_w, dt));
        snaps.push_back(on_grid(2.0 * t_w, dt));
    }
    const double band_t_w = on_grid(opt.band_t_w, dt);
    snaps.push_back(band_t_w);
    for (double th : opt.band_theta) snaps.push_back(on_grid(band_t_w * (1.0 + th), dt));
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    ens.params.snapshots = snaps;
    const auto res = run_ssk_ensemble(ens, sp);

    AgingResult& ag = rep.aging;
    for (double t_w : opt.plateau_t_w)
        ag.plateau.push_back({t_w, empirical_covariance(res, on_grid(t_w, dt), on_grid(2.0 * t_w, dt))});
    for (std::size_t i = 0; i < ag.plateau.size(); ++i)
        for (std::size_t j = i + 1; j < ag.plateau.size(); ++j)
            ag.plateau_max_z = std::max(ag.plateau_max_z, combined_z(ag.plateau[i].C.value, ag.plateau[i].C.stderr,
                                                                     ag.plateau[j].C.value, ag.plateau[j].C.stderr));
    ag.band_t_w = band_t_w;
    ag.band_lo = INFINITY;
    ag.band_hi = -INFINITY;
    for (double th : opt.band_theta) {
        const double t = on_grid(band_t_w * (1.0 + th), dt);
        Estimate e = empirical_covariance(res, band_t_w, t);
        const double w = std::pow((t - band_t_w) / band_t_w, 0.75);
        e.value *= w;
        e.stderr *= w;
        ag.band_theta.push_back(th);
        ag.band_values.push_back(e);
        ag.band_lo = std::min(ag.band_lo, e.value);
        ag.band_hi = std::max(ag.band_hi, e.value);
    }
    return rep;
}

}  // namespace agelab
