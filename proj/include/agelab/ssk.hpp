#pragma once

#include "agelab/parallel.hpp"
#include "agelab/rng.hpp"
#include "agelab/stats.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace agelab {

/// A = (J + J^T) / sqrt(2N) from i.i.d. standard Gaussian J; the spectrum
/// follows the semicircle on [-2, 2]. Entry (i, j) of J uses counter
/// i * N + j of the key derived from `seed`.
struct CouplingMatrix {
    int N = 0;
    Eigen::MatrixXd A;
    std::uint64_t seed = 0;
};

CouplingMatrix sample_coupling(int N, std::uint64_t seed);

/// A = Q diag(lambda) Q^T, eigenvalues ascending.
struct Spectrum {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd Q;
};

Spectrum spectrum(const CouplingMatrix& J);

/// Symmetric tridiagonal matrix with the law of the Householder reduction of
/// A: diagonal N(0, 2/N), off-diagonal k-th entry sqrt(chi^2_{N-1-k} / N).
/// Orthogonally similar to a GOE coupling, so dynamics with rotation-invariant
/// initial condition and noise are equal in law, at O(N) memory and cost.
struct TridiagonalCoupling {
    int N = 0;
    Eigen::VectorXd diag;
    Eigen::VectorXd off;  // size N - 1
    std::uint64_t seed = 0;
};

TridiagonalCoupling sample_tridiagonal_coupling(int N, std::uint64_t seed);
/// Exact Householder reduction of a dense coupling (A = Q T Q^T).
TridiagonalCoupling tridiagonalize(const CouplingMatrix& J, Eigen::MatrixXd* Q = nullptr);

/// Soft spherical constraint f(x) = k x^2 / 2, f'(x) = k x. Tag "quadratic:<k>".
struct Constraint {
    double k = 1.0;

    double derivative(double r) const { return k * r; }
    std::string tag() const;
    static Constraint parse(std::string_view tag);
};

class SskDivergence : public std::runtime_error {
public:
    explicit SskDivergence(const std::string& what) : std::runtime_error(what) {}
};

struct SskParams {
    double beta = 0.0;
    Constraint f{};
    double dt = 0.01;
    std::vector<double> snapshots;  // ascending, each a multiple of dt up to rounding
    bool noise = true;
    double radius_cap = 1e6;

    void validate() const;
};

/// Snapshots of one realization. States are stored in the basis the
/// integrator ran in; the covariance (1/N) u(s).u(t) is basis-independent.
struct SskRun {
    int N = 0;
    double beta = 0.0;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<double> radius;  // r = |u|^2 / N at each snapshot
    std::uint64_t substeps = 0;  // extra steps taken by the stability guard

    std::size_t index_of(double t) const;
    double overlap(double s, double t) const;
};

/// Fills its argument with i.i.d. standard normals. Called once for the
/// initial condition, then once per Euler step.
using NoiseSource = std::function<void(Eigen::Ref<Eigen::VectorXd>)>;

/// Euler-Maruyama for du = [beta A u - f'(r) u] dt + dW in the original basis.
/// The matrix-vector product is the OpenMP kernel; `ex` selects it.
SskRun integrate_dense(const CouplingMatrix& J, const SskParams& p, const NoiseSource& noise,
                       Execution ex = Execution::parallel);
SskRun integrate_dense(const CouplingMatrix& J, const SskParams& p, Rng& rng, Execution ex = Execution::parallel);

/// The same scheme in the eigenbasis of A: O(N) per step. Equal in law to the
/// dense scheme; equal to rounding when fed the rotated noise Q^T xi.
SskRun integrate_spectral(const Spectrum& S, const SskParams& p, const NoiseSource& noise);
SskRun integrate_spectral(const Spectrum& S, const SskParams& p, Rng& rng);

/// The same scheme for a tridiagonal coupling.
SskRun integrate_tridiagonal(const TridiagonalCoupling& T, const SskParams& p, const NoiseSource& noise);
SskRun integrate_tridiagonal(const TridiagonalCoupling& T, const SskParams& p, Rng& rng);

/// y = A x, serial reference and OpenMP row-parallel version.
void matvec(const Eigen::MatrixXd& A, const Eigen::VectorXd& x, Eigen::VectorXd& y, Execution ex);

/// spectral: dense coupling diagonalized once per matrix (N up to a few thousand);
/// tridiagonal: reduced coupling sampled directly (large N).
enum class SskRoute { spectral, tridiagonal };

/// Realizations share couplings in groups: realization r uses matrix r / noise_per_matrix
/// (key stream_key(seed, "ssk_matrix", index)) and noise stream (seed, "ssk_noise", r).
struct SskEnsemble {
    int N = 1000;
    SskRoute route = SskRoute::spectral;
    SskParams params{};
    std::size_t matrices = 8;
    std::size_t noise_per_matrix = 1;
    std::uint64_t seed = 1;
    Execution execution = Execution::parallel;
};

struct SskEnsembleResult {
    std::vector<SskRun> runs;
    std::vector<double> top_eigenvalues;  // one per matrix (spectral route only)
};

/// Spectra are computed once per matrix; pass `spectra` to reuse them across beta values.
SskEnsembleResult run_ssk_ensemble(const SskEnsemble& ens, const std::vector<Spectrum>* spectra = nullptr);
std::vector<Spectrum> ensemble_spectra(const SskEnsemble& ens);

/// (1/N) sum u_i(s) u_i(t), averaged over realizations.
Estimate empirical_covariance(const SskEnsembleResult& res, double s, double t);
Estimate mean_radius(const SskEnsembleResult& res, double t);

/// Large-N deterministic dynamics for f'(r) = k r driven by a spectral law.
/// With M(t) = int rho(dl) exp(2 beta l t) and G(t) = exp(2 int_0^t r),
///   G' = 2k (M + M*G) (k scales r), r G = M + M*G,
///   C(s,t) = [M((s+t)/2) + int_0^s M((s+t)/2 - u) G(u) du] / sqrt(G(s) G(t)).
/// Everything is carried with the factor exp(-2 beta edge t) removed.
class SskMeanField {
public:
    /// Semicircle law on [-2, 2].
    static SskMeanField semicircle(double beta, double t_max, double h, double k = 1.0);
    /// Empirical law of the given eigenvalues.
    static SskMeanField empirical(std::span<const double> lambda, double beta, double t_max, double h,
                                  double k = 1.0);

    double radius(double t) const;
    double covariance(double s, double t) const;
    double step() const { return h_; }
    double t_max() const { return h_ * static_cast<double>(Mt_.size() - 1); }

private:
    SskMeanField(std::function<double(double)> Mtilde, double edge, double beta, double t_max, double h, double k);
    double Mt_at(double t) const;  // interpolated on the half grid

    double beta_, edge_, h_, k_;
    std::vector<double> Mt_;  // M(t) exp(-2 beta edge t) on the half grid t = i h / 2
    std::vector<double> Gt_;  // G(t) exp(-2 beta edge t) on the grid t = i h
};

/// Fits for the three regimes.
struct ExpFit {
    double rate = 0.0;  // -slope of log C against t
    double r2 = 0.0;
};
ExpFit exponential_fit(std::span<const double> t, std::span<const double> C);

/// Decay classification used by the beta_c bisection: over the window, a
/// log-linear fit (exponential decay) is compared with a log-log fit
/// (polynomial decay or plateau); exponential wins when its R^2 is higher.
bool decays_exponentially(std::span<const double> t, std::span<const double> C);

struct BisectionStep {
    double beta = 0.0;
    bool exponential = false;
    double exp_r2 = 0.0;
    double pow_r2 = 0.0;
};

struct CriticalResult {
    double beta_c = 0.0;
    double slope = 0.0;
    double slope_r2 = 0.0;
    std::vector<BisectionStep> history;
    bool located = false;
};

/// Bisection on decay behaviour of C(t_w, t_w + t) over t in `window` (with
/// t <= t_w), between beta_lo (must decay exponentially) and beta_hi (must not).
CriticalResult locate_beta_c(const SskEnsemble& base, double t_w, std::span<const double> window, double beta_lo,
                             double beta_hi, int iterations, const std::vector<Spectrum>* spectra = nullptr);

struct PlateauRow {
    double t_w = 0.0;
    Estimate C;
};

struct AgingResult {
    std::vector<PlateauRow> plateau;  // C(t_w, 2 t_w)
    double plateau_max_z = 0.0;
    double band_t_w = 0.0;
    std::vector<double> band_theta;
    std::vector<Estimate> band_values;  // C(t_w, t_w + theta t_w) * theta^(3/4)
    double band_lo = 0.0, band_hi = 0.0;
};

struct RegimeReport {
    std::vector<std::pair<double, ExpFit>> exponential;  // per beta below beta_c
    CriticalResult critical;
    AgingResult aging;
    double aging_beta = 0.0;

    void write_text(std::ostream& os) const;
    /// regime,beta,quantity,value
    void write_csv(std::ostream& os) const;
};

/// Lags are offsets t from the waiting time; each time is rounded to the dt grid.
struct RegimeOptions {
    std::vector<double> exp_betas{0.0};
    double exp_t_w = 10.0;
    std::vector<double> exp_window;  // lags for the log-linear fit
    double critical_t_w = 25.0;
    std::vector<double> critical_window;  // lags in (0, critical_t_w]
    double beta_lo = 0.0;
    double beta_hi = 1.0;
    int iterations = 6;
    double aging_beta = 1.0;
    std::vector<double> plateau_t_w{25.0, 50.0, 100.0};
    double band_t_w = 5.0;
    std::vector<double> band_theta;  // t / t_w
};

/// Runs the three regimes on one ensemble layout (the beta in `base` is ignored).
RegimeReport regime_report(const SskEnsemble& base, const RegimeOptions& opt);

/// (beta, N, t_w, t, C, stderr, n_realizations)
void write_covariance_csv(std::ostream& os, const SskEnsembleResult& res, std::span<const double> t_w,
                          std::span<const double> t, bool header = true);

}  // namespace agelab
