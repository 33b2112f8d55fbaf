#pragma once

#include "agelab/parallel.hpp"
#include "agelab/quadrature.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace agelab {

/// Pareto depths live on [1, inf) with P(tau > x) = x^-alpha.
struct AnalyticParams {
    double alpha = 0.5;
    double a = 0.0;
    QuadOptions quadrature{};

    void validate() const;
};

/// Arcsine-law aging function, (sin(pi alpha)/pi) * int_0^{1/(1+theta)} u^(alpha-1) (1-u)^(-alpha) du.
double h_theta(double theta, double alpha, const QuadOptions& q = {});

/// Complete-graph aging function, (sin(pi alpha)/pi) * int_theta^inf x^-alpha / (1+x) dx.
double H_theta(double theta, double alpha, const QuadOptions& q = {});

/// Limiting holding-time distribution, 1 - alpha * int_1^inf exp(-t/x) x^-(1+alpha) dx.
double F_infinity(double t, double alpha, const QuadOptions& q = {});
/// 1 - F_infinity(t), computed without cancellation.
double F_infinity_survival(double t, double alpha, const QuadOptions& q = {});

/// g_a(lambda) = E exp(-lambda tau^a).
double g_a_laplace(double lambda, double a, double alpha, const QuadOptions& q = {});

/// C = 2^(a-1) (E tau^(-2a))^(1-a).
double constant_C(double a, double alpha, const QuadOptions& q = {});

/// Right-continuous step CDF: F(u) = cdf[k] for u[k] <= u < u[k+1], 0 below u[0].
/// Mass 1 - cdf.back() is treated as sitting at u = +inf.
struct DistributionTable {
    std::vector<double> u;
    std::vector<double> cdf;

    void validate() const;
    void write_csv(std::ostream& os) const;
};

/// q_a(theta) = int g_a(C theta u^(a-1))^2 dF(u).
double q_a_theta(double theta, double a, double alpha, const DistributionTable& F, const QuadOptions& q = {});

/// q_0(theta) = int exp(-theta/u) dF(u), evaluated directly.
double q_0_theta(double theta, const DistributionTable& F);

struct RenewalOptions {
    std::size_t max_table_bytes = std::size_t{1} << 28;
    double max_cell_increment = 0.1;
    QuadOptions quadrature{};
    Execution execution = Execution::parallel;
};

/// Pi_inf(t_w, t_w + t) on the grid t_w = k * step, k = 0..n, for each offset t.
///
/// The renewal equation
///   P(t_w) = 1 - F(t_w + t) + int_0^{t_w} P(t_w - u) dF(u)
/// is marched in t_w with a trapezoidal Stieltjes sum; each offset is an
/// independent column.
struct RenewalSolution {
    double alpha = 0.5;
    double step = 1.0;
    double t_max = 0.0;
    std::vector<double> offsets;
    std::vector<double> table;  // row-major: (t_w index) * offsets.size() + offset index

    std::size_t rows() const { return offsets.empty() ? 0 : table.size() / offsets.size(); }
    double at(std::size_t k, std::size_t j) const { return table[k * offsets.size() + j]; }
    /// Linear interpolation in t_w for offset column j.
    double value(double t_w, std::size_t j) const;
    void write_csv(std::ostream& os) const;
};

RenewalSolution solve_renewal(double alpha, double t_max, double step, std::span<const double> offsets,
                              const RenewalOptions& opt = {});

/// Largest |difference| between a solution and one with half the step, on the coarse grid.
double renewal_halving_gap(const RenewalSolution& coarse, const RenewalSolution& fine);

/// CSV (theta, value) of f over a grid.
template <class F>
void write_function_csv(std::ostream& os, std::span<const double> theta, F&& f);

}  // namespace agelab

#include <ostream>

template <class F>
void agelab::write_function_csv(std::ostream& os, std::span<const double> theta, F&& f)
{
    os << "theta,value\n";
    os.precision(17);
    for (double th : theta) os << th << ',' << f(th) << '\n';
}
