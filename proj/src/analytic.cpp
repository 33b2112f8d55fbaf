#include "agelab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace agelab {

namespace {

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

void check_a(double a)
{
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("a must lie in [0,1]");
}

void check_nonneg(double x, const char* name)
{
    if (!(x >= 0.0)) throw std::invalid_argument(std::string(name) + " must be >= 0");
}

double sine_factor(double alpha) { return std::sin(alpha * std::numbers::pi) / std::numbers::pi; }

// exp(-t s^(1/alpha)) < exp(-cutoff) beyond s = (cutoff/t)^alpha
constexpr double survival_cutoff = 50.0;

}  // namespace

void AnalyticParams::validate() const
{
    check_alpha(alpha);
    check_a(a);
    if (!(quadrature.abs_tol > 0.0) || !(quadrature.rel_tol >= 0.0) || quadrature.max_subdivisions < 1)
        throw std::invalid_argument("bad quadrature options");
}

double h_theta(double theta, double alpha, const QuadOptions& q)
{
    check_nonneg(theta, "theta");
    check_alpha(alpha);
    const double x = 1.0 / (1.0 + theta);
    const double m = std::min(x, 0.5);
    // u = s^(1/alpha) removes the u^(alpha-1) singularity at 0
    const double inv_a = 1.0 / alpha;
    double sum = integrate_or_throw(
        [&](double s) { return inv_a * std::pow(1.0 - std::pow(s, inv_a), -alpha); }, 0.0, std::pow(m, alpha), q,
        "h_theta");
    if (x > 0.5) {
        // 1 - u = s^(1/(1-alpha)) removes the (1-u)^(-alpha) singularity at 1
        const double b = 1.0 - alpha;
        const double inv_b = 1.0 / b;
        sum += integrate_or_throw(
            [&](double s) { return inv_b * std::pow(1.0 - std::pow(s, inv_b), alpha - 1.0); },
            std::pow(1.0 - x, b), std::pow(0.5, b), q, "h_theta");
    }
    return sine_factor(alpha) * sum;
}

double H_theta(double theta, double alpha, const QuadOptions& q)
{
    check_nonneg(theta, "theta");
    check_alpha(alpha);
    double sum = 0.0;
    if (theta < 1.0) {
        // x = s^(1/(1-alpha)) on [theta, 1]
        const double b = 1.0 - alpha;
        sum += integrate_or_throw([&](double s) { return 1.0 / (b * (1.0 + std::pow(s, 1.0 / b))); },
                                  std::pow(theta, b), 1.0, q, "H_theta");
    }
    // x = s^(-1/alpha) on [max(theta,1), inf)
    sum += integrate_or_throw([&](double s) { return 1.0 / (alpha * (1.0 + std::pow(s, 1.0 / alpha))); }, 0.0,
                              std::pow(std::max(theta, 1.0), -alpha), q, "H_theta");
    return sine_factor(alpha) * sum;
}

double F_infinity_survival(double t, double alpha, const QuadOptions& q)
{
    check_nonneg(t, "t");
    check_alpha(alpha);
    if (t == 0.0) return 1.0;
    // s = x^-alpha maps alpha x^-(1+alpha) dx on [1,inf) to ds on (0,1]; the
    // dropped piece beyond the cutoff is below exp(-survival_cutoff)
    const double upper = std::min(1.0, std::pow(survival_cutoff / t, alpha));
    const double inv_a = 1.0 / alpha;
    return integrate_or_throw([&](double s) { return std::exp(-t * std::pow(s, inv_a)); }, 0.0, upper, q,
                              "F_infinity");
}

double F_infinity(double t, double alpha, const QuadOptions& q) { return 1.0 - F_infinity_survival(t, alpha, q); }

double g_a_laplace(double lambda, double a, double alpha, const QuadOptions& q)
{
    check_nonneg(lambda, "lambda");
    check_a(a);
    check_alpha(alpha);
    // tau = s^(-1/alpha), s uniform on (0,1]
    const double e = -a / alpha;
    return integrate_or_throw([&](double s) { return std::exp(-lambda * std::pow(s, e)); }, 0.0, 1.0, q,
                              "g_a_laplace");
}

double constant_C(double a, double alpha, const QuadOptions& q)
{
    check_a(a);
    check_alpha(alpha);
    const double e = 2.0 * a / alpha;
    const double moment = integrate_or_throw([&](double s) { return std::pow(s, e); }, 0.0, 1.0, q, "constant_C");
    return std::pow(2.0, a - 1.0) * std::pow(moment, 1.0 - a);
}

void DistributionTable::validate() const
{
    if (u.empty()) throw std::invalid_argument("empty distribution table");
    if (u.size() != cdf.size()) throw std::invalid_argument("distribution table columns differ in length");
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!(u[k] > 0.0) || !std::isfinite(u[k])) throw std::invalid_argument("distribution table needs 0 < u < inf");
        if (!(cdf[k] >= 0.0 && cdf[k] <= 1.0)) throw std::invalid_argument("distribution table values outside [0,1]");
        if (k > 0 && !(u[k] > u[k - 1])) throw std::invalid_argument("distribution table u must increase");
        if (k > 0 && cdf[k] < cdf[k - 1]) throw std::invalid_argument("distribution table must be non-decreasing");
    }
}

void DistributionTable::write_csv(std::ostream& os) const
{
    os << "u,F\n";
    os.precision(17);
    for (std::size_t k = 0; k < u.size(); ++k) os << u[k] << ',' << cdf[k] << '\n';
}

double q_a_theta(double theta, double a, double alpha, const DistributionTable& F, const QuadOptions& q)
{
    check_nonneg(theta, "theta");
    F.validate();
    const double C = constant_C(a, alpha, q);
    double sum = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < F.u.size(); ++k) {
        const double mass = F.cdf[k] - prev;
        prev = F.cdf[k];
        if (mass == 0.0) continue;
        const double g = g_a_laplace(C * theta * std::pow(F.u[k], a - 1.0), a, alpha, q);
        sum += mass * g * g;
    }
    if (prev < 1.0) {
        // u -> inf: u^(a-1) -> 0 for a < 1, == 1 for a == 1
        const double g = a < 1.0 ? 1.0 : g_a_laplace(C * theta, a, alpha, q);
        sum += (1.0 - prev) * g * g;
    }
    return sum;
}

double q_0_theta(double theta, const DistributionTable& F)
{
    check_nonneg(theta, "theta");
    F.validate();
    double sum = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < F.u.size(); ++k) {
        sum += (F.cdf[k] - prev) * std::exp(-theta / F.u[k]);
        prev = F.cdf[k];
    }
    return sum + (1.0 - prev);
}

double RenewalSolution::value(double t_w, std::size_t j) const
{
    if (j >= offsets.size()) throw std::out_of_range("renewal offset index");
    if (!(t_w >= 0.0 && t_w <= t_max * (1.0 + 1e-12))) throw std::out_of_range("t_w outside renewal table");
    const double x = t_w / step;
    const auto k = std::min(static_cast<std::size_t>(x), rows() - 1);
    if (k + 1 >= rows()) return at(k, j);
    const double w = x - static_cast<double>(k);
    return (1.0 - w) * at(k, j) + w * at(k + 1, j);
}

void RenewalSolution::write_csv(std::ostream& os) const
{
    os << "t_w,t,value\n";
    os.precision(17);
    for (std::size_t k = 0; k < rows(); ++k)
        for (std::size_t j = 0; j < offsets.size(); ++j)
            os << static_cast<double>(k) * step << ',' << offsets[j] << ',' << at(k, j) << '\n';
}

RenewalSolution solve_renewal(double alpha, double t_max, double step, std::span<const double> offsets,
                              const RenewalOptions& opt)
{
    check_alpha(alpha);
    if (!(step > 0.0) || !(t_max >= 0.0)) throw std::invalid_argument("renewal needs step > 0 and t_max >= 0");
    for (double t : offsets) check_nonneg(t, "offset");
    if (offsets.empty()) throw std::invalid_argument("renewal needs at least one offset");

    const auto n = static_cast<std::size_t>(std::ceil(t_max / step - 1e-9));
    const std::size_t m = offsets.size();
    const double bytes = static_cast<double>(n + 1) * static_cast<double>(m) * sizeof(double);
    if (bytes > static_cast<double>(opt.max_table_bytes))
        throw std::length_error("renewal table of " + std::to_string(bytes) + " bytes exceeds the cap");

    std::vector<double> F(n + 1);
    for (std::size_t k = 0; k <= n; ++k) F[k] = F_infinity(static_cast<double>(k) * step, alpha, opt.quadrature);
    std::vector<double> dF(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        dF[k] = F[k + 1] - F[k];
        if (dF[k] >= opt.max_cell_increment)
            throw std::invalid_argument("renewal step too coarse: F increment " + std::to_string(dF[k]) +
                                        " per cell");
    }
    // trapezoid weights: c[i] multiplies P[n-i] for 1 <= i <= n-1
    std::vector<double> c(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i) c[i] = 0.5 * (dF[i - 1] + dF[i]);
    const double diag = 1.0 - (n > 0 ? 0.5 * dF[0] : 0.0);

    RenewalSolution sol;
    sol.alpha = alpha;
    sol.step = step;
    sol.t_max = static_cast<double>(n) * step;
    sol.offsets.assign(offsets.begin(), offsets.end());
    sol.table.assign((n + 1) * m, 0.0);

    for_each_task(m, opt.execution, [&](std::size_t j) {
        const double t = offsets[j];
        std::vector<double> P(n + 1);
        P[0] = F_infinity_survival(t, alpha, opt.quadrature);
        for (std::size_t k = 1; k <= n; ++k) {
            const double g = F_infinity_survival(static_cast<double>(k) * step + t, alpha, opt.quadrature);
            // four accumulators keep the dot product off one dependency chain
            double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
            std::size_t i = 1;
            for (; i + 3 < k; i += 4) {
                s0 += c[i] * P[k - i];
                s1 += c[i + 1] * P[k - i - 1];
                s2 += c[i + 2] * P[k - i - 2];
                s3 += c[i + 3] * P[k - i - 3];
            }
            for (; i < k; ++i) s0 += c[i] * P[k - i];
            const double rhs = g + (s0 + s1) + (s2 + s3) + 0.5 * dF[k - 1] * P[0];
            P[k] = rhs / diag;
        }
        for (std::size_t k = 0; k <= n; ++k) sol.table[k * m + j] = P[k];
    });
    return sol;
}

double renewal_halving_gap(const RenewalSolution& coarse, const RenewalSolution& fine)
{
    if (coarse.offsets != fine.offsets) throw std::invalid_argument("renewal solutions use different offsets");
    if (std::abs(fine.step * 2.0 - coarse.step) > 1e-12 * coarse.step)
        throw std::invalid_argument("fine renewal step must be half the coarse step");
    double gap = 0.0;
    const std::size_t rows = std::min(coarse.rows(), (fine.rows() + 1) / 2);
    for (std::size_t k = 0; k < rows; ++k)
        for (std::size_t j = 0; j < coarse.offsets.size(); ++j)
            gap = std::max(gap, std::abs(coarse.at(k, j) - fine.at(2 * k, j)));
    return gap;
}

}  // namespace agelab
