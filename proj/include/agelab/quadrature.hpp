#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace agelab {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 2000;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    int subdivisions = 0;
    bool converged = false;
};

class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

struct GkPanel {
    double a, b, value, error;
    bool operator<(const GkPanel& o) const { return error < o.error; }
};

// 15-point Gauss-Kronrod with the embedded 7-point Gauss rule.
template <class F>
GkPanel gk15(F& f, double a, double b)
{
    static constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * wgk[7];
    double gauss = fc * wg[3];
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        fv1[j] = f(c - dx);
        fv2[j] = f(c + dx);
        kron += wgk[j] * (fv1[j] + fv2[j]);
        if (j % 2 == 1) gauss += wg[j / 2] * (fv1[j] + fv2[j]);
    }
    // QUADPACK error heuristic
    const double mean = 0.5 * kron;
    double asc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) asc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    asc *= std::abs(h);
    double err = std::abs((kron - gauss) * h);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    const double absk = std::abs(kron * h);
    if (absk > std::numeric_limits<double>::min() / (50 * std::numeric_limits<double>::epsilon()))
        err = std::max(50 * std::numeric_limits<double>::epsilon() * absk, err);
    return {a, b, kron * h, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature on a finite interval: the panel
/// with the largest error estimate is bisected until the summed error is
/// below max(abs_tol, rel_tol * |value|). Integrable endpoint singularities
/// should be removed by substitution before calling.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {})
{
    QuadResult r;
    if (a == b) {
        r.converged = true;
        return r;
    }
    std::priority_queue<detail::GkPanel> heap;
    auto first = detail::gk15(f, a, b);
    r.evaluations = 15;
    double total = first.value, err = first.error;
    heap.push(first);
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (r.subdivisions >= opt.max_subdivisions) break;
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b) {  // interval exhausted
            heap.push({worst.a, worst.b, worst.value, 0.0});
            err -= worst.error;
            continue;
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        r.evaluations += 30;
        ++r.subdivisions;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed accumulated rounding from the running updates
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    r.value = total;
    r.abs_error = err;
    r.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    return r;
}

/// integrate() that throws QuadratureError when the tolerance is not met.
template <class F>
double integrate_or_throw(F&& f, double a, double b, const QuadOptions& opt, const char* what)
{
    const QuadResult r = integrate(f, a, b, opt);
    if (!r.converged)
        throw QuadratureError(std::string(what) + ": quadrature did not reach tolerance (error " +
                              std::to_string(r.abs_error) + ")");
    return r.value;
}

}  // namespace agelab
