#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace agelab {

struct Estimate {
    double value = 0.0;
    double stderr = 0.0;
    std::uint64_t n = 0;
};

/// Mergeable accumulator for a mean over groups (disorders) of Bernoulli or
/// real-valued path outcomes. Groups are weighted equally.
///   - one group: the stderr is binomial-like, sqrt(s^2 / n_items) over items;
///   - several groups: the stderr is the spread of group means / sqrt(groups).
/// merge() is associative and commutative; splitting an ensemble into parts
/// and merging reproduces the pooled estimate exactly when all counts are
/// integers.
struct GroupedMean {
    std::uint64_t groups = 0;
    std::uint64_t items = 0;
    double item_sum = 0.0;
    double item_sum_sq = 0.0;
    double group_sum = 0.0;     // sum over groups of the group mean
    double group_sum_sq = 0.0;  // sum over groups of the squared group mean

    void add_group(double sum, double sum_sq, std::uint64_t count)
    {
        if (count == 0) return;
        const double mean = sum / static_cast<double>(count);
        ++groups;
        items += count;
        item_sum += sum;
        item_sum_sq += sum_sq;
        group_sum += mean;
        group_sum_sq += mean * mean;
    }

    void merge(const GroupedMean& o)
    {
        groups += o.groups;
        items += o.items;
        item_sum += o.item_sum;
        item_sum_sq += o.item_sum_sq;
        group_sum += o.group_sum;
        group_sum_sq += o.group_sum_sq;
    }

    Estimate estimate() const
    {
        Estimate e;
        e.n = items;
        if (groups == 0) return e;
        e.value = group_sum / static_cast<double>(groups);
        if (groups == 1) {
            const double n = static_cast<double>(items);
            const double var = std::max(0.0, item_sum_sq / n - e.value * e.value);
            e.stderr = n > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
            if (n > 1 && var == 0.0) e.stderr = 0.0;
        } else {
            const double g = static_cast<double>(groups);
            const double var = std::max(0.0, (group_sum_sq - group_sum * group_sum / g) / (g - 1.0));
            e.stderr = std::sqrt(var / g);
        }
        return e;
    }
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

/// Slope of log y against log x.
inline LinearFit loglog_fit(std::span<const double> x, std::span<const double> y)
{
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return linear_fit(lx, ly);
}

inline double combined_z(double v1, double s1, double v2, double s2)
{
    const double d = std::abs(v1 - v2);
    const double s = std::sqrt(s1 * s1 + s2 * s2);
    if (d == 0.0) return 0.0;
    return s > 0.0 ? d / s : INFINITY;
}

}  // namespace agelab
