#include "drocal/ksstat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "drocal/errors.hpp"

namespace drocal {

double kolmogorov_cdf(double x) {
    if (x < 0.0) throw DomainError("kolmogorov_cdf defined for x >= 0");
    if (x == 0.0) return 0.0;
    constexpr double kTermTol = 1e-14;
    if (x < 1.0) {
        // theta-function form, numerically stable near 0:
        // K(x) = sqrt(2*pi)/x * sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 x^2))
        double sum = 0.0;
        const double c = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
        for (int k = 1; k <= 64; ++k) {
            const double odd = static_cast<double>(2 * k - 1);
            const double term = std::exp(-odd * odd * c);
            sum += term;
            if (term < kTermTol) break;
        }
        return std::sqrt(2.0 * std::numbers::pi) / x * sum;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 1024; ++k) {
        const double kk = static_cast<double>(k);
        const double term = std::exp(-2.0 * kk * kk * x * x);
        sum += sign * term;
        sign = -sign;
        if (term < kTermTol) break;
    }
    const double v = 1.0 - 2.0 * sum;
    return std::clamp(v, 0.0, 1.0);
}

double kolmogorov_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile requires p in (0,1)");
    double lo = 1e-8, hi = 10.0;
    // K(10) == 1 to double precision, so the root is bracketed
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = kolmogorov_cdf(mid);
        if (std::abs(v - p) < 1e-10 && it > 40) return mid;
        if (v < p) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) {
    if (values.empty()) throw DomainError("empirical CDF needs at least one value");
    for (double v : values) {
        if (std::isnan(v)) throw DomainError("empirical CDF input contains NaN");
    }
    std::sort(values.begin(), values.end());
    n_ = values.size();
    points_.reserve(n_);
    cum_.reserve(n_);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        ++count;
        if (i + 1 == n_ || values[i + 1] != values[i]) {
            points_.push_back(values[i]);
            cum_.push_back(static_cast<double>(count) / static_cast<double>(n_));
        }
    }
}

double EmpiricalCdf::at(double x) const {
    // index of the last point <= x
    const auto it = std::upper_bound(points_.begin(), points_.end(), x);
    if (it == points_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

double EmpiricalCdf::left(double x) const {
    const auto it = std::lower_bound(points_.begin(), points_.end(), x);
    if (it == points_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

double weighted_ks_distance(const std::vector<double>& points,
                            const std::vector<double>& weights,
                            const EmpiricalCdf& ecdf) {
    if (points.size() != weights.size() || points.empty()) {
        throw DomainError("points/weights size mismatch");
    }
    double total = 0.0;
    std::vector<std::pair<double, double>> atoms(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
        double w = weights[j];
        if (w < -1e-10) throw DomainError("weight below the simplex tolerance");
        if (w < 0.0) w = 0.0;
        total += w;
        atoms[j] = {points[j], w};
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw DomainError("weights do not sum to 1 within tolerance");
    }
    std::sort(atoms.begin(), atoms.end());

    // merged breakpoints of both step functions
    std::vector<double> breaks;
    breaks.reserve(atoms.size() + ecdf.points().size());
    for (const auto& [x, w] : atoms) breaks.push_back(x);
    breaks.insert(breaks.end(), ecdf.points().begin(), ecdf.points().end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // every atom position is itself a breakpoint, so when we reach x the
    // running sum g already equals the weighted CDF's left limit at x
    double sup = 0.0;
    double g = 0.0;
    std::size_t j = 0;
    for (double x : breaks) {
        sup = std::max(sup, std::abs(g - ecdf.left(x)));
        while (j < atoms.size() && atoms[j].first == x) {
            g += atoms[j].second;
            ++j;
        }
        sup = std::max(sup, std::abs(g - ecdf.at(x)));
    }
    return sup;
}

KSThreshold threshold(double alpha, int m, int n1) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
    if (m < 1) throw DomainError("summary dimension must be at least 1");
    if (n1 < 1) throw DomainError("data count must be at least 1");
    KSThreshold t;
    t.alpha = alpha;
    t.m = m;
    t.n1 = n1;
    t.q = kolmogorov_quantile(1.0 - alpha / static_cast<double>(m));
    t.band = t.q / std::sqrt(static_cast<double>(n1));
    return t;
}

} // namespace drocal
