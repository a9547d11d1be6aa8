#pragma once

#include <vector>

#include "drocal/types.hpp"

namespace drocal {

// CDF of the Kolmogorov distribution (sup of a standard Brownian bridge):
//   K(x) = 1 - 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2),   x >= 0.
// The series is truncated once a term drops below 1e-14; a theta-function
// form is used for small x where the alternating series cancels badly.
double kolmogorov_cdf(double x);

// Inverse of K by bisection, to |K(x) - p| < 1e-10. Requires 0 < p < 1.
double kolmogorov_quantile(double p);

// Empirical CDF with duplicate-aware jumps and left limits.
class EmpiricalCdf {
  public:
    explicit EmpiricalCdf(std::vector<double> values);

    double at(double x) const;    // F(x), right-continuous
    double left(double x) const;  // F(x-)
    double jump(double x) const { return at(x) - left(x); }

    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& cumulative() const { return cum_; }
    std::size_t sample_size() const { return n_; }

  private:
    std::vector<double> points_; // sorted distinct values
    std::vector<double> cum_;    // F at each distinct value
    std::size_t n_ = 0;
};

// Exact sup-norm distance between the weighted empirical CDF of (points,
// weights) and `ecdf`, evaluated over the merged breakpoint set of both step
// functions (left limits included). Weights must lie on the simplex within
// 1e-9; tiny negatives are clipped.
double weighted_ks_distance(const std::vector<double>& points,
                            const std::vector<double>& weights,
                            const EmpiricalCdf& ecdf);

// Bonferroni-calibrated KS band: q = K^{-1}(1 - alpha/m), band = q/sqrt(n1).
struct KSThreshold {
    double alpha = 0.0;
    int m = 0;
    int n1 = 0;
    double q = 0.0;
    double band = 0.0;
};

KSThreshold threshold(double alpha, int m, int n1);

} // namespace drocal
