#pragma once

#include <cstddef>

namespace cropspray::stats {

// 0.999 chi-square quantiles used as innovation gates.
// 1 dof: square of the 0.9995 normal quantile; 2 dof: -2 ln(0.001).
inline constexpr double kChi2Gate1Dof = 10.827566170662733;
inline constexpr double kChi2Gate2Dof = 13.815510557964274;

/// Inverse standard normal CDF (Acklam's rational approximation, ~1e-9
/// absolute error). p must be in (0, 1).
double normal_quantile(double p);

/// Chi-square quantile via the Wilson-Hilferty cube approximation. Good to
/// a relative error well below 1e-3 for dof >= 30; meant for wide
/// consistency bands on aggregates, not for small-dof gates.
double chi2_quantile(double dof, double p);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Two-sided 95% acceptance interval for the mean of n iid chi-square(dof)
/// samples: [chi2_0.025(n*dof), chi2_0.975(n*dof)] / n.
Interval mean_chi2_interval_95(std::size_t n, double dof);

/// Streaming mean/variance accumulator (Welford). Variance is the
/// population variance (divide by n).
class RunningStats {
public:
    void add(double x);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 0 ? m2_ / static_cast<double>(n_) : 0.0; }
    double max() const { return max_; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double max_ = 0.0;
};

}  // namespace cropspray::stats
