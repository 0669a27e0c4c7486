#include "cropspray/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cropspray::stats {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
    }

    // Coefficients from Acklam's inverse-normal approximation.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};

    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    return x;
}

double chi2_quantile(double dof, double p) {
    if (dof <= 0.0) {
        throw std::invalid_argument("chi2_quantile: dof must be positive");
    }
    const double z = normal_quantile(p);
    const double t = 2.0 / (9.0 * dof);
    const double cube = 1.0 - t + z * std::sqrt(t);
    return dof * cube * cube * cube;
}

Interval mean_chi2_interval_95(std::size_t n, double dof) {
    if (n == 0) {
        throw std::invalid_argument("mean_chi2_interval_95: n must be positive");
    }
    const double total_dof = static_cast<double>(n) * dof;
    const double scale = static_cast<double>(n);
    return Interval{chi2_quantile(total_dof, 0.025) / scale,
                    chi2_quantile(total_dof, 0.975) / scale};
}

void RunningStats::add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
    max_ = (n_ == 1) ? x : std::max(max_, x);
}

}  // namespace cropspray::stats
