#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace wpuf {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Regularized upper incomplete gamma Q(a, x) (series / continued fraction,
/// the usual split at x = a + 1).
inline double igamc(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("igamc: bad arguments");
    if (x == 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // lower series
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - lg);
        return 1.0 - p;
    }
    // continued fraction (modified Lentz)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

/// Upper tail of the chi-square distribution with k degrees of freedom.
inline double chi2_sf(double x, double k) { return igamc(k / 2.0, x / 2.0); }

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // population variance
    double skew = 0.0;
    double ex_kurtosis = 0.0;
};

inline Moments moments(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("moments: empty input");
    const double n = static_cast<double>(v.size());
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = x - m.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    m.var = m2;
    if (m2 > 0.0) {
        m.skew = m3 / std::pow(m2, 1.5);
        m.ex_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return m;
}

/// Jarque-Bera normality p-value (chi-square with 2 dof asymptotics).
inline double normality_p(std::span<const double> v) {
    const Moments m = moments(v);
    const double n = static_cast<double>(v.size());
    const double jb = n / 6.0 * (m.skew * m.skew + m.ex_kurtosis * m.ex_kurtosis / 4.0);
    return std::exp(-jb / 2.0);
}

}  // namespace wpuf
