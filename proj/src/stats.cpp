#include "flsim/stats.hpp"

#include <cmath>
#include <limits>

#include "flsim/errors.hpp"

namespace flsim::stats {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    constexpr double kTiny = 1e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= kEps) return h;
    }
    return h;  // converged to machine precision in practice
}

}  // namespace

double incbeta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incbeta: a and b must be positive");
    if (x < 0.0 || x > 1.0) throw DomainError("incbeta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                    b * std::log1p(-x);
    double bt = std::exp(log_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double incbeta_inv(double a, double b, double p) {
    if (p < 0.0 || p > 1.0) throw DomainError("incbeta_inv: p outside [0, 1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (incbeta(a, b, mid) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15) break;
    }
    return 0.5 * (lo + hi);
}

Interval clopper_pearson(int k, int n, double confidence) {
    if (n < 1) throw DomainError("clopper_pearson: n must be >= 1");
    if (k < 0 || k > n) throw DomainError("clopper_pearson: k outside [0, n]");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw DomainError("clopper_pearson: confidence outside (0, 1)");
    double alpha = 1.0 - confidence;
    Interval ci;
    ci.lower = (k == 0) ? 0.0 : incbeta_inv(static_cast<double>(k), static_cast<double>(n - k + 1),
                                            alpha / 2.0);
    ci.upper = (k == n) ? 1.0
                        : incbeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k),
                                      1.0 - alpha / 2.0);
    return ci;
}

Quadrature gauss_hermite(int n) {
    if (n < 1) throw DomainError("gauss_hermite: n must be >= 1");
    Quadrature q;
    q.nodes.assign(static_cast<size_t>(n), 0.0);
    q.weights.assign(static_cast<size_t>(n), 0.0);

    // Newton iteration on the orthonormal Hermite recurrence, seeding each
    // root from the previous one (largest first).
    int m = (n + 1) / 2;
    double z = 0.0;
    double pp = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * q.nodes[static_cast<size_t>(n - 1)];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * q.nodes[static_cast<size_t>(n - 2)];
        } else {
            z = 2.0 * z - q.nodes[static_cast<size_t>(n - i + 1)];
        }
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = std::pow(kPi, -0.25);
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= 1e-15) break;
        }
        q.nodes[static_cast<size_t>(n - 1 - i)] = z;
        q.nodes[static_cast<size_t>(i)] = -z;
        double w = 2.0 / (pp * pp);
        q.weights[static_cast<size_t>(n - 1 - i)] = w;
        q.weights[static_cast<size_t>(i)] = w;
    }
    if (n % 2 == 1) q.nodes[static_cast<size_t>(n / 2)] = 0.0;
    return q;
}

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("logit: p outside (0, 1)");
    return std::log(p / (1.0 - p));
}

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p outside (0, 1)");

    // Acklam's rational approximation.
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against the exact CDF.
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

}  // namespace flsim::stats
