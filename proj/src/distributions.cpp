#include "seedkit/distributions.hpp"

#include <cmath>
#include <limits>

#include "seedkit/types.hpp"

namespace seedkit {

namespace {

double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1, qam = a - 1;
    double c = 1, d = 1 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1) < kEps) return h;
    }
    throw Error("incomplete beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0) || !(b > 0)) throw ValidationError("incomplete beta: a, b must be > 0");
    if (!(x >= 0 && x <= 1)) throw ValidationError("incomplete beta: x outside [0,1]");
    if (x == 0) return 0;
    if (x == 1) return 1;
    double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                       b * std::log1p(-x);
    double front = std::exp(log_front);
    if (x < (a + 1) / (a + b + 2)) return front * beta_continued_fraction(a, b, x) / a;
    return 1 - front * beta_continued_fraction(b, a, 1 - x) / b;
}

double f_upper_tail(double f, double df1, double df2) {
    if (!(df1 > 0) || !(df2 > 0)) throw ValidationError("F distribution: degrees of freedom must be > 0");
    if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
    if (f <= 0) return 1;
    if (std::isinf(f)) return 0;
    // P(F > f) = I_{df2 / (df2 + df1 f)}(df2/2, df1/2)
    return incomplete_beta(df2 / 2, df1 / 2, df2 / (df2 + df1 * f));
}

}  // namespace seedkit
