#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include <gmpxx.h>

namespace brw {

/// Natural log of a nonnegative big integer; -inf for zero.
inline double log_big(const mpz_class& v) {
    if (v == 0) return -std::numeric_limits<double>::infinity();
    signed long e = 0;
    double m = mpz_get_d_2exp(&e, v.get_mpz_t());
    return std::log(m) + static_cast<double>(e) * std::numbers::ln2;
}

/// Natural log of a nonnegative rational; -inf for zero.
inline double log_big(const mpq_class& v) {
    if (v == 0) return -std::numeric_limits<double>::infinity();
    return log_big(mpz_class(v.get_num())) - log_big(mpz_class(v.get_den()));
}

/// Standard normal CDF, accurate to ~1e-15 over the whole real line.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Small binomial coefficient, exact for the ranges used here (n <= 62).
inline unsigned long long binom_small(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned long long r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
    }
    return r;
}

}  // namespace brw
