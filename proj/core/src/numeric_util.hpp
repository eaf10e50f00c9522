#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace cachekit::detail {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
    if (a == kLogZero) return b;
    if (b == kLogZero) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

inline void check_pmf(const std::vector<double>& pmf, const char* who) {
    if (pmf.empty()) throw std::invalid_argument(std::string(who) + ": empty pmf");
    double sum = 0.0;
    for (double p : pmf) {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::invalid_argument(std::string(who) + ": probabilities must be finite and >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(who) + ": pmf must sum to 1");
}

}  // namespace cachekit::detail
