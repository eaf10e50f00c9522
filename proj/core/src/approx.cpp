#include "cachekit/approx.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "numeric_util.hpp"

namespace cachekit {

namespace {

/// Bracketed bisection on a monotone increasing function; returns the root of
/// f(x) = target on [0, hi_start..expanded].
double solve_monotone(const std::function<double(double)>& f, double target,
                      double hi_start) {
    double lo = 0.0, hi = hi_start;
    for (int i = 0; i < 200 && f(hi) < target; ++i) hi *= 2.0;
    if (f(hi) < target)
        throw std::invalid_argument("root solve: target not reachable");
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void check_m(const std::vector<double>& pmf, std::size_t m, const char* who) {
    detail::check_pmf(pmf, who);
    if (m < 1 || m > pmf.size())
        throw std::invalid_argument(std::string(who) + ": require 1 <= M <= N");
}

}  // namespace

ApproxResult che_lru(const std::vector<double>& pmf, std::size_t m) {
    check_m(pmf, m, "che_lru");
    const std::size_t n = pmf.size();
    ApproxResult out;
    out.per_object.resize(n);
    if (m == n) {
        out.per_object.assign(n, 1.0);
        out.hit_ratio = 1.0;
        out.root = std::numeric_limits<double>::infinity();
        return out;
    }
    auto filled = [&](double t) {
        double s = 0.0;
        for (double p : pmf) s += -std::expm1(-p * t);
        return s;
    };
    double t = solve_monotone(filled, static_cast<double>(m), static_cast<double>(n));
    out.root = t;
    out.residual = std::abs(filled(t) - static_cast<double>(m));
    for (std::size_t k = 0; k < n; ++k) {
        out.per_object[k] = -std::expm1(-pmf[k] * t);
        out.hit_ratio += pmf[k] * out.per_object[k];
    }
    return out;
}

ApproxResult fagin_lru(const std::vector<double>& pmf, std::size_t m) {
    check_m(pmf, m, "fagin_lru");
    const std::size_t n = pmf.size();
    ApproxResult out;
    out.per_object.resize(n);
    if (m == n) {
        out.per_object.assign(n, 1.0);
        out.hit_ratio = 1.0;
        out.root = std::numeric_limits<double>::infinity();
        return out;
    }
    // precompute log(1-p); (1-p)^ct = exp(ct*log1p(-p))
    std::vector<double> log1m(n);
    for (std::size_t k = 0; k < n; ++k) log1m[k] = std::log1p(-pmf[k]);
    auto filled = [&](double ct) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (pmf[k] >= 1.0)
                s += ct > 0 ? 1.0 : 0.0;
            else
                s += -std::expm1(ct * log1m[k]);
        }
        return s;
    };
    double ct = solve_monotone(filled, static_cast<double>(m), static_cast<double>(n));
    out.root = ct;
    out.residual = std::abs(filled(ct) - static_cast<double>(m));
    for (std::size_t k = 0; k < n; ++k) {
        out.per_object[k] = pmf[k] >= 1.0 ? 1.0 : -std::expm1(ct * log1m[k]);
        out.hit_ratio += pmf[k] * out.per_object[k];
    }
    return out;
}

ApproxResult fifo_approx(const std::vector<double>& pmf, std::size_t m) {
    check_m(pmf, m, "fifo_approx");
    const std::size_t n = pmf.size();
    ApproxResult out;
    out.per_object.resize(n);
    if (m == n) {
        out.per_object.assign(n, 1.0);
        out.hit_ratio = 1.0;
        out.root = std::numeric_limits<double>::infinity();
        return out;
    }
    auto filled = [&](double d) {
        double s = 0.0;
        for (double p : pmf) s += p * d / (p * d + 1.0);
        return s;
    };
    double d = solve_monotone(filled, static_cast<double>(m), static_cast<double>(n));
    out.root = d;
    out.residual = std::abs(filled(d) - static_cast<double>(m));
    for (std::size_t k = 0; k < n; ++k) {
        out.per_object[k] = pmf[k] * d / (pmf[k] * d + 1.0);
        out.hit_ratio += pmf[k] * out.per_object[k];
    }
    return out;
}

double filling_phase_hit_bound(const std::vector<double>& pmf, std::uint64_t r) {
    detail::check_pmf(pmf, "filling_phase_hit_bound");
    if (r == 0) return 0.0;
    double h = 0.0;
    const double rr = static_cast<double>(r);
    for (double p : pmf) {
        if (p <= 0.0) continue;
        double miss = p >= 1.0 ? 0.0 : std::exp(rr * std::log1p(-p));
        h += p * (1.0 - miss);
    }
    return h;
}

ConvergenceDistribution convergence_time_distribution(const std::vector<double>& pmf,
                                                      std::size_t m, std::size_t r_max,
                                                      const ConvergenceOptions& options) {
    detail::check_pmf(pmf, "convergence_time_distribution");
    const std::size_t n = pmf.size();
    if (m < 1 || m > n)
        throw std::invalid_argument("convergence_time_distribution: require 1 <= M <= N");
    if (n > options.max_objects || m > options.max_m)
        throw ResourceLimitError(
            "convergence_time_distribution: guard exceeded (N <= " +
            std::to_string(options.max_objects) + ", M <= " + std::to_string(options.max_m) +
            "); use the working-set root of fagin_lru for a mean estimate");
    if (r_max < m) throw std::invalid_argument("convergence_time_distribution: r_max < M");

    // state: subset of referenced objects, |subset| < m; the order of entries
    // does not affect the count of distinct objects, so sets suffice
    const std::size_t full = std::size_t{1} << n;
    std::vector<double> psum(full, 0.0);
    for (std::size_t s = 1; s < full; ++s) {
        std::size_t b = s & (~s + 1);
        psum[s] = psum[s ^ b] + pmf[static_cast<std::size_t>(std::countr_zero(b))];
    }
    std::vector<std::size_t> live;  // subsets with < m members
    for (std::size_t s = 0; s < full; ++s)
        if (static_cast<std::size_t>(std::popcount(s)) < m) live.push_back(s);

    std::vector<double> cur(full, 0.0), next(full, 0.0);
    cur[0] = 1.0;
    ConvergenceDistribution out;
    out.m = m;
    out.prob.assign(r_max - m + 1, 0.0);
    double mean = 0.0, mass = 0.0;
    for (std::size_t r = 1; r <= r_max; ++r) {
        std::fill(next.begin(), next.end(), 0.0);
        double finish = 0.0;
        for (std::size_t s : live) {
            const double ps = cur[s];
            if (ps == 0.0) continue;
            next[s] += ps * psum[s];  // repeat reference inside the set
            for (std::size_t k = 0; k < n; ++k) {
                if (s & (std::size_t{1} << k)) continue;
                const std::size_t t = s | (std::size_t{1} << k);
                if (static_cast<std::size_t>(std::popcount(t)) == m)
                    finish += ps * pmf[k];
                else
                    next[t] += ps * pmf[k];
            }
        }
        if (r >= m) {
            out.prob[r - m] = finish;
            mean += finish * static_cast<double>(r);
            mass += finish;
        }
        cur.swap(next);
    }
    out.tail_mass = 1.0 - mass;
    // mean over the computed horizon; with adequate r_max the tail is negligible
    out.mean = mass > 0 ? mean / mass : 0.0;
    return out;
}

}  // namespace cachekit
