#pragma once

#include <cstddef>
#include <vector>

#include "cachekit/types.hpp"

namespace cachekit {

struct ApproxResult {
    std::vector<double> per_object;  // h_j
    double hit_ratio = 0.0;          // sum p_j h_j
    double root = 0.0;               // characteristic time / sojourn parameter
    double residual = 0.0;           // |defining equation at root - M|
};

/// Che approximation: solve M = sum(1 - exp(-p_j T)), then
/// h_j = 1 - exp(-p_j T). T is in units of requests.
ApproxResult che_lru(const std::vector<double>& pmf, std::size_t m);

/// Working-set approximation: solve M = sum(1 - (1 - p_k)^CT) over real CT;
/// exact for M = 1. The root equals the mean cache filling time in requests.
ApproxResult fagin_lru(const std::vector<double>& pmf, std::size_t m);

/// Sojourn-time approximation of FIFO (also CpR/RANDOM under IRM):
/// M = sum p_j D / (p_j D + 1), h_j = p_j D / (p_j D + 1).
ApproxResult fifo_approx(const std::vector<double>& pmf, std::size_t m);

/// h*(r) = sum_k p_k (1 - (1 - p_k)^r): hit-ratio bound of the r-th request,
/// exact while no evictions have happened.
double filling_phase_hit_bound(const std::vector<double>& pmf, std::uint64_t r);

struct ConvergenceDistribution {
    std::size_t m = 0;
    std::vector<double> prob;  // prob[j] = Prob{fill time = m + j}, j = 0..r_max-m
    double mean = 0.0;
    double tail_mass = 0.0;    // probability mass beyond r_max
};

/// Exact distribution of the number of requests until m distinct objects have
/// been referenced (partial coupon collection). Guard: subsets up to size m-1.
struct ConvergenceOptions {
    std::size_t max_objects = 10;
    std::size_t max_m = 5;
};

ConvergenceDistribution convergence_time_distribution(const std::vector<double>& pmf,
                                                      std::size_t m, std::size_t r_max,
                                                      const ConvergenceOptions& options = {});

}  // namespace cachekit
