#pragma once

#include <cstddef>
#include <vector>

#include "cachekit/types.hpp"

namespace cachekit {

/// Exact steady-state IRM hit ratios of LRU, from the closed-form stack
/// probabilities. Evaluated by a subset DP (2^N states), guarded by
/// `max_objects` (exceeding it raises ResourceLimitError pointing at the
/// Che/Fagin approximations).
struct LruExactOptions {
    std::size_t max_objects = 12;
};

double lru_exact_hit_ratio(const std::vector<double>& pmf, std::size_t m,
                           const LruExactOptions& options = {});

/// Content dynamics driven by `content_pmf` (e.g. gamma substitution), hits
/// credited with `request_pmf`.
double lru_exact_hit_ratio_weighted(const std::vector<double>& content_pmf,
                                    const std::vector<double>& request_pmf,
                                    std::size_t m, const LruExactOptions& options = {});

/// Per-object steady-state residency probabilities (unit sizes).
std::vector<double> lru_exact_residency(const std::vector<double>& content_pmf,
                                        std::size_t m, const LruExactOptions& options = {});

struct VariableSizeHitRatios {
    double ohr = 0.0;
    double bhr = 0.0;
    double vhr = 0.0;
};

/// Variable-size LRU: an object at stack position d is a hit iff the whole
/// prefix through it fits into M bytes. Requires s_k <= M for every object
/// (exclude larger ones beforehand).
VariableSizeHitRatios lru_exact_variable_size(const std::vector<double>& pmf,
                                              const std::vector<Bytes>& sizes,
                                              Bytes m_bytes,
                                              const std::vector<double>& values = {},
                                              const LruExactOptions& options = {});

}  // namespace cachekit
