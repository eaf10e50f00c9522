#pragma once

#include <cstddef>
#include <vector>

#include "cachekit/types.hpp"

namespace cachekit {

/// Steady-state IRM hit ratio common to FIFO, RANDOM and clock-per-request
/// (unit object sizes), evaluated by an O(M N) symmetric-function recursion in
/// log space. M = N returns 1 exactly.
double product_form_hit_ratio(const std::vector<double>& pmf, std::size_t m);

/// Same stationary content law driven by `content_pmf` (e.g. the gamma vector
/// of probabilistic caching) while hits are credited with `request_pmf`.
double product_form_hit_ratio_weighted(const std::vector<double>& content_pmf,
                                       const std::vector<double>& request_pmf,
                                       std::size_t m);

struct MultiLevelProblem {
    std::vector<double> pmf;
    std::vector<std::size_t> levels;  // l_1 (most protected) .. l_K; sum = M <= N
    std::size_t max_level_states = 50'000'000;  // guard on prod(l_i + 1)
};

/// Extended product form for K-level FIFO/RANDOM/CpR caches.
double multilevel_product_form(const MultiLevelProblem& problem);
double multilevel_product_form_weighted(const MultiLevelProblem& problem,
                                        const std::vector<double>& request_pmf);

/// gamma_k = p_k q_k / sum_j p_j q_j. All q_k must lie in (0, 1].
std::vector<double> probabilistic_substitution(const std::vector<double>& pmf,
                                               const std::vector<double>& admit_prob);

}  // namespace cachekit
