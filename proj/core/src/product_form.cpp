#include "cachekit/product_form.hpp"

#include <cmath>
#include <stdexcept>

#include "numeric_util.hpp"

namespace cachekit {

using detail::kLogZero;
using detail::log_add;

double product_form_hit_ratio_weighted(const std::vector<double>& content_pmf,
                                       const std::vector<double>& request_pmf,
                                       std::size_t m) {
    detail::check_pmf(content_pmf, "product_form");
    if (request_pmf.size() != content_pmf.size())
        throw std::invalid_argument("product_form: pmf length mismatch");
    const std::size_t n = content_pmf.size();
    if (m < 1 || m > n) throw std::invalid_argument("product_form: require 1 <= M <= N");
    if (m == n) return 1.0;

    // f[j] = log sum over j-subsets of prod(gamma); g[j] = log sum over
    // j-subsets of prod(gamma) * sum of request p inside the subset. Adding an
    // object never subtracts, so log space is safe.
    std::vector<double> f(m + 1, kLogZero), g(m + 1, kLogZero);
    f[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (content_pmf[k] <= 0.0) continue;
        const double lg = std::log(content_pmf[k]);
        const double lgp = request_pmf[k] > 0.0
                               ? lg + std::log(request_pmf[k])
                               : kLogZero;
        for (std::size_t j = m; j >= 1; --j) {
            g[j] = log_add(g[j], log_add(lg + g[j - 1], lgp + f[j - 1]));
            f[j] = log_add(f[j], lg + f[j - 1]);
        }
    }
    if (f[m] == kLogZero)
        throw std::invalid_argument("product_form: fewer than M objects with positive probability");
    return std::exp(g[m] - f[m]);
}

double product_form_hit_ratio(const std::vector<double>& pmf, std::size_t m) {
    return product_form_hit_ratio_weighted(pmf, pmf, m);
}

double multilevel_product_form_weighted(const MultiLevelProblem& problem,
                                        const std::vector<double>& request_pmf) {
    const auto& pmf = problem.pmf;
    detail::check_pmf(pmf, "multilevel_product_form");
    if (request_pmf.size() != pmf.size())
        throw std::invalid_argument("multilevel_product_form: pmf length mismatch");
    const std::size_t n = pmf.size();
    const std::size_t levels = problem.levels.size();
    if (levels == 0) throw std::invalid_argument("multilevel_product_form: no levels");
    std::size_t m = 0, states = 1;
    for (std::size_t l : problem.levels) {
        if (l < 1) throw std::invalid_argument("multilevel_product_form: level size must be >= 1");
        m += l;
        states *= l + 1;
        if (states > problem.max_level_states)
            throw ResourceLimitError("multilevel_product_form: level state space too large");
    }
    if (m > n) throw std::invalid_argument("multilevel_product_form: sum of levels exceeds N");

    // Objects in level j (1-based) carry exponent K+1-j on their probability.
    // DP over objects; state = filled slots per level, mixed-radix encoded.
    std::vector<std::size_t> radix(levels);
    {
        std::size_t r = 1;
        for (std::size_t j = 0; j < levels; ++j) {
            radix[j] = r;
            r *= problem.levels[j] + 1;
        }
    }
    std::vector<double> z(states, kLogZero), a(states, kLogZero);
    std::vector<double> z2(states), a2(states);
    z[0] = 0.0;
    std::vector<std::size_t> digits(levels);
    for (std::size_t k = 0; k < n; ++k) {
        const double lp = pmf[k] > 0.0 ? std::log(pmf[k]) : kLogZero;
        const double lr = request_pmf[k] > 0.0 ? std::log(request_pmf[k]) : kLogZero;
        z2 = z;
        a2 = a;
        if (lp != kLogZero) {
            for (std::size_t s = 0; s < states; ++s) {
                if (z[s] == kLogZero && a[s] == kLogZero) continue;
                std::size_t rem = s;
                for (std::size_t j = 0; j < levels; ++j) {
                    digits[j] = rem % (problem.levels[j] + 1);
                    rem /= problem.levels[j] + 1;
                }
                for (std::size_t j = 0; j < levels; ++j) {
                    if (digits[j] == problem.levels[j]) continue;
                    const double lw = static_cast<double>(levels - j) * lp;
                    const std::size_t ns = s + radix[j];
                    if (z[s] != kLogZero) {
                        z2[ns] = log_add(z2[ns], z[s] + lw);
                        if (lr != kLogZero) a2[ns] = log_add(a2[ns], z[s] + lw + lr);
                    }
                    if (a[s] != kLogZero) a2[ns] = log_add(a2[ns], a[s] + lw);
                }
            }
        }
        z.swap(z2);
        a.swap(a2);
    }
    const std::size_t full = states - 1;
    if (z[full] == kLogZero)
        throw std::invalid_argument("multilevel_product_form: fewer than M objects with positive probability");
    return std::exp(a[full] - z[full]);
}

double multilevel_product_form(const MultiLevelProblem& problem) {
    return multilevel_product_form_weighted(problem, problem.pmf);
}

std::vector<double> probabilistic_substitution(const std::vector<double>& pmf,
                                               const std::vector<double>& admit_prob) {
    detail::check_pmf(pmf, "probabilistic_substitution");
    if (admit_prob.size() != pmf.size())
        throw std::invalid_argument("probabilistic_substitution: q length mismatch");
    double total = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        const double q = admit_prob[k];
        if (!(q > 0.0) || q > 1.0)
            throw std::invalid_argument(
                "probabilistic_substitution: q_k must be in (0,1]; exclude never-cached objects");
        total += pmf[k] * q;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("probabilistic_substitution: sum p_k q_k must be positive");
    std::vector<double> gamma(pmf.size());
    for (std::size_t k = 0; k < pmf.size(); ++k) gamma[k] = pmf[k] * admit_prob[k] / total;
    return gamma;
}

}  // namespace cachekit
