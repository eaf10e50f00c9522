#include "cachekit/lru_exact.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "numeric_util.hpp"

namespace cachekit {

namespace {

/// pi[S] = stationary probability that the top |S| stack positions hold
/// exactly the set S (summed over orderings): recursion peels the deepest
/// element.
std::vector<double> stack_set_probabilities(const std::vector<double>& g,
                                            std::vector<double>& psum) {
    const std::size_t n = g.size();
    const std::size_t full = std::size_t{1} << n;
    std::vector<double> pi(full, 0.0);
    psum.assign(full, 0.0);
    pi[0] = 1.0;
    for (std::size_t s = 1; s < full; ++s) {
        std::size_t bits = s;
        double total = 0.0;
        while (bits) {
            std::size_t b = bits & (~bits + 1);
            total += g[static_cast<std::size_t>(std::countr_zero(b))];
            bits ^= b;
        }
        psum[s] = total;
        double acc = 0.0;
        bits = s;
        while (bits) {
            std::size_t b = bits & (~bits + 1);
            std::size_t k = static_cast<std::size_t>(std::countr_zero(b));
            bits ^= b;
            double denom = 1.0 - total + g[k];
            if (denom > 1e-15) acc += pi[s ^ b] * g[k] / denom;
        }
        pi[s] = acc;
    }
    return pi;
}

void check_guard(std::size_t n, const LruExactOptions& options) {
    if (n > options.max_objects)
        throw ResourceLimitError(
            "lru_exact: N = " + std::to_string(n) + " exceeds the guard (" +
            std::to_string(options.max_objects) +
            "); use the Che or Fagin approximation for larger catalogs");
}

}  // namespace

std::vector<double> lru_exact_residency(const std::vector<double>& content_pmf,
                                        std::size_t m, const LruExactOptions& options) {
    detail::check_pmf(content_pmf, "lru_exact");
    const std::size_t n = content_pmf.size();
    check_guard(n, options);
    if (m < 1 || m > n) throw std::invalid_argument("lru_exact: require 1 <= M <= N");
    std::vector<double> psum;
    auto pi = stack_set_probabilities(content_pmf, psum);
    const std::size_t full = std::size_t{1} << n;
    std::vector<double> resident(n, 0.0);
    if (m == n) {
        resident.assign(n, 1.0);
        return resident;
    }
    for (std::size_t s = 0; s < full; ++s) {
        if (static_cast<std::size_t>(std::popcount(s)) >= m) continue;
        if (pi[s] == 0.0) continue;
        const double denom = 1.0 - psum[s];
        if (denom <= 1e-15) continue;
        for (std::size_t k = 0; k < n; ++k) {
            if (s & (std::size_t{1} << k)) continue;
            resident[k] += pi[s] * content_pmf[k] / denom;
        }
    }
    return resident;
}

double lru_exact_hit_ratio_weighted(const std::vector<double>& content_pmf,
                                    const std::vector<double>& request_pmf,
                                    std::size_t m, const LruExactOptions& options) {
    if (request_pmf.size() != content_pmf.size())
        throw std::invalid_argument("lru_exact: pmf length mismatch");
    auto resident = lru_exact_residency(content_pmf, m, options);
    double h = 0.0;
    for (std::size_t k = 0; k < resident.size(); ++k) h += request_pmf[k] * resident[k];
    return h;
}

double lru_exact_hit_ratio(const std::vector<double>& pmf, std::size_t m,
                           const LruExactOptions& options) {
    return lru_exact_hit_ratio_weighted(pmf, pmf, m, options);
}

VariableSizeHitRatios lru_exact_variable_size(const std::vector<double>& pmf,
                                              const std::vector<Bytes>& sizes,
                                              Bytes m_bytes,
                                              const std::vector<double>& values,
                                              const LruExactOptions& options) {
    detail::check_pmf(pmf, "lru_exact_variable_size");
    const std::size_t n = pmf.size();
    check_guard(n, options);
    if (sizes.size() != n)
        throw std::invalid_argument("lru_exact_variable_size: sizes length mismatch");
    if (!values.empty() && values.size() != n)
        throw std::invalid_argument("lru_exact_variable_size: values length mismatch");
    for (Bytes s : sizes)
        if (s < 1 || s > m_bytes)
            throw std::invalid_argument(
                "lru_exact_variable_size: require 1 <= s_k <= M for all objects; "
                "exclude larger objects");

    std::vector<double> psum;
    auto pi = stack_set_probabilities(pmf, psum);
    const std::size_t full = std::size_t{1} << n;
    std::vector<Bytes> ssum(full, 0);
    for (std::size_t s = 1; s < full; ++s) {
        std::size_t b = s & (~s + 1);
        ssum[s] = ssum[s ^ b] + sizes[static_cast<std::size_t>(std::countr_zero(b))];
    }
    std::vector<double> resident(n, 0.0);
    for (std::size_t s = 0; s < full; ++s) {
        if (pi[s] == 0.0) continue;
        const double denom = 1.0 - psum[s];
        if (denom <= 1e-15) continue;
        for (std::size_t k = 0; k < n; ++k) {
            if (s & (std::size_t{1} << k)) continue;
            if (ssum[s] + sizes[k] > m_bytes) continue;
            resident[k] += pi[s] * pmf[k] / denom;
        }
    }
    VariableSizeHitRatios out;
    double bytes_norm = 0.0, value_norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = values.empty() ? 1.0 : values[k];
        out.ohr += pmf[k] * resident[k];
        out.bhr += pmf[k] * static_cast<double>(sizes[k]) * resident[k];
        out.vhr += pmf[k] * v * resident[k];
        bytes_norm += pmf[k] * static_cast<double>(sizes[k]);
        value_norm += pmf[k] * v;
    }
    out.bhr /= bytes_norm;
    out.vhr /= value_norm;
    return out;
}

}  // namespace cachekit
