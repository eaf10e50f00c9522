#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "cachekit/types.hpp"

namespace cachekit {

/// p_k = alpha * k^(-beta), k = 1..n, normalized to sum 1.
std::vector<double> zipf_pmf(std::size_t n, double beta);

/// Log-normal object sizes in bytes: round(exp(mu + sigma*Z) * 1000), min 1.
std::vector<Bytes> lognormal_sizes(std::size_t n, double mu, double sigma,
                                   std::uint64_t seed);

/// Log-normal values: exp(mu + sigma*Z), not scaled or rounded.
std::vector<double> lognormal_values(std::size_t n, double mu, double sigma,
                                     std::uint64_t seed);

/// Per-hit delay value (d_source - d_cache) - d_check; may be negative.
inline double delay_value(double d_source, double d_cache, double d_check) {
    return (d_source - d_cache) - d_check;
}

/// Builds a catalog of n objects named "o1".."on" with the given popularity
/// weights and optional sizes/values (defaults 1 / 1.0).
Catalog make_catalog(const std::vector<double>& weights,
                     const std::vector<Bytes>* sizes = nullptr,
                     const std::vector<double>* values = nullptr);

/// r i.i.d. draws from the catalog pmf, no timestamps.
Trace generate_irm_trace(const Catalog& catalog, std::size_t r, std::uint64_t seed);

/// Poisson request model: merged arrivals at total rate = sum of per-object
/// rates lambda_k = rate * p_k; objects drawn i.i.d. from the pmf. Timestamps
/// in seconds.
Trace generate_prm_trace(const Catalog& catalog, std::size_t r, double total_rate,
                         std::uint64_t seed);

/// Cyclic requests 1..n_objects repeated to length r; unit sizes and values.
Trace loop_trace(std::size_t n_objects, std::size_t r);

// ---------------------------------------------------------------------------
// Churn model: new objects enter with probability p_new per request; old
// request probabilities rescale by (1 - p_init) on each entry.
// ---------------------------------------------------------------------------

/// Samples the initial request probability of a newly entering object.
/// Must return a value in (0, 1).
using InitProbSampler = std::function<double(std::mt19937_64&)>;

/// Picks an initial probability from a Zipf pmf over ranks 1..n, scaled by
/// `scale`. Matches the usual "new objects start with Zipf-like popularity".
InitProbSampler zipf_init_sampler(std::size_t n, double beta, double scale = 1.0);

struct ChurnModel {
    double p_new = 0.0;
    Catalog initial_catalog;
    InitProbSampler init_prob;                       // required when p_new > 0
    std::function<CatalogEntry(std::size_t)> new_entry;  // optional; names default to "n<i>"
};

/// One entry per new-object event; probabilities of any request index are
/// reconstructible from this log plus the initial pmf.
struct ChurnEvent {
    std::size_t request_index;   // the request at which the object entered
    ObjectId object;             // index in the final catalog
    double p_init;               // its initial request probability
};

struct ChurnLog {
    double p_new = 0.0;
    std::vector<double> initial_pmf;
    std::vector<ChurnEvent> events;

    /// Reconstructs the catalog pmf in force at request index r (before the
    /// request is drawn). Entries of not-yet-born objects are 0. The vector is
    /// sized to the final catalog and sums to 1.
    std::vector<double> pmf_at(std::size_t r, std::size_t final_catalog_size) const;
};

struct ChurnTrace {
    Trace trace;
    ChurnLog log;
};

ChurnTrace generate_churn_trace(const ChurnModel& model, std::size_t r,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sampling utilities
// ---------------------------------------------------------------------------

/// Cumulative-table sampler over a fixed pmf.
class DiscreteSampler {
public:
    explicit DiscreteSampler(const std::vector<double>& pmf);
    ObjectId operator()(std::mt19937_64& rng) const;

private:
    std::vector<double> cumulative_;
};

/// Number of requests until `m` distinct objects have been referenced,
/// sampled once. Used for filling/convergence time experiments.
std::size_t sample_fill_time(const DiscreteSampler& sampler, std::size_t m,
                             std::mt19937_64& rng);

}  // namespace cachekit
