#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cachekit/types.hpp"
#include "cachekit/workload.hpp"

namespace cachekit {

// ---------------------------------------------------------------------------
// Static (IRM) knapsack bound with sizes and values.
// ---------------------------------------------------------------------------

struct StaticBound {
    double vhr_bound = 0.0;   // normalized upper bound on the value hit ratio
    std::size_t prefix = 0;   // L: number of whole objects in the greedy fill
    double fraction = 0.0;    // q: fractional part of object L+1
};

/// Sorts objects by value density v p / s and fills a cache of m_bytes
/// greedily, crediting the fractional part of the first object that no longer
/// fits. Unit sizes and values reduce this to the sum of the M largest p_k.
/// Objects with s_k > m_bytes are excluded.
StaticBound static_knapsack_bound(const std::vector<double>& pmf,
                                  const std::vector<Bytes>& sizes,
                                  const std::vector<double>& values, Bytes m_bytes);

/// Per-request bound for traces with churn: at each request the catalog pmf
/// is reconstructed from the log, the greedy fill recomputed, and the term
/// weighted by (1 - p_new). Returns the average bound plus per-segment
/// values (one segment per stretch between new-object events).
struct DynamicBound {
    double vhr_bound = 0.0;
    std::vector<double> per_request;  // bound contribution of each request
};

DynamicBound dynamic_popularity_bound(const ChurnLog& log, std::size_t n_requests,
                                      const std::vector<Bytes>& sizes,
                                      const std::vector<double>& values, Bytes m_bytes);

// ---------------------------------------------------------------------------
// Belady (unit sizes).
// ---------------------------------------------------------------------------

struct BeladyResult {
    std::uint64_t hits = 0;
    double hit_ratio = 0.0;
};

/// Farthest-next-request-first eviction with the insertion gate: on a miss
/// with a full cache the object enters only if its next use precedes some
/// resident's next use. Unit object sizes required.
BeladyResult belady(const Trace& trace, std::size_t m_objects);

// ---------------------------------------------------------------------------
// 2D-knapsack bounds on clairvoyant caching value.
// ---------------------------------------------------------------------------

struct RequestInterval {
    ObjectId object = 0;
    std::size_t start = 0;    // m: index of the previous reference
    std::size_t end = 0;      // n: index of this reference; occupies [m, n)
    Bytes size = 1;
    double value = 1.0;

    std::size_t length() const { return end - start; }         // A
    double footprint() const {
        return static_cast<double>(length()) * static_cast<double>(size);
    }
    double score() const { return value / footprint(); }
};

/// All re-reference intervals of a trace in request order. One-timers and
/// first references produce none.
std::vector<RequestInterval> extract_intervals(const Trace& trace);

/// Zeroes the value of intervals whose object TTL (seconds, per object)
/// expires before the interval ends; requires timestamps. NaN TTL = no limit.
std::vector<double> ttl_interval_values(const Trace& trace,
                                        const std::vector<RequestInterval>& intervals,
                                        const std::vector<double>& ttl_seconds);

struct BoundReport {
    double v_lower = 0.0;     // greedy whole-interval packing
    double v_upper = 0.0;     // fractional filling in the same order
    double v_total = 0.0;     // total interval value (attainable by an infinite cache)
    double vhr_lower = 0.0;
    double vhr_upper = 0.0;
    std::vector<std::size_t> placements;  // indices into the interval list (lower bound)
};

/// Greedy 2D-knapsack bounds V- <= V_max <= V+ for a cache of m_bytes over
/// the trace's request-index timeline. `values` optionally overrides each
/// interval's value (aligned with extract_intervals order).
BoundReport knapsack_2d_bounds(const Trace& trace, Bytes m_bytes,
                               const std::vector<double>* interval_values = nullptr);

/// Exact clairvoyant optimum by branch-and-bound over interval placements.
struct ExhaustiveOptions {
    std::size_t max_requests = 20;
    std::size_t max_objects = 6;
};

double exhaustive_offline_optimum(const Trace& trace, Bytes m_bytes,
                                  const std::vector<double>* interval_values = nullptr,
                                  const ExhaustiveOptions& options = {});

/// Drops the given head/tail fractions of requests; the usual evaluation
/// protocol for bound computations, avoiding fill-up and trace-end artifacts.
Trace trim_trace(const Trace& trace, double head_fraction, double tail_fraction);

}  // namespace cachekit
