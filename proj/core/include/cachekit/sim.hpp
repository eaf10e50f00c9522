#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cachekit/policy.hpp"
#include "cachekit/types.hpp"

namespace cachekit {

enum class TtlDiscipline { RESET_PER_MISS, RESET_PER_REQUEST, PERIODIC };

/// Hard TTL invalidation on top of a fixed-size cache: an expired resident
/// counts as a miss and is re-fetched in place (one upload).
struct TtlFlag {
    TtlDiscipline discipline = TtlDiscipline::RESET_PER_REQUEST;
    double delta_t = 1.0;
};

struct SimOptions {
    double warmup_fraction = 0.1;      // prefix excluded from all counters
    std::size_t hit_series_window = 0; // 0 disables; covers the whole run
    std::optional<TtlFlag> ttl;
    bool validate = false;             // occupancy check after every request
};

struct SimReport {
    std::uint64_t requests = 0;        // counted requests (after warmup)
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t uploads = 0;
    std::uint64_t warmup_excluded = 0;
    double ohr = 0.0;
    double bhr = 0.0;
    double vhr = 0.0;
    std::size_t hit_series_window = 0;
    std::vector<double> hit_series;    // per-window hit rate, whole run
    double throughput = 0.0;           // requests/second, informational

    /// Binomial standard error of the OHR estimate.
    double ohr_stderr() const;
};

/// Trace-driven simulation. Objects larger than the capacity are bypassed
/// (miss, no upload). Deterministic given (policy, seed, trace, capacity).
SimReport simulate(const PolicyConfig& policy, const Trace& trace, Bytes capacity,
                   const SimOptions& options = {});

double upload_ratio(const SimReport& report);

/// One-pass hit-ratio-curve computation for stack policies (LRU, LFU).
/// For each request the byte stack depth (sizes above and including the
/// requested object) credits a hit to every capacity >= depth. Exact for LRU;
/// for LFU this is the ungated frequency stack.
std::vector<SimReport> hrc_sweep_stack(PolicyKind policy, const Trace& trace,
                                       const std::vector<Bytes>& capacities,
                                       double warmup_fraction = 0.1);

}  // namespace cachekit
