#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cachekit/sim.hpp"   // TtlDiscipline
#include "cachekit/types.hpp"

namespace cachekit {

/// Poisson request model per object: rates in 1/second.
struct RateModel {
    std::vector<double> lambdas;

    double total() const;
    std::vector<double> pmf() const;  // p_k = lambda_k / lambda
};

// --- closed forms (Poisson requests) ---------------------------------------

/// TTL reset per cache miss: lambda*dt / (lambda*dt + 1).
double ttl_hit_reset_per_miss(double lambda, double delta_t);

/// TTL reset per request: 1 - exp(-lambda*dt).
double ttl_hit_reset_per_request(double lambda, double delta_t);

/// Periodic resets under Poisson requests: (E - 1 + p0)/E with E = lambda*dt,
/// p0 = exp(-lambda*dt).
double ttl_hit_periodic_poisson(double lambda, double delta_t);

/// Aggregate hit ratio of a rate model under one discipline and a common dt.
double ttl_hit_aggregate(const RateModel& model, TtlDiscipline discipline, double delta_t);

// --- trace statistics (periodic resets, arbitrary timing) ------------------

struct IntervalStats {
    struct PerObject {
        ObjectId object;
        double window;         // dt used for this object
        double mean_requests;  // E[c(dt)] over complete windows
        double empty_fraction; // p0(dt)
        std::uint64_t windows; // number of complete windows observed
    };
    std::vector<PerObject> objects;
};

/// Splits the trace horizon (first to last timestamp, plus `offset`) into
/// consecutive windows of length dt per object and counts requests; windows
/// cut off by the horizon end are discarded. Objects without any request in
/// the horizon are excluded.
IntervalStats trace_interval_stats(const Trace& trace, double delta_t, double offset = 0.0);
IntervalStats trace_interval_stats(const Trace& trace, const std::vector<double>& delta_t,
                                   double offset = 0.0);

/// Per-object (E - 1 + p0)/E plus the rate-normalized aggregate; objects with
/// E = 0 contribute to neither sum.
struct PeriodicHitRatio {
    std::vector<double> per_object;
    double aggregate = 0.0;
};

PeriodicHitRatio periodic_reset_hit_ratio(const IntervalStats& stats);

// --- adaptation and occupancy ----------------------------------------------

struct TtlTarget {
    enum Kind { HIT_RATIO, OCCUPANCY } kind = HIT_RATIO;
    double value = 0.5;
};

/// Finds dt such that the aggregate hit ratio (any discipline) or the
/// expected occupancy (reset-per-miss closed form) meets the target.
/// Unreachable targets raise std::invalid_argument naming the supremum.
double ttl_adapt(const RateModel& model, TtlTarget target, TtlDiscipline discipline);

struct OccupancyEstimate {
    double expected = 0.0;   // expected number of valid objects
    double stderr_ = 0.0;    // 0 for the closed form
};

/// Expected number of valid objects. RESET_PER_MISS uses the renewal closed
/// form; the other disciplines are estimated by seeded Monte Carlo with a
/// reported standard error.
OccupancyEstimate ttl_occupancy(const RateModel& model, TtlDiscipline discipline,
                                double delta_t, std::uint64_t mc_cycles = 100'000,
                                std::uint64_t seed = 1);

/// Worst-case hit ratio of a TTL-unaware policy under TTL invalidation:
/// base * h_ttl(discipline, lambda, dt).
double consistency_discount(double base_hit_ratio, TtlDiscipline discipline, double lambda,
                            double delta_t);

// --- Monte Carlo oracle ------------------------------------------------------

struct TtlSimResult {
    double hit_ratio = 0.0;
    double stderr_ = 0.0;
    std::uint64_t requests = 0;
};

/// Event-driven single-object TTL cache simulation under Poisson requests;
/// the independence of objects makes per-object simulation sufficient.
/// A request at the exact expiry instant is a miss. Runs until `cycles`
/// TTL reloads or `max_requests` requests, whichever comes first (at high
/// loads a reset-per-request renewal cycle spans e^(lambda dt) requests).
/// The standard error is estimated by batch means, which stays honest on the
/// correlated hit/miss stream.
TtlSimResult simulate_ttl_hit_ratio(double lambda, double delta_t, TtlDiscipline discipline,
                                    std::uint64_t cycles, std::uint64_t seed,
                                    std::uint64_t max_requests = 50'000'000);

}  // namespace cachekit
