#include "cachekit/ttl.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace cachekit {

double RateModel::total() const {
    double t = 0.0;
    for (double l : lambdas) {
        if (!(l >= 0)) throw std::invalid_argument("rate model: rates must be >= 0");
        t += l;
    }
    if (!(t > 0)) throw std::invalid_argument("rate model: total rate must be > 0");
    return t;
}

std::vector<double> RateModel::pmf() const {
    double t = total();
    std::vector<double> p(lambdas.size());
    for (std::size_t k = 0; k < lambdas.size(); ++k) p[k] = lambdas[k] / t;
    return p;
}

double ttl_hit_reset_per_miss(double lambda, double delta_t) {
    if (lambda < 0 || delta_t < 0) throw std::invalid_argument("ttl: negative argument");
    double x = lambda * delta_t;
    if (std::isinf(x)) return 1.0;
    return x / (x + 1.0);
}

double ttl_hit_reset_per_request(double lambda, double delta_t) {
    if (lambda < 0 || delta_t < 0) throw std::invalid_argument("ttl: negative argument");
    return -std::expm1(-lambda * delta_t);
}

double ttl_hit_periodic_poisson(double lambda, double delta_t) {
    if (lambda < 0 || delta_t < 0) throw std::invalid_argument("ttl: negative argument");
    double e = lambda * delta_t;
    if (e == 0.0) return 0.0;
    if (std::isinf(e)) return 1.0;
    return (e - 1.0 + std::exp(-e)) / e;
}

namespace {

double per_object_hit(TtlDiscipline d, double lambda, double dt) {
    switch (d) {
        case TtlDiscipline::RESET_PER_MISS: return ttl_hit_reset_per_miss(lambda, dt);
        case TtlDiscipline::RESET_PER_REQUEST: return ttl_hit_reset_per_request(lambda, dt);
        case TtlDiscipline::PERIODIC: return ttl_hit_periodic_poisson(lambda, dt);
    }
    return 0.0;
}

}  // namespace

double ttl_hit_aggregate(const RateModel& model, TtlDiscipline discipline, double delta_t) {
    double total = model.total();
    double h = 0.0;
    for (double l : model.lambdas)
        h += (l / total) * per_object_hit(discipline, l, delta_t);
    return h;
}

IntervalStats trace_interval_stats(const Trace& trace, double delta_t, double offset) {
    return trace_interval_stats(trace, std::vector<double>(trace.catalog.size(), delta_t),
                                offset);
}

IntervalStats trace_interval_stats(const Trace& trace, const std::vector<double>& delta_t,
                                   double offset) {
    if (delta_t.size() != trace.catalog.size())
        throw std::invalid_argument("trace_interval_stats: dt length mismatch");
    if (trace.requests.empty()) return {};
    for (const auto& r : trace.requests)
        if (!r.has_time())
            throw std::invalid_argument("trace_interval_stats: timestamps required");
    const double origin = trace.requests.front().time + offset;
    const double horizon = trace.requests.back().time;

    struct Acc {
        std::uint64_t requests_in_complete = 0;
        std::uint64_t nonempty = 0;
        std::int64_t last_window = -1;
        std::uint64_t in_horizon = 0;
    };
    std::vector<Acc> acc(trace.catalog.size());
    std::vector<std::uint64_t> complete_windows(trace.catalog.size(), 0);
    for (std::size_t k = 0; k < trace.catalog.size(); ++k) {
        if (!(delta_t[k] > 0)) throw std::invalid_argument("trace_interval_stats: dt must be > 0");
        double w = (horizon - origin) / delta_t[k];
        complete_windows[k] = w > 0 ? static_cast<std::uint64_t>(std::floor(w)) : 0;
    }
    for (const auto& r : trace.requests) {
        if (r.time < origin) continue;
        auto& a = acc[r.object];
        ++a.in_horizon;
        double rel = (r.time - origin) / delta_t[r.object];
        auto win = static_cast<std::int64_t>(std::floor(rel));
        if (win < 0 || static_cast<std::uint64_t>(win) >= complete_windows[r.object])
            continue;  // window truncated by the horizon end (or before origin)
        ++a.requests_in_complete;
        if (win != a.last_window) {
            ++a.nonempty;
            a.last_window = win;
        }
    }
    IntervalStats out;
    for (std::size_t k = 0; k < trace.catalog.size(); ++k) {
        const auto& a = acc[k];
        if (a.in_horizon == 0) continue;  // never requested: excluded
        const auto w = complete_windows[k];
        IntervalStats::PerObject po;
        po.object = static_cast<ObjectId>(k);
        po.window = delta_t[k];
        po.windows = w;
        po.mean_requests =
            w ? static_cast<double>(a.requests_in_complete) / static_cast<double>(w) : 0.0;
        po.empty_fraction =
            w ? 1.0 - static_cast<double>(a.nonempty) / static_cast<double>(w) : 1.0;
        out.objects.push_back(po);
    }
    return out;
}

PeriodicHitRatio periodic_reset_hit_ratio(const IntervalStats& stats) {
    PeriodicHitRatio out;
    double num = 0.0, den = 0.0;
    for (const auto& po : stats.objects) {
        if (po.mean_requests == 0.0) {
            if (po.empty_fraction < 1.0)
                throw std::invalid_argument(
                    "periodic_reset_hit_ratio: E = 0 with nonempty windows is inconsistent");
            out.per_object.push_back(0.0);
            continue;  // contributes to neither sum
        }
        if (po.empty_fraction < 0 || po.empty_fraction > 1)
            throw std::invalid_argument("periodic_reset_hit_ratio: p0 outside [0,1]");
        double h = (po.mean_requests - 1.0 + po.empty_fraction) / po.mean_requests;
        out.per_object.push_back(h);
        num += (po.mean_requests - 1.0 + po.empty_fraction) / po.window;
        den += po.mean_requests / po.window;
    }
    out.aggregate = den > 0 ? num / den : 0.0;
    return out;
}

double ttl_adapt(const RateModel& model, TtlTarget target, TtlDiscipline discipline) {
    const std::size_t n = model.lambdas.size();
    if (target.kind == TtlTarget::HIT_RATIO) {
        if (!(target.value >= 0) || target.value >= 1.0)
            throw std::invalid_argument("ttl_adapt: hit-ratio target must be in [0,1)");
        if (target.value == 0.0) return 0.0;
    } else {
        if (discipline != TtlDiscipline::RESET_PER_MISS)
            throw std::invalid_argument(
                "ttl_adapt: occupancy targets support only the reset-per-miss closed form");
        if (!(target.value >= 0) || target.value >= static_cast<double>(n))
            throw std::invalid_argument("ttl_adapt: occupancy target must be in [0, N); supremum is " +
                                        std::to_string(n));
        if (target.value == 0.0) return 0.0;
    }
    auto eval = [&](double dt) {
        if (target.kind == TtlTarget::HIT_RATIO)
            return ttl_hit_aggregate(model, discipline, dt);
        double occ = 0.0;
        for (double l : model.lambdas) occ += ttl_hit_reset_per_miss(l, dt);
        return occ;
    };
    double lo = 0.0, hi = 1.0 / model.total();
    for (int i = 0; i < 400 && eval(hi) < target.value; ++i) hi *= 2.0;
    if (eval(hi) < target.value)
        throw std::invalid_argument("ttl_adapt: target not reachable");
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (eval(mid) < target.value ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

OccupancyEstimate ttl_occupancy(const RateModel& model, TtlDiscipline discipline,
                                double delta_t, std::uint64_t mc_cycles,
                                std::uint64_t seed) {
    OccupancyEstimate out;
    if (delta_t == 0.0) return out;
    if (discipline == TtlDiscipline::RESET_PER_MISS) {
        for (double l : model.lambdas) out.expected += ttl_hit_reset_per_miss(l, delta_t);
        return out;
    }
    // Monte Carlo per object: fraction of time the object is valid.
    std::mt19937_64 rng(seed);
    double var_sum = 0.0;
    for (double l : model.lambdas) {
        if (l <= 0) continue;
        std::exponential_distribution<double> gap(l);
        double valid = 0.0, horizon = 0.0;
        std::vector<double> frac_samples;
        if (discipline == TtlDiscipline::RESET_PER_REQUEST) {
            // cycle: idle gap (fresh arrival), then busy run extended while
            // gaps stay below dt; valid time = run length + dt
            std::uint64_t cycles = 0;
            double cycle_valid = 0.0, cycle_total = 0.0;
            double batch_valid = 0.0, batch_total = 0.0;
            std::uint64_t batch = std::max<std::uint64_t>(1, mc_cycles / 64);
            while (cycles < mc_cycles) {
                double idle = gap(rng);
                double run = 0.0;
                for (double g = gap(rng); g < delta_t; g = gap(rng)) run += g;
                cycle_valid = run + delta_t;
                cycle_total = idle + cycle_valid;
                batch_valid += cycle_valid;
                batch_total += cycle_total;
                ++cycles;
                if (cycles % batch == 0) {
                    frac_samples.push_back(batch_valid / batch_total);
                    valid += batch_valid;
                    horizon += batch_total;
                    batch_valid = batch_total = 0.0;
                }
            }
            if (batch_total > 0) {
                frac_samples.push_back(batch_valid / batch_total);
                valid += batch_valid;
                horizon += batch_total;
            }
        } else {  // PERIODIC: one window per cycle; valid from first arrival
            std::poisson_distribution<long> count(l * delta_t);
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            std::uint64_t batch = std::max<std::uint64_t>(1, mc_cycles / 64);
            double batch_valid = 0.0;
            std::uint64_t done = 0;
            for (std::uint64_t c = 0; c < mc_cycles; ++c) {
                long m = count(rng);
                if (m > 0) {
                    double first = 1.0;
                    for (long j = 0; j < m; ++j) first = std::min(first, uni(rng));
                    batch_valid += (1.0 - first) * delta_t;
                }
                ++done;
                if (done % batch == 0) {
                    frac_samples.push_back(batch_valid / (static_cast<double>(batch) * delta_t));
                    valid += batch_valid;
                    horizon += static_cast<double>(batch) * delta_t;
                    batch_valid = 0.0;
                }
            }
            if (done % batch) {
                double rem = static_cast<double>(done % batch) * delta_t;
                frac_samples.push_back(batch_valid / rem);
                valid += batch_valid;
                horizon += rem;
            }
        }
        double mean = valid / horizon;
        out.expected += mean;
        double v = 0.0;
        for (double f : frac_samples) v += (f - mean) * (f - mean);
        if (frac_samples.size() > 1)
            var_sum += v / static_cast<double>(frac_samples.size() - 1) /
                       static_cast<double>(frac_samples.size());
    }
    out.stderr_ = std::sqrt(var_sum);
    return out;
}

double consistency_discount(double base_hit_ratio, TtlDiscipline discipline, double lambda,
                            double delta_t) {
    if (base_hit_ratio < 0 || base_hit_ratio > 1)
        throw std::invalid_argument("consistency_discount: base hit ratio outside [0,1]");
    return base_hit_ratio * per_object_hit(discipline, lambda, delta_t);
}

TtlSimResult simulate_ttl_hit_ratio(double lambda, double delta_t, TtlDiscipline discipline,
                                    std::uint64_t cycles, std::uint64_t seed,
                                    std::uint64_t max_requests) {
    if (!(lambda > 0) || !(delta_t > 0))
        throw std::invalid_argument("simulate_ttl_hit_ratio: lambda and dt must be > 0");
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(lambda);
    std::uint64_t hits = 0, requests = 0;
    double now = 0.0;
    double expiry = -1.0;  // invalid at start
    std::uint64_t resets = 0;
    constexpr std::size_t kBatches = 64;
    // expected requests per reload cycle, to size batches before running
    double x = lambda * delta_t;
    double per_cycle = 1.0;
    switch (discipline) {
        case TtlDiscipline::RESET_PER_MISS: per_cycle = x + 1.0; break;
        case TtlDiscipline::RESET_PER_REQUEST: per_cycle = std::exp(std::min(x, 30.0)); break;
        case TtlDiscipline::PERIODIC: per_cycle = x / -std::expm1(-x); break;
    }
    double expected = std::min(static_cast<double>(cycles) * per_cycle,
                               static_cast<double>(max_requests));
    std::vector<double> batch_hit_frac;
    std::uint64_t batch_len =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(expected) / kBatches);
    std::uint64_t batch_hits = 0, batch_count = 0;
    while (resets < cycles && requests < max_requests) {
        now += gap(rng);
        ++requests;
        bool valid = now < expiry;
        if (valid) {
            ++hits;
            if (discipline == TtlDiscipline::RESET_PER_REQUEST) expiry = now + delta_t;
        } else {
            ++resets;
            switch (discipline) {
                case TtlDiscipline::RESET_PER_MISS:
                case TtlDiscipline::RESET_PER_REQUEST:
                    expiry = now + delta_t;
                    break;
                case TtlDiscipline::PERIODIC:
                    expiry = (std::floor(now / delta_t) + 1.0) * delta_t;
                    break;
            }
        }
        batch_hits += valid;
        if (++batch_count == batch_len) {
            batch_hit_frac.push_back(static_cast<double>(batch_hits) /
                                     static_cast<double>(batch_count));
            batch_hits = batch_count = 0;
        }
    }
    TtlSimResult out;
    out.requests = requests;
    out.hit_ratio = static_cast<double>(hits) / static_cast<double>(requests);
    if (batch_hit_frac.size() >= 8) {
        double mean = 0.0;
        for (double f : batch_hit_frac) mean += f;
        mean /= static_cast<double>(batch_hit_frac.size());
        double var = 0.0;
        for (double f : batch_hit_frac) var += (f - mean) * (f - mean);
        var /= static_cast<double>(batch_hit_frac.size() - 1);
        out.stderr_ = std::sqrt(var / static_cast<double>(batch_hit_frac.size()));
    } else {
        out.stderr_ = std::sqrt(out.hit_ratio * (1.0 - out.hit_ratio) /
                                static_cast<double>(requests));
    }
    return out;
}

}  // namespace cachekit
