#include "cachekit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace cachekit {

namespace {

struct ScoredObject {
    std::size_t index;
    double score;
};

/// Greedy fill for one pmf snapshot; returns the numerator of the bound
/// (sum of p v over the whole prefix plus the fractional term).
double greedy_fill_value(const std::vector<ScoredObject>& order,
                         const std::vector<double>& pmf, const std::vector<Bytes>& sizes,
                         const std::vector<double>& values, Bytes m_bytes,
                         std::size_t* prefix_out, double* fraction_out) {
    Bytes used = 0;
    double value = 0.0;
    std::size_t prefix = 0;
    double fraction = 0.0;
    for (const auto& so : order) {
        const std::size_t k = so.index;
        if (sizes[k] > m_bytes) continue;
        if (used + sizes[k] <= m_bytes) {
            used += sizes[k];
            value += pmf[k] * values[k];
            ++prefix;
        } else {
            fraction = static_cast<double>(m_bytes - used) / static_cast<double>(sizes[k]);
            value += fraction * pmf[k] * values[k];
            break;
        }
    }
    if (prefix_out) *prefix_out = prefix;
    if (fraction_out) *fraction_out = fraction;
    return value;
}

std::vector<ScoredObject> score_order(const std::vector<double>& pmf,
                                      const std::vector<Bytes>& sizes,
                                      const std::vector<double>& values) {
    std::vector<ScoredObject> order(pmf.size());
    for (std::size_t k = 0; k < pmf.size(); ++k)
        order[k] = {k, pmf[k] * values[k] / static_cast<double>(sizes[k])};
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.index < b.index;
    });
    return order;
}

}  // namespace

StaticBound static_knapsack_bound(const std::vector<double>& pmf,
                                  const std::vector<Bytes>& sizes,
                                  const std::vector<double>& values, Bytes m_bytes) {
    if (pmf.empty()) throw std::invalid_argument("static_knapsack_bound: empty catalog");
    if (sizes.size() != pmf.size() || values.size() != pmf.size())
        throw std::invalid_argument("static_knapsack_bound: length mismatch");
    double norm = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) norm += pmf[k] * values[k];
    if (!(norm > 0)) throw std::invalid_argument("static_knapsack_bound: zero total value");
    auto order = score_order(pmf, sizes, values);
    StaticBound out;
    double value = greedy_fill_value(order, pmf, sizes, values, m_bytes, &out.prefix,
                                     &out.fraction);
    out.vhr_bound = value / norm;
    return out;
}

DynamicBound dynamic_popularity_bound(const ChurnLog& log, std::size_t n_requests,
                                      const std::vector<Bytes>& sizes,
                                      const std::vector<double>& values, Bytes m_bytes) {
    if (sizes.size() != values.size())
        throw std::invalid_argument("dynamic_popularity_bound: length mismatch");
    const std::size_t n = sizes.size();
    if (log.initial_pmf.size() > n)
        throw std::invalid_argument("dynamic_popularity_bound: catalog smaller than log");

    DynamicBound out;
    out.per_request.assign(n_requests, 0.0);
    double numerator = 0.0, denominator = 0.0;

    // Between events the pmf is static up to its catalog entries, so the
    // greedy fill is computed once per segment. Object probabilities carry the
    // factor (1 - p_new) relative to the unconditional request distribution.
    // A new-object event at index i changes the pmf of requests after i, so a
    // segment covers (prev event, this event].
    std::vector<double> pmf = log.pmf_at(0, n);
    const double scale = 1.0 - log.p_new;
    std::size_t seg_start = 0;
    std::size_t ev = 0;
    while (seg_start < n_requests) {
        std::size_t seg_end = n_requests;
        if (ev < log.events.size())
            seg_end = std::min(seg_end, log.events[ev].request_index + 1);
        std::vector<double> scaled(n);
        for (std::size_t k = 0; k < n; ++k) scaled[k] = pmf[k] * scale;
        auto order = score_order(scaled, sizes, values);
        double fill =
            greedy_fill_value(order, scaled, sizes, values, m_bytes, nullptr, nullptr);
        double denom_one = 0.0;
        for (std::size_t k = 0; k < n; ++k) denom_one += scaled[k] * values[k];
        double num_one = scale * fill;
        double len = static_cast<double>(seg_end - seg_start);
        numerator += num_one * len;
        denominator += denom_one * len;
        double per = denom_one > 0 ? num_one / denom_one : 0.0;
        std::fill(out.per_request.begin() + static_cast<std::ptrdiff_t>(seg_start),
                  out.per_request.begin() + static_cast<std::ptrdiff_t>(seg_end), per);
        if (ev < log.events.size() && log.events[ev].request_index + 1 == seg_end) {
            const auto& e = log.events[ev];
            double keep = 1.0 - e.p_init;
            for (auto& p : pmf) p *= keep;
            pmf[e.object] = e.p_init;
            ++ev;
        }
        seg_start = seg_end;
    }
    out.vhr_bound = denominator > 0 ? numerator / denominator : 0.0;
    return out;
}

BeladyResult belady(const Trace& trace, std::size_t m_objects) {
    for (const auto& e : trace.catalog.entries())
        if (e.size != 1)
            throw std::invalid_argument("belady: unit object sizes required; use knapsack_2d_bounds");
    const std::size_t r = trace.requests.size();
    constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> next_use(r, kNever);
    std::vector<std::size_t> last(trace.catalog.size(), kNever);
    for (std::size_t i = r; i-- > 0;) {
        ObjectId x = trace.requests[i].object;
        next_use[i] = last[x];
        last[x] = i;
    }
    // resident set with next-use keys; max lookup by linear scan is fine at
    // the M values this oracle is used with
    std::vector<ObjectId> members;
    std::vector<std::size_t> member_next;
    std::vector<std::int64_t> slot(trace.catalog.size(), -1);
    BeladyResult out;
    for (std::size_t i = 0; i < r; ++i) {
        ObjectId x = trace.requests[i].object;
        if (slot[x] >= 0) {
            ++out.hits;
            member_next[static_cast<std::size_t>(slot[x])] = next_use[i];
            continue;
        }
        if (members.size() < m_objects) {
            slot[x] = static_cast<std::int64_t>(members.size());
            members.push_back(x);
            member_next.push_back(next_use[i]);
            continue;
        }
        std::size_t worst = 0;
        for (std::size_t j = 1; j < members.size(); ++j)
            if (member_next[j] > member_next[worst]) worst = j;
        if (next_use[i] < member_next[worst]) {
            slot[members[worst]] = -1;
            members[worst] = x;
            member_next[worst] = next_use[i];
            slot[x] = static_cast<std::int64_t>(worst);
        }
    }
    out.hit_ratio = r ? static_cast<double>(out.hits) / static_cast<double>(r) : 0.0;
    return out;
}

std::vector<RequestInterval> extract_intervals(const Trace& trace) {
    std::vector<RequestInterval> out;
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> last(trace.catalog.size(), kNone);
    for (std::size_t i = 0; i < trace.requests.size(); ++i) {
        ObjectId x = trace.requests[i].object;
        if (last[x] != kNone) {
            RequestInterval iv;
            iv.object = x;
            iv.start = last[x];
            iv.end = i;
            iv.size = trace.catalog[x].size;
            iv.value = trace.catalog[x].value;
            out.push_back(iv);
        }
        last[x] = i;
    }
    return out;
}

std::vector<double> ttl_interval_values(const Trace& trace,
                                        const std::vector<RequestInterval>& intervals,
                                        const std::vector<double>& ttl_seconds) {
    if (ttl_seconds.size() != trace.catalog.size())
        throw std::invalid_argument("ttl_interval_values: ttl length mismatch");
    std::vector<double> out(intervals.size());
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        double ttl = ttl_seconds[iv.object];
        out[i] = iv.value;
        if (std::isnan(ttl)) continue;
        const auto& a = trace.requests[iv.start];
        const auto& b = trace.requests[iv.end];
        if (!a.has_time() || !b.has_time())
            throw std::invalid_argument("ttl_interval_values: timestamps required");
        if (b.time - a.time > ttl) out[i] = 0.0;
    }
    return out;
}

namespace {

/// Segment tree over the request timeline with range add and subtree min/max,
/// used for whole-interval feasibility checks and for fractional filling.
class OccupancyProfile {
public:
    OccupancyProfile(std::size_t n, double capacity) : n_(n), capacity_(capacity) {
        std::size_t sz = 1;
        while (sz < std::max<std::size_t>(n, 1)) sz <<= 1;
        size_ = sz;
        minv_.assign(2 * sz, 0.0);
        maxv_.assign(2 * sz, 0.0);
        lazy_.assign(2 * sz, 0.0);
    }

    double range_max(std::size_t lo, std::size_t hi) { return query_max(1, 0, size_, lo, hi); }

    void range_add(std::size_t lo, std::size_t hi, double delta) {
        add(1, 0, size_, lo, hi, delta);
    }

    /// Adds min(amount, capacity - used[t]) to every slot in [lo, hi);
    /// returns the total claimed mass.
    double fractional_fill(std::size_t lo, std::size_t hi, double amount) {
        return fill(1, 0, size_, lo, hi, amount);
    }

    double at(std::size_t i) { return query_max(1, 0, size_, i, i + 1); }

private:
    void push(std::size_t node) {
        if (lazy_[node] != 0.0) {
            for (std::size_t c : {2 * node, 2 * node + 1}) {
                lazy_[c] += lazy_[node];
                minv_[c] += lazy_[node];
                maxv_[c] += lazy_[node];
            }
            lazy_[node] = 0.0;
        }
    }
    void pull(std::size_t node) {
        minv_[node] = std::min(minv_[2 * node], minv_[2 * node + 1]);
        maxv_[node] = std::max(maxv_[2 * node], maxv_[2 * node + 1]);
    }
    double query_max(std::size_t node, std::size_t l, std::size_t r, std::size_t lo,
                     std::size_t hi) {
        if (hi <= l || r <= lo) return -std::numeric_limits<double>::infinity();
        if (lo <= l && r <= hi) return maxv_[node];
        push(node);
        std::size_t mid = (l + r) / 2;
        return std::max(query_max(2 * node, l, mid, lo, hi),
                        query_max(2 * node + 1, mid, r, lo, hi));
    }
    void add(std::size_t node, std::size_t l, std::size_t r, std::size_t lo, std::size_t hi,
             double delta) {
        if (hi <= l || r <= lo) return;
        if (lo <= l && r <= hi) {
            lazy_[node] += delta;
            minv_[node] += delta;
            maxv_[node] += delta;
            return;
        }
        push(node);
        std::size_t mid = (l + r) / 2;
        add(2 * node, l, mid, lo, hi, delta);
        add(2 * node + 1, mid, r, lo, hi, delta);
        pull(node);
    }
    double fill(std::size_t node, std::size_t l, std::size_t r, std::size_t lo,
                std::size_t hi, double amount) {
        if (hi <= l || r <= lo) return 0.0;
        if (lo <= l && r <= hi) {
            if (minv_[node] >= capacity_) return 0.0;
            if (maxv_[node] + amount <= capacity_) {
                lazy_[node] += amount;
                minv_[node] += amount;
                maxv_[node] += amount;
                return amount * static_cast<double>(r - l);
            }
            if (r - l == 1) {
                double claim = std::min(amount, capacity_ - maxv_[node]);
                minv_[node] += claim;
                maxv_[node] += claim;
                return claim;
            }
        }
        push(node);
        std::size_t mid = (l + r) / 2;
        double got = fill(2 * node, l, mid, lo, hi, amount) +
                     fill(2 * node + 1, mid, r, lo, hi, amount);
        pull(node);
        return got;
    }

    std::size_t n_ = 0, size_ = 1;
    double capacity_;
    std::vector<double> minv_, maxv_, lazy_;
};

std::vector<std::size_t> greedy_order(const std::vector<RequestInterval>& ivs,
                                      const std::vector<double>* values) {
    std::vector<std::size_t> order(ivs.size());
    std::iota(order.begin(), order.end(), 0);
    auto value_of = [&](std::size_t i) { return values ? (*values)[i] : ivs[i].value; };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double sa = value_of(a) / ivs[a].footprint();
        double sb = value_of(b) / ivs[b].footprint();
        if (sa != sb) return sa > sb;
        if (ivs[a].length() != ivs[b].length()) return ivs[a].length() < ivs[b].length();
        if (ivs[a].start != ivs[b].start) return ivs[a].start < ivs[b].start;
        return ivs[a].object < ivs[b].object;
    });
    return order;
}

}  // namespace

BoundReport knapsack_2d_bounds(const Trace& trace, Bytes m_bytes,
                               const std::vector<double>* interval_values) {
    auto ivs = extract_intervals(trace);
    if (interval_values && interval_values->size() != ivs.size())
        throw std::invalid_argument("knapsack_2d_bounds: interval value length mismatch");
    auto order = greedy_order(ivs, interval_values);
    auto value_of = [&](std::size_t i) {
        return interval_values ? (*interval_values)[i] : ivs[i].value;
    };

    BoundReport out;
    for (std::size_t i = 0; i < ivs.size(); ++i) out.v_total += value_of(i);

    const std::size_t r = trace.requests.size();
    const double cap = static_cast<double>(m_bytes);
    OccupancyProfile lower(r, cap);
    OccupancyProfile upper(r, cap);
    for (std::size_t i : order) {
        const auto& iv = ivs[i];
        const double s = static_cast<double>(iv.size);
        const double v = value_of(i);
        if (iv.size > m_bytes || v <= 0.0) continue;  // oversized or worthless
        if (lower.range_max(iv.start, iv.end) + s <= cap) {
            lower.range_add(iv.start, iv.end, s);
            out.v_lower += v;
            out.placements.push_back(i);
        }
        double claimed = upper.fractional_fill(iv.start, iv.end, s);
        if (claimed > 0.0) out.v_upper += v * claimed / iv.footprint();
    }
    if (out.v_total > 0) {
        out.vhr_lower = out.v_lower / out.v_total;
        out.vhr_upper = out.v_upper / out.v_total;
    }
    return out;
}

double exhaustive_offline_optimum(const Trace& trace, Bytes m_bytes,
                                  const std::vector<double>* interval_values,
                                  const ExhaustiveOptions& options) {
    if (trace.requests.size() > options.max_requests)
        throw ResourceLimitError("exhaustive_offline_optimum: trace too long");
    if (trace.catalog.size() > options.max_objects)
        throw ResourceLimitError("exhaustive_offline_optimum: too many objects");
    auto ivs = extract_intervals(trace);
    if (interval_values && interval_values->size() != ivs.size())
        throw std::invalid_argument("exhaustive_offline_optimum: value length mismatch");
    auto order = greedy_order(ivs, interval_values);

    struct Item {
        std::size_t start, end;
        double size, value;
    };
    std::vector<Item> items;
    for (std::size_t i : order) {
        double v = interval_values ? (*interval_values)[i] : ivs[i].value;
        if (ivs[i].size > m_bytes || v <= 0.0) continue;
        items.push_back({ivs[i].start, ivs[i].end, static_cast<double>(ivs[i].size), v});
    }
    std::vector<double> suffix(items.size() + 1, 0.0);
    for (std::size_t i = items.size(); i-- > 0;) suffix[i] = suffix[i + 1] + items[i].value;

    std::vector<double> used(trace.requests.size(), 0.0);
    const double cap = static_cast<double>(m_bytes);
    double best = 0.0;
    // depth-first over keep/drop per interval with a value-sum bound
    std::function<void(std::size_t, double)> dfs = [&](std::size_t i, double cur) {
        if (cur + suffix[i] <= best + 1e-12) return;
        if (i == items.size()) {
            best = std::max(best, cur);
            return;
        }
        const auto& it = items[i];
        bool fits = true;
        for (std::size_t t = it.start; t < it.end; ++t) {
            if (used[t] + it.size > cap + 1e-9) {
                fits = false;
                break;
            }
        }
        if (fits) {
            for (std::size_t t = it.start; t < it.end; ++t) used[t] += it.size;
            dfs(i + 1, cur + it.value);
            for (std::size_t t = it.start; t < it.end; ++t) used[t] -= it.size;
        }
        dfs(i + 1, cur);
    };
    dfs(0, 0.0);
    return best;
}

Trace trim_trace(const Trace& trace, double head_fraction, double tail_fraction) {
    if (head_fraction < 0 || tail_fraction < 0 || head_fraction + tail_fraction >= 1.0)
        throw std::invalid_argument("trim_trace: fractions must be >= 0 and sum below 1");
    const std::size_t r = trace.requests.size();
    auto head = static_cast<std::size_t>(std::floor(head_fraction * static_cast<double>(r)));
    auto tail = static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(r)));
    Trace out;
    out.catalog = trace.catalog;
    out.requests.assign(trace.requests.begin() + static_cast<std::ptrdiff_t>(head),
                        trace.requests.end() - static_cast<std::ptrdiff_t>(tail));
    return out;
}

}  // namespace cachekit
