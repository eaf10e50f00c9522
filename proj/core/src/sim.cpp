#include "cachekit/sim.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstring>
#include <list>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <stdexcept>

namespace cachekit {

namespace {

struct AccessOutcome {
    bool hit = false;
    bool admitted = false;  // a non-resident object entered the cache (upload)
};

/// Shared per-run object metadata handed to every policy.
struct ObjectTable {
    const std::vector<Bytes>& sizes;
    const std::vector<double>& values;
    std::size_t n() const { return sizes.size(); }
};

class CacheBase {
public:
    CacheBase(Bytes capacity, const ObjectTable& objects)
        : capacity_(capacity), objects_(objects) {}
    virtual ~CacheBase() = default;

    virtual AccessOutcome access(ObjectId x) = 0;
    virtual bool contains(ObjectId x) const = 0;

    virtual Bytes used() const { return used_; }
    Bytes capacity() const { return capacity_; }

protected:
    Bytes size_of(ObjectId x) const { return objects_.sizes[x]; }
    double value_of(ObjectId x) const { return objects_.values[x]; }

    Bytes capacity_;
    Bytes used_ = 0;
    const ObjectTable& objects_;
};

// ---------------------------------------------------------------------------
// Intrusive doubly-linked list over dense object ids. Slot n is the sentinel.
// ---------------------------------------------------------------------------
class IntrusiveList {
public:
    explicit IntrusiveList(std::size_t n) : next_(n + 1), prev_(n + 1), sentinel_(n) {
        next_[sentinel_] = sentinel_;
        prev_[sentinel_] = sentinel_;
    }
    bool empty() const { return next_[sentinel_] == sentinel_; }
    ObjectId front() const { return static_cast<ObjectId>(next_[sentinel_]); }
    ObjectId back() const { return static_cast<ObjectId>(prev_[sentinel_]); }
    ObjectId next(ObjectId x) const { return static_cast<ObjectId>(next_[x]); }
    bool is_sentinel(std::size_t i) const { return i == sentinel_; }

    void push_front(ObjectId x) { insert_before(static_cast<ObjectId>(next_[sentinel_]), x); }
    void push_back(ObjectId x) { insert_before(static_cast<ObjectId>(sentinel_), x); }

    void insert_before(std::size_t pos, ObjectId x) {
        std::size_t p = prev_[pos];
        next_[p] = x;
        prev_[x] = p;
        next_[x] = pos;
        prev_[pos] = x;
    }
    void erase(ObjectId x) {
        next_[prev_[x]] = next_[x];
        prev_[next_[x]] = prev_[x];
    }
    void move_to_front(ObjectId x) {
        erase(x);
        push_front(x);
    }
    /// Successor in circular order, skipping the sentinel.
    ObjectId circular_next(ObjectId x) const {
        std::size_t nx = next_[x];
        if (nx == sentinel_) nx = next_[sentinel_];
        return static_cast<ObjectId>(nx);
    }

private:
    std::vector<std::size_t> next_, prev_;
    std::size_t sentinel_;
};

// ---------------------------------------------------------------------------
// LRU: hit moves to top; miss evicts from the bottom until the object fits.
// ---------------------------------------------------------------------------
class LruCache : public CacheBase {
public:
    LruCache(Bytes capacity, const ObjectTable& objects, bool update_on_hit = true)
        : CacheBase(capacity, objects), list_(objects.n()), resident_(objects.n(), 0),
          update_on_hit_(update_on_hit) {}

    AccessOutcome access(ObjectId x) override {
        if (resident_[x]) {
            if (update_on_hit_) list_.move_to_front(x);
            return {true, false};
        }
        while (used_ + size_of(x) > capacity_) {
            ObjectId victim = list_.back();
            list_.erase(victim);
            resident_[victim] = 0;
            used_ -= size_of(victim);
        }
        list_.push_front(x);
        resident_[x] = 1;
        used_ += size_of(x);
        return {false, true};
    }
    bool contains(ObjectId x) const override { return resident_[x] != 0; }

private:
    IntrusiveList list_;
    std::vector<char> resident_;
    bool update_on_hit_;
};

// ---------------------------------------------------------------------------
// Clock per request: the hand advances one slot on every request; a miss
// evicts the object(s) at the hand until the new object fits and inserts it
// into the freed position.
// ---------------------------------------------------------------------------
class ClockCache : public CacheBase {
public:
    ClockCache(Bytes capacity, const ObjectTable& objects)
        : CacheBase(capacity, objects), ring_(objects.n()), resident_(objects.n(), 0) {}

    AccessOutcome access(ObjectId x) override {
        if (resident_[x]) {
            advance_hand();
            return {true, false};
        }
        if (size_of(x) > capacity_) {  // bypass; the clock still steps
            advance_hand();
            return {false, false};
        }
        evict_until_fit(size_of(x));
        insert_at_hand(x);
        return {false, true};
    }
    bool contains(ObjectId x) const override { return resident_[x] != 0; }

protected:
    void advance_hand() {
        if (!ring_.empty()) hand_ = ring_.circular_next(hand_);
    }
    void evict_until_fit(Bytes need) {
        while (used_ + need > capacity_) {
            ObjectId victim = hand_;
            hand_ = ring_.circular_next(hand_);
            ring_.erase(victim);
            resident_[victim] = 0;
            used_ -= size_of(victim);
        }
    }
    void insert_at_hand(ObjectId x) {
        if (ring_.empty()) {
            ring_.push_front(x);
            hand_ = x;
        } else {
            ring_.insert_before(hand_, x);  // hand keeps pointing past the new object
        }
        resident_[x] = 1;
        used_ += size_of(x);
    }

    IntrusiveList ring_;
    std::vector<char> resident_;
    ObjectId hand_ = 0;
};

// ---------------------------------------------------------------------------
// RANDOM: miss evicts uniformly chosen residents until the object fits.
// ---------------------------------------------------------------------------
class RandomCache : public CacheBase {
public:
    RandomCache(Bytes capacity, const ObjectTable& objects, std::uint64_t seed)
        : CacheBase(capacity, objects), pos_(objects.n(), kAbsent), rng_(seed) {}

    AccessOutcome access(ObjectId x) override {
        if (pos_[x] != kAbsent) return {true, false};
        while (used_ + size_of(x) > capacity_) {
            std::size_t i = std::uniform_int_distribution<std::size_t>(0, residents_.size() - 1)(rng_);
            ObjectId victim = residents_[i];
            residents_[i] = residents_.back();
            pos_[residents_[i]] = i;
            residents_.pop_back();
            pos_[victim] = kAbsent;
            used_ -= size_of(victim);
        }
        pos_[x] = residents_.size();
        residents_.push_back(x);
        used_ += size_of(x);
        return {false, true};
    }
    bool contains(ObjectId x) const override { return pos_[x] != kAbsent; }

private:
    static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
    std::vector<std::size_t> pos_;
    std::vector<ObjectId> residents_;
    std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// LFU / Window-LFU: admission-gated. Candidates are evicted lowest count
// first (ties: older resident first); the new object is admitted only if its
// count strictly exceeds every candidate's.
// ---------------------------------------------------------------------------
class LfuCache : public CacheBase {
public:
    LfuCache(Bytes capacity, const ObjectTable& objects, std::size_t window)
        : CacheBase(capacity, objects), count_(objects.n(), 0), tick_of_(objects.n(), 0),
          resident_(objects.n(), 0), window_(window) {
        if (window_) ring_.reserve(window_);
    }

    AccessOutcome access(ObjectId x) override {
        bump(x);
        if (resident_[x]) return {true, false};
        if (size_of(x) > capacity_) return {false, false};

        // pick eviction candidates (lowest count, older first) until x fits
        Bytes freed = capacity_ - used_;
        auto it = order_.begin();
        std::uint64_t worst = 0;
        std::vector<ObjectId> victims;
        while (freed < size_of(x)) {
            worst = std::get<0>(*it);
            victims.push_back(std::get<2>(*it));
            freed += size_of(std::get<2>(*it));
            ++it;
        }
        if (!victims.empty() && count_[x] <= worst) return {false, false};
        for (ObjectId v : victims) remove_resident(v);
        resident_[x] = 1;
        order_.insert({count_[x], ++tick_, x});
        tick_of_[x] = tick_;
        used_ += size_of(x);
        return {false, true};
    }
    bool contains(ObjectId x) const override { return resident_[x] != 0; }

private:
    void bump(ObjectId x) {
        if (window_) {
            if (ring_.size() == window_) {
                ObjectId old = ring_[head_];
                ring_[head_] = x;
                head_ = (head_ + 1) % window_;
                change_count(old, -1);
            } else {
                ring_.push_back(x);
            }
        }
        change_count(x, +1);
    }
    void change_count(ObjectId x, int delta) {
        if (resident_[x]) order_.erase({count_[x], tick_of_[x], x});
        count_[x] = static_cast<std::uint64_t>(static_cast<std::int64_t>(count_[x]) + delta);
        if (resident_[x]) order_.insert({count_[x], tick_of_[x], x});
    }
    void remove_resident(ObjectId v) {
        order_.erase({count_[v], tick_of_[v], v});
        resident_[v] = 0;
        used_ -= size_of(v);
    }

    std::vector<std::uint64_t> count_, tick_of_;
    std::vector<char> resident_;
    std::set<std::tuple<std::uint64_t, std::uint64_t, ObjectId>> order_;
    std::uint64_t tick_ = 0;
    std::size_t window_ = 0;  // 0 = full history
    std::vector<ObjectId> ring_;
    std::size_t head_ = 0;
};

// ---------------------------------------------------------------------------
// Score-gated clock: CpR mechanics, but a missed object is admitted only if
// its score strictly exceeds the score of every candidate that would have to
// be evicted. Request counts include the current request.
// ---------------------------------------------------------------------------
class ScoreGatedClock : public ClockCache {
public:
    ScoreGatedClock(Bytes capacity, const ObjectTable& objects, ScoreSpec spec)
        : ClockCache(capacity, objects), spec_(spec), count_(objects.n(), 0) {}

    AccessOutcome access(ObjectId x) override {
        ++count_[x];
        if (resident_[x]) {
            advance_hand();
            return {true, false};
        }
        if (size_of(x) > capacity_) {
            advance_hand();
            return {false, false};
        }
        double sx = score(x);
        // probe candidates from the hand without evicting yet
        Bytes freed = capacity_ - used_;
        bool admit = true;
        ObjectId probe = hand_;
        std::size_t n_victims = 0;
        while (freed < size_of(x)) {
            if (score(probe) >= sx) {
                admit = false;
                break;
            }
            freed += size_of(probe);
            ++n_victims;
            probe = ring_.circular_next(probe);
        }
        if (!admit) {
            advance_hand();
            return {false, false};
        }
        for (std::size_t i = 0; i < n_victims; ++i) {
            ObjectId victim = hand_;
            hand_ = ring_.circular_next(hand_);
            ring_.erase(victim);
            resident_[victim] = 0;
            used_ -= size_of(victim);
        }
        insert_at_hand(x);
        return {false, true};
    }

private:
    double score(ObjectId k) const { return spec_.eval(count_[k], value_of(k), size_of(k)); }

    ScoreSpec spec_;
    std::vector<std::uint64_t> count_;
};

// ---------------------------------------------------------------------------
// GreedyDual (GDSF flavor): priority H = L + score, L inflates to the evicted
// priority; every miss admits.
// ---------------------------------------------------------------------------
class GreedyDualCache : public CacheBase {
public:
    GreedyDualCache(Bytes capacity, const ObjectTable& objects, ScoreSpec spec)
        : CacheBase(capacity, objects), spec_(spec), count_(objects.n(), 0),
          handle_(objects.n(), queue_.end()) {}

    AccessOutcome access(ObjectId x) override {
        ++count_[x];
        if (handle_[x] != queue_.end()) {
            queue_.erase(handle_[x]);
            handle_[x] = queue_.emplace(inflation_ + score(x), x);
            return {true, false};
        }
        if (size_of(x) > capacity_) return {false, false};
        while (used_ + size_of(x) > capacity_) {
            auto lowest = queue_.begin();
            inflation_ = lowest->first;
            ObjectId victim = lowest->second;
            handle_[victim] = queue_.end();
            used_ -= size_of(victim);
            queue_.erase(lowest);
        }
        handle_[x] = queue_.emplace(inflation_ + score(x), x);
        used_ += size_of(x);
        return {false, true};
    }
    bool contains(ObjectId x) const override { return handle_[x] != queue_.end(); }

private:
    double score(ObjectId k) const { return spec_.eval(count_[k], value_of(k), size_of(k)); }

    ScoreSpec spec_;
    std::vector<std::uint64_t> count_;
    std::multimap<double, ObjectId> queue_;
    std::vector<std::multimap<double, ObjectId>::iterator> handle_;
    double inflation_ = 0.0;
};

// ---------------------------------------------------------------------------
// Multi-level cache (unit-size objects, level capacities in object counts).
// A hit at level j >= 2 exchanges the object with the eviction candidate of
// level j-1: the promoted object enters level j-1 per that level's insertion
// rule and the demoted candidate takes the promoted object's old slot.
// A miss inserts at the last level, evicting per its kind.
// ---------------------------------------------------------------------------
class MultiLevelCache : public CacheBase {
public:
    MultiLevelCache(Bytes capacity, const ObjectTable& objects,
                    const std::vector<std::size_t>& level_sizes,
                    const std::vector<PolicyKind>& kinds, std::uint64_t seed)
        : CacheBase(capacity, objects), cap_(level_sizes), kind_(kinds),
          slots_(level_sizes.size()), level_of_(objects.n(), kNoLevel),
          slot_of_(objects.n(), 0), hand_(level_sizes.size(), 0),
          tail_(level_sizes.size(), 0), rng_(seed) {
        std::size_t total = 0;
        for (auto s : level_sizes) total += s;
        if (capacity != total)
            throw std::invalid_argument("multi_level: capacity must equal the sum of level sizes");
        for (std::size_t j = 0; j < slots_.size(); ++j) slots_[j].reserve(level_sizes[j]);
    }

    AccessOutcome access(ObjectId x) override {
        if (size_of(x) != 1)
            throw std::invalid_argument("multi_level: unit object sizes required");
        std::size_t j = level_of_[x];
        if (j != kNoLevel) {
            on_hit(x, j);
            return {true, false};
        }
        insert_last_level(x);
        return {false, true};
    }
    bool contains(ObjectId x) const override { return level_of_[x] != kNoLevel; }

private:
    static constexpr std::size_t kNoLevel = static_cast<std::size_t>(-1);

    void on_hit(ObjectId x, std::size_t j) {
        if (j == 0) {
            if (kind_[0] == PolicyKind::CLOCK_PER_REQUEST && slots_[0].size() > 1)
                hand_[0] = (hand_[0] + 1) % slots_[0].size();
            return;  // FIFO and RANDOM are no-ops on a top-level hit
        }
        std::size_t up = j - 1;
        if (slots_[up].size() < cap_[up]) {
            remove_at(j, slot_of_[x]);
            append(up, x);
            return;
        }
        std::size_t ci = candidate_index(up);
        ObjectId c = slots_[up][ci];
        std::size_t xs = slot_of_[x];
        replace_candidate(up, ci, x);
        slots_[j][xs] = c;  // demoted object takes the promoted object's slot
        level_of_[c] = j;
        slot_of_[c] = xs;
    }

    std::size_t candidate_index(std::size_t j) {
        switch (kind_[j]) {
            case PolicyKind::FIFO: return tail_[j];
            case PolicyKind::CLOCK_PER_REQUEST: return hand_[j];
            case PolicyKind::RANDOM:
                return std::uniform_int_distribution<std::size_t>(0, slots_[j].size() - 1)(rng_);
            default: return 0;
        }
    }

    /// Replaces slots_[j][ci] with x and applies the kind's post-insert rule.
    void replace_candidate(std::size_t j, std::size_t ci, ObjectId x) {
        slots_[j][ci] = x;
        level_of_[x] = j;
        slot_of_[x] = ci;
        switch (kind_[j]) {
            case PolicyKind::FIFO:
                // circular slot buffer: the replaced slot is now the newest
                tail_[j] = (ci + 1) % cap_[j];
                break;
            case PolicyKind::CLOCK_PER_REQUEST:
                hand_[j] = (ci + 1) % cap_[j];
                break;
            default:
                break;
        }
    }

    void append(std::size_t j, ObjectId x) {
        slots_[j].push_back(x);
        level_of_[x] = j;
        slot_of_[x] = slots_[j].size() - 1;
        ++used_;
        if (kind_[j] == PolicyKind::FIFO) tail_[j] = 0;  // slot 0 is the oldest while filling
    }

    void remove_at(std::size_t j, std::size_t slot) {
        ObjectId moved = slots_[j].back();
        level_of_[slots_[j][slot]] = kNoLevel;
        slots_[j][slot] = moved;
        slot_of_[moved] = slot;
        slots_[j].pop_back();
        --used_;
    }

    void insert_last_level(ObjectId x) {
        std::size_t j = slots_.size() - 1;
        if (slots_[j].size() < cap_[j]) {
            append(j, x);
            return;
        }
        std::size_t ci = candidate_index(j);
        level_of_[slots_[j][ci]] = kNoLevel;  // evicted from the cache entirely
        replace_candidate(j, ci, x);
    }

    std::vector<std::size_t> cap_;
    std::vector<PolicyKind> kind_;
    std::vector<std::vector<ObjectId>> slots_;
    std::vector<std::size_t> level_of_, slot_of_;
    std::vector<std::size_t> hand_;   // CpR levels
    std::vector<std::size_t> tail_;   // FIFO levels: index of the oldest slot
    std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Probabilistic admission wrapper: each request is handed to the inner policy
// with probability q_k, otherwise the cache stays unchanged (the request is
// still a hit if the object is resident).
// ---------------------------------------------------------------------------
class ProbAdmitCache : public CacheBase {
public:
    ProbAdmitCache(Bytes capacity, const ObjectTable& objects,
                   std::unique_ptr<CacheBase> inner, std::vector<double> q,
                   std::uint64_t seed)
        : CacheBase(capacity, objects), inner_(std::move(inner)), q_(std::move(q)),
          rng_(seed ^ 0x9e3779b97f4a7c15ULL) {}

    AccessOutcome access(ObjectId x) override {
        double q = q_[x];
        if (q < 1.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) >= q)
            return {inner_->contains(x), false};
        return inner_->access(x);
    }
    bool contains(ObjectId x) const override { return inner_->contains(x); }
    Bytes used() const override { return inner_->used(); }

private:
    std::unique_ptr<CacheBase> inner_;
    std::vector<double> q_;
    std::mt19937_64 rng_;
};

std::unique_ptr<CacheBase> make_cache(const PolicyConfig& cfg, Bytes capacity,
                                      const ObjectTable& objects);

std::unique_ptr<CacheBase> make_basic(PolicyKind kind, Bytes capacity,
                                      const ObjectTable& objects, const PolicyConfig& cfg) {
    switch (kind) {
        case PolicyKind::LRU: return std::make_unique<LruCache>(capacity, objects, true);
        case PolicyKind::FIFO: return std::make_unique<LruCache>(capacity, objects, false);
        case PolicyKind::CLOCK_PER_REQUEST: return std::make_unique<ClockCache>(capacity, objects);
        case PolicyKind::RANDOM: return std::make_unique<RandomCache>(capacity, objects, cfg.seed);
        case PolicyKind::LFU: return std::make_unique<LfuCache>(capacity, objects, 0);
        case PolicyKind::WINDOW_LFU:
            return std::make_unique<LfuCache>(capacity, objects, cfg.window);
        case PolicyKind::SCORE_GATED_CLOCK:
            return std::make_unique<ScoreGatedClock>(capacity, objects, cfg.score);
        case PolicyKind::GREEDY_DUAL:
            return std::make_unique<GreedyDualCache>(capacity, objects, cfg.score);
        default:
            throw std::invalid_argument("unsupported basic policy");
    }
}

std::unique_ptr<CacheBase> make_cache(const PolicyConfig& cfg, Bytes capacity,
                                      const ObjectTable& objects) {
    cfg.validate();
    switch (cfg.kind) {
        case PolicyKind::MULTI_LEVEL:
            return std::make_unique<MultiLevelCache>(capacity, objects, cfg.levels,
                                                     cfg.level_kinds, cfg.seed);
        case PolicyKind::PROB_ADMIT: {
            std::vector<double> q;
            if (cfg.admit_prob.size() == objects.n()) {
                q = cfg.admit_prob;
            } else if (cfg.admit_prob.size() == 1) {
                q.assign(objects.n(), cfg.admit_prob[0]);
            } else if (cfg.admit_prob.empty()) {
                q.resize(objects.n());
                for (std::size_t k = 0; k < objects.n(); ++k) {
                    double v = objects.values[k];
                    if (v <= 0) throw std::invalid_argument("prob_admit: beta rule needs values > 0");
                    q[k] = std::exp(-cfg.admit_beta * static_cast<double>(objects.sizes[k]) / v);
                }
            } else {
                throw std::invalid_argument("prob_admit: admit_prob length mismatch");
            }
            auto inner = make_basic(cfg.inner_kind, capacity, objects, cfg);
            return std::make_unique<ProbAdmitCache>(capacity, objects, std::move(inner),
                                                    std::move(q), cfg.seed);
        }
        default:
            return make_basic(cfg.kind, capacity, objects, cfg);
    }
}

}  // namespace

double SimReport::ohr_stderr() const {
    if (requests == 0) return 0.0;
    double h = ohr;
    return std::sqrt(std::max(h * (1.0 - h), 0.0) / static_cast<double>(requests));
}

SimReport simulate(const PolicyConfig& policy, const Trace& trace, Bytes capacity,
                   const SimOptions& options) {
    if (options.warmup_fraction < 0.0 || options.warmup_fraction >= 1.0)
        throw std::invalid_argument("simulate: warmup_fraction must be in [0,1)");
    const auto sizes = trace.catalog.sizes();
    const auto values = trace.catalog.values();
    ObjectTable objects{sizes, values};
    auto cache = make_cache(policy, capacity, objects);

    const std::size_t total = trace.requests.size();
    const std::size_t warmup = static_cast<std::size_t>(
        std::floor(options.warmup_fraction * static_cast<double>(total)));

    SimReport rep;
    rep.warmup_excluded = warmup;
    rep.hit_series_window = options.hit_series_window;
    double bytes_total = 0.0, bytes_hit = 0.0;
    double value_total = 0.0, value_hit = 0.0;
    std::uint64_t window_hits = 0, window_count = 0;

    const bool use_ttl = options.ttl.has_value();
    std::vector<double> expiry;
    TtlDiscipline disc = TtlDiscipline::RESET_PER_REQUEST;
    double dt = 0.0;
    if (use_ttl) {
        disc = options.ttl->discipline;
        dt = options.ttl->delta_t;
        if (!(dt > 0)) throw std::invalid_argument("simulate: ttl delta_t must be > 0");
        expiry.assign(trace.catalog.size(), 0.0);
    }
    auto next_expiry = [&](double now) {
        if (disc == TtlDiscipline::PERIODIC)
            return (std::floor(now / dt) + 1.0) * dt;
        return now + dt;
    };

    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < total; ++i) {
        const ObjectId x = trace.requests[i].object;
        bool hit, upload;
        if (sizes[x] > capacity) {
            hit = false;
            upload = false;  // bypass: too large to ever cache
        } else if (use_ttl) {
            double now = trace.requests[i].time;
            if (std::isnan(now))
                throw std::invalid_argument("simulate: TTL mode requires timestamps");
            if (cache->contains(x) && now >= expiry[x]) {
                // stale resident: re-fetch in place
                AccessOutcome out = cache->access(x);
                (void)out;
                expiry[x] = next_expiry(now);
                hit = false;
                upload = true;
            } else {
                AccessOutcome out = cache->access(x);
                hit = out.hit;
                upload = out.admitted;
                if (out.admitted || (hit && disc == TtlDiscipline::RESET_PER_REQUEST))
                    expiry[x] = next_expiry(now);
            }
        } else {
            AccessOutcome out = cache->access(x);
            hit = out.hit;
            upload = out.admitted;
        }

        if (options.validate && cache->used() > capacity)
            throw std::logic_error("simulate: occupancy exceeded capacity");

        if (i >= warmup) {
            ++rep.requests;
            rep.hits += hit;
            rep.misses += !hit;
            rep.uploads += upload;
            bytes_total += static_cast<double>(sizes[x]);
            value_total += values[x];
            if (hit) {
                bytes_hit += static_cast<double>(sizes[x]);
                value_hit += values[x];
            }
        }
        if (options.hit_series_window) {
            window_hits += hit;
            if (++window_count == options.hit_series_window) {
                rep.hit_series.push_back(static_cast<double>(window_hits) /
                                         static_cast<double>(window_count));
                window_hits = window_count = 0;
            }
        }
    }
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    rep.throughput = secs > 0 ? static_cast<double>(total) / secs : 0.0;
    if (rep.requests) {
        rep.ohr = static_cast<double>(rep.hits) / static_cast<double>(rep.requests);
        if (bytes_total > 0) rep.bhr = bytes_hit / bytes_total;
        if (value_total > 0) rep.vhr = value_hit / value_total;
    }
    return rep;
}

double upload_ratio(const SimReport& report) {
    if (report.requests == 0)
        throw std::invalid_argument("upload_ratio: report has no counted requests");
    return static_cast<double>(report.uploads) / static_cast<double>(report.requests);
}

// ---------------------------------------------------------------------------
// One-pass HRC computation for stack policies.
// ---------------------------------------------------------------------------

namespace {

template <typename Int>
class Fenwick {
public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
    void add(std::size_t i, Int delta) {
        for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
    }
    Int prefix(std::size_t i) const {  // sum of [0, i)
        Int s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }
    Int range(std::size_t lo, std::size_t hi) const {  // [lo, hi)
        return hi <= lo ? 0 : prefix(hi) - prefix(lo);
    }

private:
    std::vector<Int> tree_;
};

struct SweepAccum {
    std::vector<std::uint64_t> hits;
    std::vector<double> bytes_hit, value_hit;
    explicit SweepAccum(std::size_t n) : hits(n, 0), bytes_hit(n, 0.0), value_hit(n, 0.0) {}
};

}  // namespace

std::vector<SimReport> hrc_sweep_stack(PolicyKind policy, const Trace& trace,
                                       const std::vector<Bytes>& capacities,
                                       double warmup_fraction) {
    if (policy != PolicyKind::LRU && policy != PolicyKind::LFU)
        throw std::invalid_argument("hrc_sweep_stack: unsupported policy (stack policies: lru, lfu)");
    if (capacities.empty()) throw std::invalid_argument("hrc_sweep_stack: no capacities");
    if (!std::is_sorted(capacities.begin(), capacities.end()))
        throw std::invalid_argument("hrc_sweep_stack: capacities must be sorted ascending");

    const auto sizes = trace.catalog.sizes();
    const auto values = trace.catalog.values();
    const std::size_t R = trace.requests.size();
    const std::size_t warmup = static_cast<std::size_t>(
        std::floor(warmup_fraction * static_cast<double>(R)));
    const std::size_t C = capacities.size();
    SweepAccum acc(C);
    std::uint64_t counted = 0;
    std::uint64_t compulsory = 0;  // cold misses, kept for diagnostics
    double bytes_total = 0.0, value_total = 0.0;

    // depth -> index of the first capacity that fits it; table lookup when the
    // largest capacity is small enough, binary search otherwise
    std::vector<std::uint32_t> bucket_lut;
    if (capacities.back() <= (Bytes{1} << 16)) {
        bucket_lut.assign(static_cast<std::size_t>(capacities.back()) + 1, 0);
        std::size_t j = 0;
        for (std::size_t d = 0; d < bucket_lut.size(); ++d) {
            while (capacities[j] < d) ++j;
            bucket_lut[d] = static_cast<std::uint32_t>(j);
        }
    }
    auto bucket_of = [&](Bytes depth) -> std::ptrdiff_t {
        if (!bucket_lut.empty()) {
            if (depth >= bucket_lut.size()) return -1;
            return bucket_lut[static_cast<std::size_t>(depth)];
        }
        auto it = std::lower_bound(capacities.begin(), capacities.end(), depth);
        if (it == capacities.end()) return -1;
        return it - capacities.begin();
    };
    auto credit = [&](Bytes depth, ObjectId x) {
        auto j = bucket_of(depth);
        if (j < 0) return;
        acc.hits[static_cast<std::size_t>(j)] += 1;
        acc.bytes_hit[static_cast<std::size_t>(j)] += static_cast<double>(sizes[x]);
        acc.value_hit[static_cast<std::size_t>(j)] += values[x];
    };

    if (policy == PolicyKind::LRU) {
        // marks live at recency positions in a compressed Fenwick sized to the
        // catalog, rebuilt when the position clock outruns it; unit-size
        // traces use a 32-bit count tree to stay cache-resident
        auto run_lru = [&]<typename Int>(Int /*tag*/) {
            const std::size_t n_obj = trace.catalog.size();
            const std::size_t cap = std::max<std::size_t>(4 * n_obj, 1024);
            Fenwick<Int> bit(cap);
            std::vector<std::int64_t> last(n_obj, -1);
            std::vector<ObjectId> owner(cap, 0);  // x + 1; 0 marks a free slot
            std::size_t clock = 0;
            Int active_bytes = 0;
            auto rebuild = [&] {
                std::size_t k = 0;
                for (std::size_t p = 0; p < cap; ++p) {
                    if (!owner[p]) continue;
                    owner[k] = owner[p];
                    if (p != k) owner[p] = 0;
                    last[owner[k] - 1] = static_cast<std::int64_t>(k);
                    ++k;
                }
                bit = Fenwick<Int>(cap);
                for (std::size_t p = 0; p < k; ++p)
                    bit.add(p, static_cast<Int>(sizes[owner[p] - 1]));
                clock = k;
            };
            for (std::size_t i = 0; i < R; ++i) {
                ObjectId x = trace.requests[i].object;
                bool count_it = i >= warmup;
                if (count_it) {
                    ++counted;
                    bytes_total += static_cast<double>(sizes[x]);
                    value_total += values[x];
                }
                const Int sx = static_cast<Int>(sizes[x]);
                if (last[x] >= 0) {
                    auto pos = static_cast<std::size_t>(last[x]);
                    if (count_it) {
                        Bytes depth =
                            static_cast<Bytes>(active_bytes - bit.prefix(pos + 1)) + sizes[x];
                        credit(depth, x);
                    }
                    bit.add(pos, -sx);
                    owner[pos] = 0;
                    active_bytes -= sx;
                } else if (count_it) {
                    ++compulsory;
                }
                if (clock == cap) rebuild();
                bit.add(clock, sx);
                owner[clock] = x + 1;
                active_bytes += sx;
                last[x] = static_cast<std::int64_t>(clock);
                ++clock;
            }
        };
        // unit-size traces: marks become a bitmap with per-word popcounts,
        // which keeps the whole structure within a couple of cache levels
        auto run_lru_unit = [&] {
            const std::size_t n_obj = trace.catalog.size();
            const std::size_t cap = (std::max<std::size_t>(4 * n_obj, 1024) + 63) & ~63ull;
            const std::size_t n_words = cap / 64;
            std::vector<std::uint64_t> words(n_words, 0);
            Fenwick<std::int32_t> word_count(n_words);
            std::vector<std::int32_t> last(n_obj, -1);
            std::size_t clock = 0;
            std::int64_t active = 0;
            auto prefix_marks = [&](std::size_t pos) {  // marks in [0, pos)
                std::size_t w = pos >> 6, b = pos & 63;
                std::int64_t c = word_count.prefix(w);
                if (b) c += std::popcount(words[w] & ((1ull << b) - 1));
                return c;
            };
            auto rebuild = [&] {
                // reconstruct position -> object from last[] and renumber
                std::vector<ObjectId> at(cap, 0);
                for (std::size_t x = 0; x < n_obj; ++x)
                    if (last[x] >= 0) at[static_cast<std::size_t>(last[x])] = static_cast<ObjectId>(x) + 1;
                std::size_t k = 0;
                std::fill(words.begin(), words.end(), 0);
                for (std::size_t p = 0; p < cap; ++p) {
                    if (!at[p]) continue;
                    last[at[p] - 1] = static_cast<std::int32_t>(k);
                    words[k >> 6] |= 1ull << (k & 63);
                    ++k;
                }
                word_count = Fenwick<std::int32_t>(n_words);
                for (std::size_t w = 0; w < n_words; ++w)
                    if (words[w]) word_count.add(w, std::popcount(words[w]));
                clock = k;
            };
            bool unit_values = true;
            for (double v : values)
                if (v != 1.0) unit_values = false;
            for (std::size_t i = 0; i < R; ++i) {
                ObjectId x = trace.requests[i].object;
                bool count_it = i >= warmup;
                if (count_it) {
                    ++counted;
                    if (!unit_values) value_total += values[x];
                }
                if (last[x] >= 0) {
                    auto pos = static_cast<std::size_t>(last[x]);
                    if (count_it) {
                        Bytes depth = static_cast<Bytes>(active - prefix_marks(pos + 1)) + 1;
                        auto j = bucket_of(depth);
                        if (j >= 0) {
                            acc.hits[static_cast<std::size_t>(j)] += 1;
                            if (!unit_values)
                                acc.value_hit[static_cast<std::size_t>(j)] += values[x];
                        }
                    }
                    words[pos >> 6] &= ~(1ull << (pos & 63));
                    word_count.add(pos >> 6, -1);
                    last[x] = -1;  // keep rebuilds from resurrecting the old mark
                    --active;
                } else if (count_it) {
                    ++compulsory;
                }
                if (clock == cap) rebuild();
                words[clock >> 6] |= 1ull << (clock & 63);
                word_count.add(clock >> 6, 1);
                ++active;
                last[x] = static_cast<std::int32_t>(clock);
                ++clock;
            }
            // unit sizes: bytes mirror objects; unit values mirror them too
            bytes_total = static_cast<double>(counted);
            if (unit_values) value_total = static_cast<double>(counted);
            for (std::size_t j = 0; j < C; ++j) {
                acc.bytes_hit[j] = static_cast<double>(acc.hits[j]);
                if (unit_values) acc.value_hit[j] = static_cast<double>(acc.hits[j]);
            }
        };
        bool unit_sizes = true;
        for (Bytes s : sizes)
            if (s != 1) unit_sizes = false;
        if (unit_sizes)
            run_lru_unit();
        else if (trace.catalog.total_bytes() < (Bytes{1} << 31))
            run_lru(std::int32_t{});
        else
            run_lru(std::int64_t{});
    } else {
        // LFU frequency stack: ordered by (count desc, recency within count),
        // byte totals per count tracked in a Fenwick indexed by count value.
        const std::size_t N = trace.catalog.size();
        Fenwick<std::int64_t> by_count(R + 2);
        std::vector<std::uint64_t> count(N, 0);
        std::vector<std::list<ObjectId>> bucket_storage;
        std::unordered_map<std::uint64_t, std::size_t> bucket_of_count;
        std::vector<std::list<ObjectId>::iterator> pos(N);
        auto bucket_for = [&](std::uint64_t c) -> std::list<ObjectId>& {
            auto [it, inserted] = bucket_of_count.try_emplace(c, bucket_storage.size());
            if (inserted) bucket_storage.emplace_back();
            return bucket_storage[it->second];
        };
        for (std::size_t i = 0; i < R; ++i) {
            ObjectId x = trace.requests[i].object;
            bool count_it = i >= warmup;
            if (count_it) {
                ++counted;
                bytes_total += static_cast<double>(sizes[x]);
                value_total += values[x];
            }
            std::uint64_t c = count[x];
            if (c > 0) {
                auto& b = bucket_for(c);
                Bytes within = 0;
                for (auto it = b.begin(); *it != x; ++it) within += sizes[*it];
                Bytes above = static_cast<Bytes>(
                    by_count.range(c + 1, R + 2));
                Bytes depth = above + within + sizes[x];
                if (count_it) credit(depth, x);
                b.erase(pos[x]);
                by_count.add(c, -static_cast<std::int64_t>(sizes[x]));
            } else if (count_it) {
                ++compulsory;
            }
            count[x] = c + 1;
            auto& nb = bucket_for(c + 1);
            nb.push_front(x);
            pos[x] = nb.begin();
            by_count.add(c + 1, static_cast<std::int64_t>(sizes[x]));
        }
    }
    (void)compulsory;

    std::vector<SimReport> out(C);
    // suffix accumulation: a hit at depth d counts for every capacity >= d
    std::uint64_t h = 0;
    double bh = 0.0, vh = 0.0;
    for (std::size_t j = 0; j < C; ++j) {
        h += acc.hits[j];
        bh += acc.bytes_hit[j];
        vh += acc.value_hit[j];
        SimReport& r = out[j];
        r.requests = counted;
        r.hits = h;
        r.misses = counted - h;
        r.uploads = r.misses;  // stack model: every miss inserts
        r.warmup_excluded = warmup;
        if (counted) {
            r.ohr = static_cast<double>(h) / static_cast<double>(counted);
            if (bytes_total > 0) r.bhr = bh / bytes_total;
            if (value_total > 0) r.vhr = vh / value_total;
        }
    }
    return out;
}

}  // namespace cachekit
