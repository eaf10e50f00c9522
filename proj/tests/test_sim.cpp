#include "doctest.h"

#include <cmath>
#include <random>

#include "cachekit/bounds.hpp"
#include "cachekit/lru_exact.hpp"
#include "cachekit/sim.hpp"
#include "cachekit/ttl.hpp"
#include "cachekit/workload.hpp"

using namespace cachekit;

namespace {

SimOptions no_warmup() {
    SimOptions o;
    o.warmup_fraction = 0.0;
    return o;
}

Trace small_var_trace(std::size_t r, std::uint64_t seed) {
    std::vector<Bytes> sizes{1, 2, 3};
    auto cat = make_catalog({0.2, 0.3, 0.5}, &sizes);
    return generate_irm_trace(cat, r, seed);
}

}  // namespace

TEST_CASE("loop trace: fifo gets zero, random hits between misses") {
    const std::size_t m = 4;
    auto t = loop_trace(m + 1, 200'000);
    auto fifo = simulate(PolicyConfig::fifo(), t, m);
    CHECK(fifo.hits == 0);
    // after a miss the hole lands uniformly on one of the other m objects, so
    // inter-miss gaps are uniform on {1..m} with mean (m+1)/2, giving a hit
    // ratio of (m-1)/(m+1) for uniform random eviction
    auto rnd = simulate(PolicyConfig::random(7), t, m);
    double expect = static_cast<double>(m - 1) / static_cast<double>(m + 1);
    CHECK(rnd.ohr == doctest::Approx(expect).epsilon(0.01));
    // and LRU also gets zero on a loop one object too long
    auto lru = simulate(PolicyConfig::lru(), t, m);
    CHECK(lru.hits == 0);
}

TEST_CASE("simulation matches the exact variable-size LRU hit ratio") {
    auto t = small_var_trace(2'000'000, 42);
    auto rep = simulate(PolicyConfig::lru(), t, 4);
    auto exact = lru_exact_variable_size({0.2, 0.3, 0.5}, {1, 2, 3}, 4);
    CHECK(std::abs(rep.ohr - exact.ohr) < 4.0 * rep.ohr_stderr());
    CHECK(std::abs(rep.bhr - exact.bhr) < 0.005);
}

TEST_CASE("capacity covering the catalog leaves only compulsory misses") {
    auto cat = make_catalog(zipf_pmf(30, 1.0));
    auto t = generate_irm_trace(cat, 20'000, 5);
    for (auto cfg : {PolicyConfig::lru(), PolicyConfig::fifo(), PolicyConfig::cpr(),
                     PolicyConfig::random(3), PolicyConfig::lfu(),
                     PolicyConfig::greedy_dual()}) {
        auto rep = simulate(cfg, t, 30, no_warmup());
        std::vector<char> seen(30, 0);
        std::uint64_t distinct = 0;
        for (const auto& r : t.requests)
            if (!seen[r.object]) {
                seen[r.object] = 1;
                ++distinct;
            }
        CHECK(rep.misses == distinct);
        CHECK(upload_ratio(rep) ==
              doctest::Approx(static_cast<double>(distinct) / 20'000.0));
    }
}

TEST_CASE("capacity zero: every request misses, nothing uploads") {
    auto t = loop_trace(3, 100);
    auto rep = simulate(PolicyConfig::lru(), t, 0, no_warmup());
    CHECK(rep.misses == 100);
    CHECK(rep.uploads == 0);
}

TEST_CASE("warmup accounting and hit series") {
    auto t = loop_trace(2, 1000);
    SimOptions o;
    o.warmup_fraction = 0.1;
    o.hit_series_window = 100;
    auto rep = simulate(PolicyConfig::lru(), t, 2, o);
    CHECK(rep.warmup_excluded == 100);
    CHECK(rep.requests == 900);
    CHECK(rep.hits + rep.misses == rep.requests);
    CHECK(rep.ohr == doctest::Approx(1.0));
    // series covers the whole run including warmup; first window holds the
    // two compulsory misses
    REQUIRE(rep.hit_series.size() == 10);
    CHECK(rep.hit_series[0] == doctest::Approx(0.98));
    CHECK(rep.hit_series[5] == doctest::Approx(1.0));

    SimReport empty;
    CHECK_THROWS_AS(upload_ratio(empty), std::invalid_argument);
}

TEST_CASE("determinism: identical inputs give identical reports") {
    auto cat = make_catalog(zipf_pmf(100, 0.8));
    auto t = generate_irm_trace(cat, 50'000, 21);
    for (auto cfg : {PolicyConfig::random(9), PolicyConfig::cpr(),
                     PolicyConfig::prob_admit(PolicyKind::LRU, {0.7}, 9)}) {
        auto a = simulate(cfg, t, 20);
        auto b = simulate(cfg, t, 20);
        CHECK(a.hits == b.hits);
        CHECK(a.uploads == b.uploads);
    }
}

TEST_CASE("occupancy never exceeds capacity on fuzzed variable-size traces") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> nd(2, 12);
    std::uniform_int_distribution<Bytes> sd(1, 9);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = nd(rng);
        std::vector<Bytes> sizes(n);
        for (auto& s : sizes) s = sd(rng);
        auto cat = make_catalog(zipf_pmf(n, 0.7), &sizes);
        auto t = generate_irm_trace(cat, 3000, rng());
        Bytes cap = 1 + rng() % 20;
        SimOptions o;
        o.validate = true;
        for (auto cfg : {PolicyConfig::lru(), PolicyConfig::fifo(), PolicyConfig::cpr(),
                         PolicyConfig::random(rng()), PolicyConfig::lfu(),
                         PolicyConfig::window_lfu(64), PolicyConfig::sgc(),
                         PolicyConfig::greedy_dual(),
                         PolicyConfig::prob_admit(PolicyKind::LRU, {0.5}, rng())}) {
            auto rep = simulate(cfg, t, cap, o);
            CHECK(rep.hits + rep.misses == rep.requests);
            CHECK(rep.uploads <= rep.misses);
        }
    }
}

TEST_CASE("product-form trio agrees and LRU dominates FIFO under unit-size IRM") {
    auto cat = make_catalog(zipf_pmf(500, 0.9));
    auto t = generate_irm_trace(cat, 1'000'000, 77);
    const Bytes m = 50;
    auto fifo = simulate(PolicyConfig::fifo(), t, m);
    auto rnd = simulate(PolicyConfig::random(5), t, m);
    auto cpr = simulate(PolicyConfig::cpr(), t, m);
    auto lru = simulate(PolicyConfig::lru(), t, m);
    double sigma = fifo.ohr_stderr();
    CHECK(std::abs(fifo.ohr - rnd.ohr) < 4.0 * sigma);
    CHECK(std::abs(fifo.ohr - cpr.ohr) < 4.0 * sigma);
    CHECK(lru.ohr >= fifo.ohr - 4.0 * sigma);

    // every policy stays below the static bound
    auto pmf = cat.pmf();
    auto bound = static_knapsack_bound(pmf, cat.sizes(), cat.values(), m);
    for (const auto& rep : {fifo, rnd, cpr, lru})
        CHECK(rep.ohr <= bound.vhr_bound + 4.0 * sigma);
}

TEST_CASE("score-gated clock suppresses one-timers") {
    // one request to a fresh object while all residents have counts >= 1 and
    // smaller-or-equal size: the strict gate rejects the upload
    std::vector<Bytes> sizes{1, 1, 2};
    auto cat = make_catalog({1.0, 1.0, 1.0}, &sizes);
    Trace t;
    t.catalog = cat;
    for (ObjectId x : {0u, 1u, 0u, 1u, 2u}) t.requests.push_back({x, kNoTime});
    ScoreSpec cs;
    cs.use_value = false;  // score c/s
    auto rep = simulate(PolicyConfig::sgc(cs), t, 2, no_warmup());
    CHECK(rep.uploads == 2);             // only the two compulsory fills
    CHECK(rep.hits == 2);
    CHECK(rep.misses == 3);              // the fresh object was not admitted
}

TEST_CASE("greedy dual uploads on every miss") {
    auto cat = make_catalog(zipf_pmf(50, 0.8));
    auto t = generate_irm_trace(cat, 20'000, 3);
    auto rep = simulate(PolicyConfig::greedy_dual(), t, 10, no_warmup());
    CHECK(rep.uploads == rep.misses);
    CHECK(upload_ratio(rep) == doctest::Approx(1.0 - rep.ohr));
}

TEST_CASE("fifo upload ratio equals its miss ratio") {
    auto cat = make_catalog(zipf_pmf(200, 1.0));
    auto t = generate_irm_trace(cat, 100'000, 13);
    auto rep = simulate(PolicyConfig::fifo(), t, 20);
    CHECK(upload_ratio(rep) == doctest::Approx(1.0 - rep.ohr).epsilon(1e-12));
}

TEST_CASE("sgc upload ratio stays well under its miss ratio on stable rankings") {
    auto cat = make_catalog(zipf_pmf(10'000, 0.8));
    auto t = generate_irm_trace(cat, 400'000, 23);
    ScoreSpec cs;
    cs.use_value = false;
    auto rep = simulate(PolicyConfig::sgc(cs), t, 1000);
    CHECK(rep.uploads < rep.misses);
    CHECK(upload_ratio(rep) < 0.5 * (1.0 - rep.ohr));
}

TEST_CASE("prob admit with q = 1 matches the inner policy stream for stream") {
    auto cat = make_catalog(zipf_pmf(80, 0.9));
    auto t = generate_irm_trace(cat, 60'000, 4);
    for (auto inner : {PolicyKind::LRU, PolicyKind::RANDOM}) {
        auto base = PolicyConfig::of(inner);
        base.seed = 15;
        auto gated = PolicyConfig::prob_admit(inner, {1.0}, 15);
        auto a = simulate(base, t, 16, no_warmup());
        auto b = simulate(gated, t, 16, no_warmup());
        CHECK(a.hits == b.hits);
        CHECK(a.uploads == b.uploads);
    }
}

TEST_CASE("prob admit: lower q slows cache churn") {
    auto cat = make_catalog(zipf_pmf(100, 0.7));
    auto t = generate_irm_trace(cat, 100'000, 6);
    auto full = simulate(PolicyConfig::prob_admit(PolicyKind::LRU, {1.0}, 1), t, 10);
    auto half = simulate(PolicyConfig::prob_admit(PolicyKind::LRU, {0.25}, 1), t, 10);
    CHECK(half.uploads < full.uploads);
}

TEST_CASE("prob admit: size/value admission rule") {
    // q_k = exp(-beta s_k / v_k); beta = 0 degenerates to the inner policy
    std::vector<Bytes> sizes{1, 2, 4};
    auto cat = make_catalog({0.5, 0.3, 0.2}, &sizes);
    auto t = generate_irm_trace(cat, 50'000, 10);
    auto rule = PolicyConfig::prob_admit(PolicyKind::LRU, {}, 9);
    rule.admit_beta = 0.0;
    auto base = PolicyConfig::lru();
    base.seed = 9;
    auto a = simulate(rule, t, 5, no_warmup());
    auto b = simulate(base, t, 5, no_warmup());
    CHECK(a.hits == b.hits);

    rule.admit_beta = 1.0;  // large objects now enter rarely
    auto gated = simulate(rule, t, 5, no_warmup());
    CHECK(gated.uploads < a.uploads);
}

TEST_CASE("multi-level simulation requires matching capacity and unit sizes") {
    auto cfg = PolicyConfig::multi_level({2, 2}, {PolicyKind::FIFO, PolicyKind::FIFO});
    auto t = loop_trace(5, 1000);
    CHECK_THROWS_AS(simulate(cfg, t, 5), std::invalid_argument);
    auto rep = simulate(cfg, t, 4, no_warmup());
    CHECK(rep.requests == 1000);
}

TEST_CASE("ttl invalidation flag: expired residents are misses with uploads") {
    auto cat = make_catalog({1.0});
    Trace t;
    t.catalog = cat;
    for (double at : {0.0, 0.4, 1.5, 1.7, 4.0}) t.requests.push_back({0, at});
    SimOptions o;
    o.warmup_fraction = 0.0;
    o.ttl = TtlFlag{TtlDiscipline::RESET_PER_REQUEST, 1.0};
    auto rep = simulate(PolicyConfig::lru(), t, 1, o);
    // 0.0 miss, 0.4 hit, 1.5 miss (expired at 1.4), 1.7 hit, 4.0 miss
    CHECK(rep.hits == 2);
    CHECK(rep.misses == 3);
    CHECK(rep.uploads == 3);
}

TEST_CASE("ttl-unaware policy stays above the consistency-discount estimate") {
    const std::size_t n = 40;
    auto cat = make_catalog(zipf_pmf(n, 0.8));
    const double rate = static_cast<double>(n);  // per-object rates n * p_k
    auto t = generate_prm_trace(cat, 400'000, rate, 31);
    const double dt = 0.8;
    SimOptions o;
    o.ttl = TtlFlag{TtlDiscipline::RESET_PER_REQUEST, dt};
    const Bytes m = 10;
    auto with_ttl = simulate(PolicyConfig::lfu(), t, m, o);
    auto base = simulate(PolicyConfig::lfu(), t, m);
    auto pmf = cat.pmf();
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        worst += pmf[k] * consistency_discount(1.0, TtlDiscipline::RESET_PER_REQUEST,
                                               rate * pmf[k], dt);
    // worst-case product bound: measured >= base * minimum discount behavior
    double estimate = base.ohr * worst;
    CHECK(with_ttl.ohr >= estimate - 4.0 * with_ttl.ohr_stderr());
}
