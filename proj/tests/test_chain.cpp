#include "doctest.h"

#include <random>

#include "cachekit/chain.hpp"
#include "cachekit/lru_exact.hpp"
#include "cachekit/product_form.hpp"

using namespace cachekit;

namespace {

// The 3-object, size (1,2,3), capacity-4 instance with known exact ratios.
ChainSpec small_instance(PolicyKind kind) {
    ChainSpec spec;
    spec.policy = PolicyConfig::of(kind);
    spec.pmf = {0.2, 0.3, 0.5};
    spec.sizes = {1, 2, 3};
    spec.capacity = 4;
    return spec;
}

std::vector<double> random_pmf(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    std::vector<double> p(n);
    double sum = 0.0;
    for (auto& x : p) sum += (x = uni(rng));
    for (auto& x : p) x /= sum;
    return p;
}

}  // namespace

TEST_CASE("small variable-size instance: exact stationary hit ratios") {
    auto lru = brute_force_chain(small_instance(PolicyKind::LRU));
    CHECK(lru.ohr == doctest::Approx(731.0 / 1400.0).epsilon(1e-12));
    CHECK(lru.bhr == doctest::Approx(3527.0 / 6440.0).epsilon(1e-12));

    auto fifo = brute_force_chain(small_instance(PolicyKind::FIFO));
    CHECK(fifo.ohr == doctest::Approx(131.0 / 248.0).epsilon(1e-12));
    CHECK(fifo.bhr == doctest::Approx(3139.0 / 5704.0).epsilon(1e-12));

    auto cpr = brute_force_chain(small_instance(PolicyKind::CLOCK_PER_REQUEST));
    CHECK(cpr.ohr == doctest::Approx(613.0 / 1160.0).epsilon(1e-12));
    CHECK(cpr.bhr == doctest::Approx(2937.0 / 5336.0).epsilon(1e-12));

    auto rnd = brute_force_chain(small_instance(PolicyKind::RANDOM));
    CHECK(rnd.ohr == doctest::Approx(529.0 / 1000.0).epsilon(1e-12));
    CHECK(rnd.bhr == doctest::Approx(2533.0 / 4600.0).epsilon(1e-12));

    // the lone-largest-object state is transient, not recurrent
    CHECK(lru.reachable_states > lru.recurrent_states);
    CHECK(lru.residual < 1e-12);
    CHECK(fifo.residual < 1e-12);
    CHECK(cpr.residual < 1e-12);
    CHECK(rnd.residual < 1e-12);
}

TEST_CASE("value hit ratio weights stationary content with object values") {
    auto spec = small_instance(PolicyKind::RANDOM);
    spec.values = {1.0, 2.0, 4.0};
    auto r = brute_force_chain(spec);
    // check against the residency marginals the solver itself reports
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        num += spec.pmf[k] * spec.values[k] * r.residency[k];
        den += spec.pmf[k] * spec.values[k];
    }
    CHECK(r.vhr == doctest::Approx(num / den).epsilon(1e-12));
}

TEST_CASE("unit sizes: product form matches FIFO, CpR and RANDOM chains") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 12; ++trial) {
        std::size_t n = 2 + static_cast<std::size_t>(rng() % 5);
        std::size_t m = 1 + static_cast<std::size_t>(rng() % n);
        auto pmf = random_pmf(rng, n);
        double expected = product_form_hit_ratio(pmf, m);
        for (auto kind :
             {PolicyKind::FIFO, PolicyKind::CLOCK_PER_REQUEST, PolicyKind::RANDOM}) {
            ChainSpec spec;
            spec.policy = PolicyConfig::of(kind);
            spec.pmf = pmf;
            spec.capacity = m;
            auto r = brute_force_chain(spec);
            CHECK(r.ohr == doctest::Approx(expected).epsilon(1e-10));
        }
        ChainSpec lru_spec;
        lru_spec.policy = PolicyConfig::lru();
        lru_spec.pmf = pmf;
        lru_spec.capacity = m;
        auto lru_chain = brute_force_chain(lru_spec);
        double lru_closed = lru_exact_hit_ratio(pmf, m);
        CHECK(lru_chain.ohr == doctest::Approx(lru_closed).epsilon(1e-10));
        CHECK(lru_closed >= expected - 1e-12);  // LRU beats the product-form trio
    }
}

TEST_CASE("multi-level chains match the extended product form") {
    std::mt19937_64 rng(5);
    for (auto kinds : {std::vector<PolicyKind>{PolicyKind::FIFO, PolicyKind::FIFO},
                       std::vector<PolicyKind>{PolicyKind::CLOCK_PER_REQUEST, PolicyKind::FIFO},
                       std::vector<PolicyKind>{PolicyKind::RANDOM, PolicyKind::CLOCK_PER_REQUEST}}) {
        for (auto levels : {std::vector<std::size_t>{1, 1}, std::vector<std::size_t>{2, 1},
                            std::vector<std::size_t>{1, 2}}) {
            std::size_t m = levels[0] + levels[1];
            std::size_t n = m + 2;
            auto pmf = random_pmf(rng, n);
            ChainSpec spec;
            spec.policy = PolicyConfig::multi_level(levels, kinds);
            spec.pmf = pmf;
            spec.capacity = m;
            auto chain = brute_force_chain(spec);
            MultiLevelProblem prob{pmf, levels};
            CHECK(chain.ohr == doctest::Approx(multilevel_product_form(prob)).epsilon(1e-10));
        }
    }
}

TEST_CASE("climb (all levels of size one) matches the extended product form") {
    std::mt19937_64 rng(17);
    auto pmf = random_pmf(rng, 4);
    ChainSpec spec;
    spec.policy = PolicyConfig::multi_level(
        {1, 1}, {PolicyKind::FIFO, PolicyKind::FIFO});
    spec.pmf = pmf;
    spec.capacity = 2;
    auto chain = brute_force_chain(spec);
    MultiLevelProblem prob{pmf, {1, 1}};
    CHECK(chain.ohr == doctest::Approx(multilevel_product_form(prob)).epsilon(1e-10));
}

TEST_CASE("gated chain matches the gamma-substituted closed forms") {
    std::mt19937_64 rng(99);
    auto check_gated = [&](std::size_t n, std::size_t m, std::vector<double> q) {
        auto pmf = random_pmf(rng, n);
        auto gamma = probabilistic_substitution(pmf, q);

        ChainSpec spec;
        spec.policy = PolicyConfig::prob_admit(PolicyKind::LRU, q);
        spec.pmf = pmf;
        spec.capacity = m;
        auto chain = brute_force_chain(spec);
        double closed = lru_exact_hit_ratio_weighted(gamma, pmf, m);
        CHECK(chain.ohr == doctest::Approx(closed).epsilon(1e-10));
        // content distribution agreement, not just the aggregate
        auto marginals = lru_exact_residency(gamma, m);
        for (std::size_t k = 0; k < n; ++k)
            CHECK(chain.residency[k] == doctest::Approx(marginals[k]).epsilon(1e-10));

        spec.policy = PolicyConfig::prob_admit(PolicyKind::FIFO, q);
        auto fifo_chain = brute_force_chain(spec);
        double fifo_closed = product_form_hit_ratio_weighted(gamma, pmf, m);
        CHECK(fifo_chain.ohr == doctest::Approx(fifo_closed).epsilon(1e-10));
    };
    check_gated(3, 1, {1.0, 0.5, 0.5});
    check_gated(4, 2, {1.0, 0.5, 0.5, 0.5});
    check_gated(4, 2, {0.9, 0.3, 0.7, 1.0});
}

TEST_CASE("state explosion trips the resource guard") {
    ChainSpec spec;
    spec.policy = PolicyConfig::lru();
    spec.pmf = std::vector<double>(8, 0.125);
    spec.capacity = 5;
    spec.max_states = 10;
    CHECK_THROWS_AS(brute_force_chain(spec), ResourceLimitError);
}
