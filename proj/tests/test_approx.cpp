#include "doctest.h"

#include <cmath>
#include <random>

#include "cachekit/approx.hpp"
#include "cachekit/lru_exact.hpp"
#include "cachekit/product_form.hpp"
#include "cachekit/workload.hpp"

using namespace cachekit;

namespace {

std::vector<double> random_pmf(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> uni(0.02, 1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& x : p) s += (x = uni(rng));
    for (auto& x : p) x /= s;
    return p;
}

}  // namespace

TEST_CASE("che approximation: limits, symmetry, residual") {
    auto pmf = zipf_pmf(10, 1.0);
    CHECK(che_lru(pmf, 10).hit_ratio == doctest::Approx(1.0));

    std::vector<double> uniform(8, 0.125);
    for (std::size_t m : {1u, 3u, 7u}) {
        auto r = che_lru(uniform, m);
        CHECK(r.hit_ratio == doctest::Approx(static_cast<double>(m) / 8.0).epsilon(1e-9));
        CHECK(r.residual < 1e-9);
        for (double h : r.per_object)
            CHECK(h == doctest::Approx(static_cast<double>(m) / 8.0).epsilon(1e-9));
    }

    auto r1 = che_lru(pmf, 1);
    double exact = lru_exact_hit_ratio(pmf, 1);
    CHECK(std::abs(r1.hit_ratio - exact) <= 0.0825);
}

TEST_CASE("fagin approximation is exact at M = 1") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 2 + rng() % 7;
        auto pmf = random_pmf(rng, n);
        auto r = fagin_lru(pmf, 1);
        double sq = 0.0;
        for (double p : pmf) sq += p * p;
        CHECK(std::abs(r.hit_ratio - sq) < 1e-12);
        CHECK(r.root == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("approximation envelopes against the exact solvers") {
    std::mt19937_64 rng(2023);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 4 + rng() % 9;  // 4..12
        std::size_t m = 1 + rng() % std::min<std::size_t>(6, n - 1);
        auto pmf = random_pmf(rng, n);
        double exact = lru_exact_hit_ratio(pmf, m);
        CHECK(std::abs(che_lru(pmf, m).hit_ratio - exact) <= 0.0825);
        CHECK(std::abs(fagin_lru(pmf, m).hit_ratio - exact) <= 0.052);
        double pf = product_form_hit_ratio(pmf, m);
        CHECK(std::abs(fifo_approx(pmf, m).hit_ratio - pf) <= 0.05);
    }
}

TEST_CASE("approximations are monotone in M and bounded") {
    auto pmf = zipf_pmf(12, 0.8);
    double prev_che = 0.0, prev_fagin = 0.0, prev_fifo = 0.0;
    for (std::size_t m = 1; m <= 12; ++m) {
        double c = che_lru(pmf, m).hit_ratio;
        double f = fagin_lru(pmf, m).hit_ratio;
        double d = fifo_approx(pmf, m).hit_ratio;
        CHECK(c >= prev_che - 1e-12);
        CHECK(f >= prev_fagin - 1e-12);
        CHECK(d >= prev_fifo - 1e-12);
        CHECK(c <= 1.0 + 1e-12);
        prev_che = c;
        prev_fagin = f;
        prev_fifo = d;
    }
}

TEST_CASE("filling-phase bound: closed cases") {
    std::vector<double> p{0.5, 0.3, 0.2};
    CHECK(filling_phase_hit_bound(p, 0) == doctest::Approx(0.0));
    double sq = 0.25 + 0.09 + 0.04;
    CHECK(filling_phase_hit_bound(p, 1) == doctest::Approx(sq).epsilon(1e-14));
    CHECK(filling_phase_hit_bound(p, 1'000'000) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("filling-phase bound tracks an unbounded-cache simulation") {
    const std::size_t n = 1000;
    auto pmf = zipf_pmf(n, 1.0);
    DiscreteSampler sampler(pmf);
    // an unbounded cache hits exactly when the object was seen before, so the
    // empirical oracle is distinct-tracking over many replications
    const int reps = 1000;
    const std::size_t horizon = 200;
    std::vector<double> hit_frac(horizon, 0.0);
    std::mt19937_64 rng(99);
    std::vector<std::uint32_t> seen(n, 0);
    for (int rep = 1; rep <= reps; ++rep) {
        for (std::size_t r = 0; r < horizon; ++r) {
            auto x = sampler(rng);
            if (seen[x] == static_cast<std::uint32_t>(rep)) hit_frac[r] += 1.0;
            seen[x] = static_cast<std::uint32_t>(rep);
        }
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < horizon; ++r) {
        double expect = filling_phase_hit_bound(pmf, r);
        worst = std::max(worst, std::abs(hit_frac[r] / reps - expect));
    }
    CHECK(worst < 0.05);
    // and averaged over the horizon the agreement is tight
    double avg_emp = 0.0, avg_bound = 0.0;
    for (std::size_t r = 0; r < horizon; ++r) {
        avg_emp += hit_frac[r] / reps;
        avg_bound += filling_phase_hit_bound(pmf, r);
    }
    CHECK(std::abs(avg_emp - avg_bound) / horizon < 0.01);
}

TEST_CASE("convergence time distribution: closed cases") {
    std::vector<double> p{0.5, 0.5};
    auto one = convergence_time_distribution(p, 1, 10);
    CHECK(one.prob[0] == doctest::Approx(1.0));
    CHECK(one.mean == doctest::Approx(1.0));

    auto two = convergence_time_distribution(p, 2, 60);
    for (std::size_t j = 0; j + 2 <= 10; ++j)
        CHECK(two.prob[j] ==
              doctest::Approx(std::pow(0.5, static_cast<double>(j + 1))).epsilon(1e-12));
    CHECK(two.mean == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(two.tail_mass < 1e-9);
}

TEST_CASE("convergence mean near the working-set root") {
    auto pmf = zipf_pmf(10, 1.0);
    auto dist = convergence_time_distribution(pmf, 3, 400);
    CHECK(dist.tail_mass < 1e-9);
    double ct = fagin_lru(pmf, 3).root;
    CHECK(std::abs(dist.mean - ct) / dist.mean < 0.05);
}

TEST_CASE("convergence distribution guard") {
    auto pmf = zipf_pmf(20, 1.0);
    CHECK_THROWS_AS(convergence_time_distribution(pmf, 3, 100), ResourceLimitError);
    CHECK_THROWS_AS(convergence_time_distribution(zipf_pmf(8, 1.0), 7, 100),
                    ResourceLimitError);
}
