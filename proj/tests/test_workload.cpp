#include "doctest.h"

#include <cmath>
#include <random>

#include "cachekit/workload.hpp"

using namespace cachekit;

TEST_CASE("zipf pmf: closed cases") {
    CHECK(zipf_pmf(1, 1.0) == std::vector<double>{1.0});
    auto p2 = zipf_pmf(2, 1.0);
    CHECK(p2[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(p2[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    auto p3 = zipf_pmf(3, 0.0);
    CHECK(p3[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(zipf_pmf(0, 1.0), std::invalid_argument);
}

TEST_CASE("zipf pmf: normalized and non-increasing across the parameter range") {
    for (double beta : {0.0, 0.6, 1.0, 2.0}) {
        for (std::size_t n : {std::size_t{10}, std::size_t{100000}, std::size_t{10000000}}) {
            auto p = zipf_pmf(n, beta);
            double sum = 0.0, comp = 0.0;
            bool sorted = true;
            for (std::size_t k = 0; k < n; ++k) {
                double y = p[k] - comp;
                double t = sum + y;
                comp = (t - sum) - y;
                sum = t;
                if (k && p[k] > p[k - 1] + 1e-18) sorted = false;
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);
            CHECK(sorted);
        }
    }
}

TEST_CASE("lognormal sizes: degenerate sigma and determinism") {
    auto s = lognormal_sizes(5, 3.5, 0.0, 42);
    for (auto v : s) CHECK(v == 33115);  // round(exp(3.5) * 1000)
    auto a = lognormal_sizes(100, 3.5, 2.5, 7);
    auto b = lognormal_sizes(100, 3.5, 2.5, 7);
    CHECK(a == b);
    auto c = lognormal_sizes(100, 3.5, 2.5, 8);
    CHECK(a != c);
}

TEST_CASE("lognormal sizes: sample mean near the analytic moment") {
    const std::size_t n = 1'000'000;
    const double mu = 3.5, sigma = 2.5;
    auto s = lognormal_sizes(n, mu, sigma, 12345);
    double mean = 0.0;
    for (auto v : s) mean += static_cast<double>(v);
    mean /= static_cast<double>(n);
    // in bytes: 1000 * exp(mu + sigma^2/2), sd of the sample mean from the
    // lognormal second moment
    double m1 = 1000.0 * std::exp(mu + sigma * sigma / 2.0);
    double sd = m1 * std::sqrt(std::exp(sigma * sigma) - 1.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - m1) < 3.0 * sd);
}

TEST_CASE("irm trace: degenerate catalog, frequencies, determinism") {
    auto single = make_catalog({1.0});
    auto t = generate_irm_trace(single, 100, 1);
    CHECK(t.requests.size() == 100);
    for (const auto& r : t.requests) CHECK(r.object == 0);

    auto two = make_catalog({0.5, 0.5});
    auto big = generate_irm_trace(two, 1'000'000, 99);
    std::size_t c0 = 0;
    for (const auto& r : big.requests) c0 += r.object == 0;
    double f0 = static_cast<double>(c0) / 1e6;
    CHECK(f0 > 0.497);  // binomial 3 sigma ~ 0.0015
    CHECK(f0 < 0.503);

    auto t1 = generate_irm_trace(two, 1000, 5);
    auto t2 = generate_irm_trace(two, 1000, 5);
    for (std::size_t i = 0; i < 1000; ++i) CHECK(t1.requests[i].object == t2.requests[i].object);
    CHECK_THROWS_AS(generate_irm_trace(Catalog{}, 10, 1), std::invalid_argument);
}

TEST_CASE("irm trace: chi-square goodness of fit") {
    const std::size_t n = 100, r = 1'000'000;
    auto cat = make_catalog(zipf_pmf(n, 0.8));
    auto t = generate_irm_trace(cat, r, 2025);
    auto pmf = cat.pmf();
    std::vector<std::uint64_t> counts(n, 0);
    for (const auto& rq : t.requests) ++counts[rq.object];
    double chi2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double expect = pmf[k] * static_cast<double>(r);
        double d = static_cast<double>(counts[k]) - expect;
        chi2 += d * d / expect;
    }
    // chi-square critical value, 99 dof, significance 0.001
    CHECK(chi2 < 148.23);
}

TEST_CASE("loop trace") {
    auto t = loop_trace(3, 7);
    std::vector<ObjectId> want{0, 1, 2, 0, 1, 2, 0};
    for (std::size_t i = 0; i < 7; ++i) CHECK(t.requests[i].object == want[i]);
    auto ones = loop_trace(1, 4);
    CHECK(ones.requests.size() == 4);
    for (const auto& r : ones.requests) CHECK(r.object == 0);
}

TEST_CASE("delay value") {
    CHECK(delay_value(0.1, 0.1, 0.0) == doctest::Approx(0.0));
    CHECK(delay_value(0.2, 0.05, 0.01) == doctest::Approx(0.14));
    CHECK(delay_value(0.05, 0.1, 0.01) == doctest::Approx(-0.06));
}

TEST_CASE("prm trace: exponential merged arrivals") {
    auto cat = make_catalog(zipf_pmf(10, 1.0));
    auto t = generate_prm_trace(cat, 200'000, 2.0, 3);
    double prev = 0.0;
    double total = 0.0;
    for (const auto& r : t.requests) {
        CHECK(r.time >= prev);
        total = r.time;
        prev = r.time;
    }
    // mean horizon ~ R / rate
    CHECK(total == doctest::Approx(100'000.0).epsilon(0.02));
}

TEST_CASE("churn: degenerate to irm, pmf validity, new-object count") {
    auto cat = make_catalog(zipf_pmf(50, 1.0));
    ChurnModel none;
    none.p_new = 0.0;
    none.initial_catalog = cat;
    auto ct = generate_churn_trace(none, 20'000, 11);
    CHECK(ct.log.events.empty());
    // matches the static pmf: chi-square with generous headroom
    auto pmf = cat.pmf();
    std::vector<std::uint64_t> counts(50, 0);
    for (const auto& rq : ct.trace.requests) ++counts[rq.object];
    double chi2 = 0.0;
    for (std::size_t k = 0; k < 50; ++k) {
        double expect = pmf[k] * 20'000.0;
        double d = static_cast<double>(counts[k]) - expect;
        chi2 += d * d / expect;
    }
    CHECK(chi2 < 95.0);  // 49 dof, significance ~1e-4

    ChurnModel model;
    model.p_new = 0.01;
    model.initial_catalog = cat;
    model.init_prob = zipf_init_sampler(50, 1.0, 0.1);
    const std::size_t r = 100'000;
    auto churn = generate_churn_trace(model, r, 17);
    auto churn2 = generate_churn_trace(model, r, 17);
    CHECK(churn.log.events.size() == churn2.log.events.size());
    for (std::size_t i = 0; i < r; ++i)
        CHECK(churn.trace.requests[i].object == churn2.trace.requests[i].object);
    double expect_new = 0.01 * static_cast<double>(r);
    double sd = std::sqrt(expect_new * 0.99);
    CHECK(std::abs(static_cast<double>(churn.log.events.size()) - expect_new) < 3.0 * sd);

    // pmf snapshots stay normalized
    for (std::size_t at : {std::size_t{0}, r / 2, r}) {
        auto pr = churn.log.pmf_at(at, churn.trace.catalog.size());
        double sum = 0.0;
        for (double x : pr) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("fill time sampler: coupon-collector mean for uniform pmf") {
    DiscreteSampler s(std::vector<double>{0.5, 0.5});
    std::mt19937_64 rng(1);
    double mean = 0.0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i)
        mean += static_cast<double>(sample_fill_time(s, 2, rng));
    mean /= reps;
    CHECK(mean == doctest::Approx(3.0).epsilon(0.03));  // 1 + geometric(1/2)
}
