#include "doctest.h"

#include <sstream>

#include "cachekit/trace_io.hpp"
#include "cachekit/workload.hpp"

using namespace cachekit;

TEST_CASE("trace csv: empty body, single line, defaults") {
    std::istringstream empty("time,object,size,value\n");
    auto t = load_trace(empty);
    CHECK(t.requests.empty());
    CHECK(t.catalog.empty());

    std::istringstream one("time,object,size,value\n0.0,a,100,1.0\n");
    auto t1 = load_trace(one);
    REQUIRE(t1.requests.size() == 1);
    CHECK(t1.catalog[t1.requests[0].object].name == "a");
    CHECK(t1.catalog[t1.requests[0].object].size == 100);
    CHECK(t1.catalog[t1.requests[0].object].value == 1.0);
    CHECK(t1.requests[0].time == doctest::Approx(0.0));

    // size/value columns absent entirely: defaults 1 / 1.0
    std::istringstream bare("time,object\n,x\n,y\n,x\n");
    auto tb = load_trace(bare);
    CHECK(tb.requests.size() == 3);
    CHECK(tb.catalog[0].size == 1);
    CHECK(tb.catalog[0].value == 1.0);
    CHECK_FALSE(tb.requests[0].has_time());
}

TEST_CASE("trace csv: omitted fields after first occurrence") {
    std::istringstream in(
        "time,object,size,value\n"
        "1.0,a,10,2.0\n"
        "2.0,b,20,1.0\n"
        "3.0,a,,\n"
        "4.0,a,10,2.0\n");
    auto t = load_trace(in);
    CHECK(t.requests.size() == 4);
    CHECK(t.catalog.size() == 2);
}

TEST_CASE("trace csv: errors carry line numbers") {
    std::istringstream bad_size("time,object,size,value\n0.0,a,xyz,1.0\n");
    CHECK_THROWS_WITH_AS(load_trace(bad_size), doctest::Contains("line 2"), ParseError);

    std::istringstream missing_size("time,object,size,value\n0.0,a,,1.0\n");
    CHECK_THROWS_AS(load_trace(missing_size), ParseError);

    std::istringstream decreasing("time,object,size,value\n5.0,a,1,1\n4.0,a,,\n");
    CHECK_THROWS_AS(load_trace(decreasing), ParseError);

    std::istringstream changed("time,object,size,value\n1.0,a,10,1\n2.0,a,11,\n");
    CHECK_THROWS_AS(load_trace(changed), ParseError);

    std::istringstream header("object,time\n");
    CHECK_THROWS_AS(load_trace(header), ParseError);
}

TEST_CASE("trace csv: round trip on a generated trace") {
    auto sizes = lognormal_sizes(50, 3.5, 1.0, 3);
    auto values = lognormal_values(50, -1.9, 1.0, 4);
    auto cat = make_catalog(zipf_pmf(50, 0.9), &sizes, &values);
    auto t = generate_prm_trace(cat, 10'000, 5.0, 9);

    std::ostringstream out;
    save_trace(t, out);
    std::istringstream in(out.str());
    auto t2 = load_trace(in);

    REQUIRE(t2.requests.size() == t.requests.size());
    for (std::size_t i = 0; i < t.requests.size(); ++i) {
        const auto& a = t.catalog[t.requests[i].object];
        const auto& b = t2.catalog[t2.requests[i].object];
        CHECK(a.name == b.name);
        CHECK(a.size == b.size);
        CHECK(a.value == b.value);
        CHECK(t.requests[i].time == t2.requests[i].time);
    }
    // a second round trip is byte-identical
    std::ostringstream out2;
    save_trace(t2, out2);
    CHECK(out.str() == out2.str());
}
