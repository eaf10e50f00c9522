#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "harness.hpp"

using namespace cachekit::cli;

namespace {

struct RunResult {
    int rc;
    std::string out;
    std::string err;
};

RunResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int rc = run_cli(args, out, err);
    return {rc, out.str(), err.str()};
}

std::string temp_path(const char* name) {
    return std::string("/tmp/cachekit_test_") + name;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("capacity list parsing") {
    CHECK(parse_capacity_list("4,2,8") == std::vector<cachekit::Bytes>{2, 4, 8});
    auto log = parse_capacity_list("log:16:4096:9");
    CHECK(log.size() == 9);
    CHECK(log.front() == 16);
    CHECK(log.back() == 4096);
    auto lin = parse_capacity_list("lin:10:50:5");
    CHECK(lin == std::vector<cachekit::Bytes>{10, 20, 30, 40, 50});
    CHECK_THROWS_AS(parse_capacity_list(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_capacity_list("log:0:10:3"), std::invalid_argument);
}

TEST_CASE("cell seeds are stable and spread") {
    CHECK(cell_seed(1, 2, 3, 4) == cell_seed(1, 2, 3, 4));
    CHECK(cell_seed(1, 2, 3, 4) != cell_seed(1, 2, 3, 5));
    CHECK(cell_seed(1, 2, 3, 4) != cell_seed(2, 2, 3, 4));
}

TEST_CASE("gen is deterministic per seed") {
    auto p1 = temp_path("gen1.csv");
    auto p2 = temp_path("gen2.csv");
    auto a = run({"gen", "--catalog", "50", "--zipf", "1.0", "--requests", "500",
                  "--seed", "7", "--out", p1});
    auto b = run({"gen", "--catalog", "50", "--zipf", "1.0", "--requests", "500",
                  "--seed", "7", "--out", p2});
    CHECK(a.rc == 0);
    CHECK(b.rc == 0);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(!slurp(p1).empty());
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("sim emits one row per metric with the csv schema") {
    auto r = run({"sim", "--catalog", "60", "--requests", "20000", "--policy", "lru,fifo",
                  "--capacity", "8,16", "--seed", "3"});
    CHECK(r.rc == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "experiment,subject,capacity,metric,value,stderr,seed,rep,runtime_s,status");
    std::size_t rows = 0, ohr_rows = 0;
    std::string line;
    while (std::getline(lines, line)) {
        ++rows;
        if (line.find(",ohr,") != std::string::npos) ++ohr_rows;
    }
    CHECK(rows == 2 * 2 * 5);  // policies x capacities x metrics
    CHECK(ohr_rows == 4);
}

TEST_CASE("sim statistical values are reproducible from the seed") {
    std::vector<std::string> args{"sim", "--catalog", "60", "--requests", "20000",
                                  "--policy", "random", "--capacity", "8",
                                  "--seed", "11", "--workers", "4"};
    auto a = run(args);
    auto b = run(args);
    auto statistical_rows = [](const std::string& s) {
        std::istringstream in(s);
        std::string line, out;
        while (std::getline(in, line)) {
            if (line.find(",throughput,") != std::string::npos) continue;  // wall clock
            auto pos = line.rfind(',');
            pos = line.rfind(',', pos - 1);  // drop runtime_s and status
            out += line.substr(0, pos);
            out += '\n';
        }
        return out;
    };
    CHECK(statistical_rows(a.out) == statistical_rows(b.out));
}

TEST_CASE("json output embeds the manifest") {
    auto r = run({"sim", "--catalog", "20", "--requests", "2000", "--policy", "lru",
                  "--capacity", "4", "--format", "json"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("\"manifest\"") != std::string::npos);
    CHECK(r.out.find("\"rows\"") != std::string::npos);
}

TEST_CASE("exact subcommand reproduces the known instance") {
    auto r = run({"exact", "--pmf", "0.2,0.3,0.5", "--sizes", "1,2,3", "--capacity", "4",
                  "--policy", "lru,fifo,cpr,random"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("lru_exact") != std::string::npos);
    CHECK(r.out.find("0.522142857") != std::string::npos);  // 731/1400
    CHECK(r.out.find("0.528225806") != std::string::npos);  // 131/248
}

TEST_CASE("exact subcommand marks guarded cells as skipped") {
    auto r = run({"exact", "--catalog", "30", "--zipf", "1.0", "--capacity", "3",
                  "--policy", "lru", "--guard", "12"});
    CHECK(r.rc == 3);
    CHECK(r.out.find("skipped: resource-limit") != std::string::npos);
}

TEST_CASE("bounds subcommand on a generated unit trace") {
    auto r = run({"bounds", "--kind", "irm", "--catalog", "30", "--requests", "4000",
                  "--capacity", "4,8", "--seed", "5"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("belady") != std::string::npos);
    CHECK(r.out.find("bound_lo") != std::string::npos);
}

TEST_CASE("usage and data errors map to exit codes") {
    auto bad_cmd = run({"frobnicate"});
    CHECK(bad_cmd.rc == 1);
    auto bad_trace = run({"sim", "--trace", "/nonexistent/trace.csv"});
    CHECK(bad_trace.rc == 2);
    auto help = run({"--help"});
    CHECK(help.rc == 0);
    CHECK(help.out.find("gen") != std::string::npos);
}

TEST_CASE("ttl subcommand closed forms") {
    auto r = run({"ttl", "--lambda", "1.0", "--dt", "1.0", "--discipline", "req",
                  "--mc-cycles", "20000"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("formula") != std::string::npos);
    CHECK(r.out.find("event_sim") != std::string::npos);
}

TEST_CASE("bench reports positive medians") {
    auto r = run({"bench", "--catalog", "100", "--requests", "50000", "--policy",
                  "fifo,lru", "--capacity", "32", "--reps", "5"});
    CHECK(r.rc == 0);
    CHECK(r.out.find("throughput") != std::string::npos);
}
