#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cachekit/types.hpp"

namespace cachekit::cli {

struct ResultRow {
    std::string experiment;
    std::string subject;        // policy or solver name
    Bytes capacity = 0;
    std::string metric;
    double value = 0.0;
    double stderr_ = 0.0;
    bool has_stderr = false;
    std::uint64_t seed = 0;
    int rep = 0;
    double runtime_s = 0.0;
    std::string status = "ok";  // or "skipped: <reason>"
};

/// Geometric or explicit capacity grids: "16,64,256", "log:16:4096:9",
/// "lin:10:100:10". Always returned sorted ascending.
std::vector<Bytes> parse_capacity_list(const std::string& spec);

/// Per-cell deterministic seed derived from the master seed and cell keys.
std::uint64_t cell_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                        std::uint64_t c);

/// Entry point used by both main() and the tests. Returns the process exit
/// code: 0 ok, 1 usage error, 2 data error, 3 partial results (skipped cells).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cachekit::cli
