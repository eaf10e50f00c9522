#pragma once

#include <cstddef>
#include <vector>

#include "cachekit/policy.hpp"
#include "cachekit/types.hpp"

namespace cachekit {

/// Exact Markov chain over reachable cache states. Supported kinds: LRU,
/// FIFO, CLOCK_PER_REQUEST, RANDOM, MULTI_LEVEL (unit sizes) and PROB_ADMIT
/// wrapping one of LRU/FIFO/CPR/RANDOM. State encodings carry policy-relevant
/// order (stack for LRU/FIFO, rotation-normalized ring for CpR, sorted set
/// for RANDOM).
struct ChainSpec {
    PolicyConfig policy;
    std::vector<double> pmf;
    std::vector<Bytes> sizes;     // empty = unit sizes
    std::vector<double> values;   // empty = unit values
    Bytes capacity = 1;
    std::size_t max_states = 1'000'000;
};

struct ChainResult {
    std::size_t reachable_states = 0;
    std::size_t recurrent_states = 0;
    double ohr = 0.0;
    double bhr = 0.0;
    double vhr = 0.0;
    double residual = 0.0;              // ||pi P - pi||_inf on the recurrent class
    std::vector<double> residency;      // per-object stationary residency probability
};

ChainResult brute_force_chain(const ChainSpec& spec);

}  // namespace cachekit
