#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cachekit/types.hpp"

namespace cachekit {

enum class PolicyKind {
    LRU,
    FIFO,
    CLOCK_PER_REQUEST,
    RANDOM,
    LFU,
    WINDOW_LFU,
    SCORE_GATED_CLOCK,
    GREEDY_DUAL,
    MULTI_LEVEL,
    PROB_ADMIT,
};

const char* to_string(PolicyKind k);

/// Score = (count if use_count) * (value if use_value) / (size if use_inv_size).
struct ScoreSpec {
    bool use_count = true;
    bool use_value = true;
    bool use_inv_size = true;

    double eval(std::uint64_t count, double value, Bytes size) const {
        double s = 1.0;
        if (use_count) s *= static_cast<double>(count);
        if (use_value) s *= value;
        if (use_inv_size) s /= static_cast<double>(size);
        return s;
    }
    std::string name() const {
        std::string n;
        if (use_count) n += 'c';
        if (use_value) n += 'v';
        if (use_inv_size) n += 's';
        return n.empty() ? "1" : n;
    }
};

struct PolicyConfig {
    PolicyKind kind = PolicyKind::LRU;
    std::uint64_t seed = 1;

    // WINDOW_LFU
    std::size_t window = 1;

    // SCORE_GATED_CLOCK / GREEDY_DUAL
    ScoreSpec score;

    // MULTI_LEVEL: level 1 is the most protected; a miss inserts at the last
    // level. Level capacities are object counts (unit-size semantics).
    std::vector<std::size_t> levels;
    std::vector<PolicyKind> level_kinds;  // FIFO, CLOCK_PER_REQUEST or RANDOM per level

    // PROB_ADMIT
    PolicyKind inner_kind = PolicyKind::LRU;
    std::vector<double> admit_prob;       // per object; empty -> use admit_beta rule
    double admit_beta = 0.0;              // q_k = exp(-beta * s_k / v_k) when probs empty

    void validate() const;
    std::string name() const;

    static PolicyConfig of(PolicyKind kind) {
        PolicyConfig c;
        c.kind = kind;
        return c;
    }
    static PolicyConfig lru() { return of(PolicyKind::LRU); }
    static PolicyConfig fifo() { return of(PolicyKind::FIFO); }
    static PolicyConfig cpr() { return of(PolicyKind::CLOCK_PER_REQUEST); }
    static PolicyConfig random(std::uint64_t seed = 1) {
        PolicyConfig c = of(PolicyKind::RANDOM);
        c.seed = seed;
        return c;
    }
    static PolicyConfig lfu() { return of(PolicyKind::LFU); }
    static PolicyConfig window_lfu(std::size_t w) {
        PolicyConfig c = of(PolicyKind::WINDOW_LFU);
        c.window = w;
        return c;
    }
    static PolicyConfig sgc(ScoreSpec s = {}) {
        PolicyConfig c = of(PolicyKind::SCORE_GATED_CLOCK);
        c.score = s;
        return c;
    }
    static PolicyConfig greedy_dual(ScoreSpec s = {}) {
        PolicyConfig c = of(PolicyKind::GREEDY_DUAL);
        c.score = s;
        return c;
    }
    static PolicyConfig multi_level(std::vector<std::size_t> ls, std::vector<PolicyKind> kinds);
    static PolicyConfig prob_admit(PolicyKind inner, std::vector<double> q,
                                   std::uint64_t seed = 1);
};

/// Parses a policy mini-spec, e.g. "lru", "wlfu:1000", "sgc:cs", "gd:cvs",
/// "ml:fifo:2,1", "prob:lru:0.5" (uniform q) or "prob:lru:beta=0.1".
PolicyConfig parse_policy(const std::string& spec);

}  // namespace cachekit
