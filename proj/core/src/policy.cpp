#include "cachekit/policy.hpp"

#include <sstream>
#include <stdexcept>

namespace cachekit {

const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::LRU: return "lru";
        case PolicyKind::FIFO: return "fifo";
        case PolicyKind::CLOCK_PER_REQUEST: return "cpr";
        case PolicyKind::RANDOM: return "random";
        case PolicyKind::LFU: return "lfu";
        case PolicyKind::WINDOW_LFU: return "wlfu";
        case PolicyKind::SCORE_GATED_CLOCK: return "sgc";
        case PolicyKind::GREEDY_DUAL: return "gd";
        case PolicyKind::MULTI_LEVEL: return "ml";
        case PolicyKind::PROB_ADMIT: return "prob";
    }
    return "?";
}

void PolicyConfig::validate() const {
    switch (kind) {
        case PolicyKind::WINDOW_LFU:
            if (window < 1) throw std::invalid_argument("window_lfu: window must be >= 1");
            break;
        case PolicyKind::MULTI_LEVEL: {
            if (levels.empty()) throw std::invalid_argument("multi_level: no levels");
            if (levels.size() != level_kinds.size())
                throw std::invalid_argument("multi_level: levels/kinds length mismatch");
            for (auto l : levels)
                if (l < 1) throw std::invalid_argument("multi_level: level size must be >= 1");
            for (auto k : level_kinds)
                if (k != PolicyKind::FIFO && k != PolicyKind::CLOCK_PER_REQUEST &&
                    k != PolicyKind::RANDOM)
                    throw std::invalid_argument("multi_level: level kind must be fifo/cpr/random");
            break;
        }
        case PolicyKind::PROB_ADMIT: {
            if (inner_kind == PolicyKind::PROB_ADMIT || inner_kind == PolicyKind::MULTI_LEVEL)
                throw std::invalid_argument("prob_admit: unsupported inner policy");
            for (double q : admit_prob)
                if (!(q > 0.0) || q > 1.0)
                    throw std::invalid_argument("prob_admit: admit probabilities must be in (0,1]");
            if (admit_prob.empty() && admit_beta < 0)
                throw std::invalid_argument("prob_admit: beta must be >= 0");
            break;
        }
        default:
            break;
    }
}

std::string PolicyConfig::name() const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
        case PolicyKind::WINDOW_LFU: os << ':' << window; break;
        case PolicyKind::SCORE_GATED_CLOCK:
        case PolicyKind::GREEDY_DUAL: os << ':' << score.name(); break;
        case PolicyKind::MULTI_LEVEL:
            for (std::size_t i = 0; i < levels.size(); ++i)
                os << (i ? "," : ":") << to_string(level_kinds[i]) << levels[i];
            break;
        case PolicyKind::PROB_ADMIT:
            os << ':' << to_string(inner_kind);
            if (admit_prob.empty()) os << ":beta=" << admit_beta;
            break;
        default: break;
    }
    return os.str();
}

PolicyConfig PolicyConfig::multi_level(std::vector<std::size_t> ls,
                                       std::vector<PolicyKind> kinds) {
    PolicyConfig c = of(PolicyKind::MULTI_LEVEL);
    c.levels = std::move(ls);
    c.level_kinds = std::move(kinds);
    c.validate();
    return c;
}

PolicyConfig PolicyConfig::prob_admit(PolicyKind inner, std::vector<double> q,
                                      std::uint64_t seed) {
    PolicyConfig c = of(PolicyKind::PROB_ADMIT);
    c.inner_kind = inner;
    c.admit_prob = std::move(q);
    c.seed = seed;
    c.validate();
    return c;
}

namespace {

PolicyKind kind_from_token(const std::string& tok) {
    if (tok == "lru") return PolicyKind::LRU;
    if (tok == "fifo") return PolicyKind::FIFO;
    if (tok == "cpr" || tok == "clock") return PolicyKind::CLOCK_PER_REQUEST;
    if (tok == "random") return PolicyKind::RANDOM;
    if (tok == "lfu") return PolicyKind::LFU;
    if (tok == "wlfu") return PolicyKind::WINDOW_LFU;
    if (tok == "sgc") return PolicyKind::SCORE_GATED_CLOCK;
    if (tok == "gd" || tok == "gdsf") return PolicyKind::GREEDY_DUAL;
    if (tok == "ml") return PolicyKind::MULTI_LEVEL;
    if (tok == "prob") return PolicyKind::PROB_ADMIT;
    throw std::invalid_argument("unknown policy '" + tok + "'");
}

ScoreSpec score_from_token(const std::string& tok) {
    ScoreSpec s{false, false, false};
    for (char c : tok) {
        switch (c) {
            case 'c': s.use_count = true; break;
            case 'v': s.use_value = true; break;
            case 's': s.use_inv_size = true; break;
            default: throw std::invalid_argument("bad score spec '" + tok + "'");
        }
    }
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

PolicyConfig parse_policy(const std::string& spec) {
    auto parts = split(spec, ':');
    PolicyConfig c;
    c.kind = kind_from_token(parts[0]);
    switch (c.kind) {
        case PolicyKind::WINDOW_LFU:
            if (parts.size() != 2) throw std::invalid_argument("wlfu needs a window: wlfu:W");
            c.window = std::stoull(parts[1]);
            break;
        case PolicyKind::SCORE_GATED_CLOCK:
        case PolicyKind::GREEDY_DUAL:
            if (parts.size() > 1) c.score = score_from_token(parts[1]);
            break;
        case PolicyKind::MULTI_LEVEL: {
            if (parts.size() != 3)
                throw std::invalid_argument("ml spec: ml:KIND:l1,l2,... or ml:k1,k2:l1,l2");
            auto kinds = split(parts[1], ',');
            auto ls = split(parts[2], ',');
            for (const auto& l : ls) c.levels.push_back(std::stoull(l));
            if (kinds.size() == 1)
                c.level_kinds.assign(c.levels.size(), kind_from_token(kinds[0]));
            else
                for (const auto& k : kinds) c.level_kinds.push_back(kind_from_token(k));
            break;
        }
        case PolicyKind::PROB_ADMIT: {
            if (parts.size() != 3)
                throw std::invalid_argument("prob spec: prob:INNER:Q or prob:INNER:beta=B");
            c.inner_kind = kind_from_token(parts[1]);
            if (parts[2].rfind("beta=", 0) == 0) {
                c.admit_beta = std::stod(parts[2].substr(5));
            } else {
                c.admit_prob.assign(1, std::stod(parts[2]));  // uniform q marker
            }
            break;
        }
        default:
            if (parts.size() > 1) throw std::invalid_argument("policy '" + parts[0] + "' takes no arguments");
            break;
    }
    c.validate();
    return c;
}

}  // namespace cachekit
