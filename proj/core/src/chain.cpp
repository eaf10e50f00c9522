#include "cachekit/chain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "numeric_util.hpp"

namespace cachekit {

namespace {

// States are small; a generic byte-string encoding keeps one hash map for all
// policy kinds. Multi-level states are level-delimited.
using State = std::string;
using Successors = std::vector<std::pair<State, double>>;

struct StepContext {
    const ChainSpec& spec;
    std::vector<Bytes> sizes;

    Bytes size_of(unsigned char k) const { return sizes[k]; }
};

std::vector<unsigned char> members_of(const State& s) {
    std::vector<unsigned char> out;
    for (unsigned char c : s)
        if (c != 0xff) out.push_back(c);
    return out;
}

Bytes used_bytes(const StepContext& ctx, const State& s) {
    Bytes u = 0;
    for (unsigned char c : s)
        if (c != 0xff) u += ctx.size_of(c);
    return u;
}

// --- single-level steps; state = object bytes in policy order ---------------

State lru_step(const StepContext& ctx, State s, unsigned char x) {
    auto pos = s.find(static_cast<char>(x));
    if (pos != State::npos) {
        s.erase(pos, 1);
        return std::string(1, static_cast<char>(x)) + s;
    }
    Bytes used = used_bytes(ctx, s);
    while (used + ctx.size_of(x) > ctx.spec.capacity) {
        used -= ctx.size_of(static_cast<unsigned char>(s.back()));
        s.pop_back();
    }
    return std::string(1, static_cast<char>(x)) + s;
}

State fifo_step(const StepContext& ctx, State s, unsigned char x) {
    if (s.find(static_cast<char>(x)) != State::npos) return s;
    Bytes used = used_bytes(ctx, s);
    while (used + ctx.size_of(x) > ctx.spec.capacity) {
        used -= ctx.size_of(static_cast<unsigned char>(s.back()));
        s.pop_back();
    }
    return std::string(1, static_cast<char>(x)) + s;
}

// Ring rotated so the eviction candidate (hand) is at the front. A hit steps
// the hand; a miss evicts at the hand until the object fits and inserts it
// into the freed position, leaving the hand on the next remaining slot.
State cpr_step(const StepContext& ctx, State s, unsigned char x) {
    if (s.find(static_cast<char>(x)) != State::npos) {
        if (s.size() > 1) return s.substr(1) + s[0];
        return s;
    }
    Bytes used = used_bytes(ctx, s);
    while (used + ctx.size_of(x) > ctx.spec.capacity) {
        used -= ctx.size_of(static_cast<unsigned char>(s.front()));
        s.erase(s.begin());
    }
    return s + static_cast<char>(x);
}

void random_step(const StepContext& ctx, const State& s, unsigned char x, double scale,
                 Successors& out) {
    if (s.find(static_cast<char>(x)) != State::npos) {
        out.emplace_back(s, scale);
        return;
    }
    Bytes used = used_bytes(ctx, s);
    if (used + ctx.size_of(x) <= ctx.spec.capacity) {
        State ns = s + static_cast<char>(x);
        std::sort(ns.begin(), ns.end());
        out.emplace_back(ns, scale);
        return;
    }
    const double share = scale / static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        State reduced = s;
        reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(i));
        random_step(ctx, reduced, x, share, out);
    }
}

// --- multi-level (unit sizes); levels separated by 0xff ---------------------

std::vector<State> split_levels(const State& s) {
    std::vector<State> levels{State{}};
    for (unsigned char c : s) {
        if (c == 0xff)
            levels.emplace_back();
        else
            levels.back() += static_cast<char>(c);
    }
    return levels;
}

State join_levels(const std::vector<State>& levels) {
    State s;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        if (j) s += static_cast<char>(0xff);
        s += levels[j];
    }
    return s;
}

/// Inserts x into a full level per its kind; returns the demoted object.
/// FIFO levels are newest-first (candidate at the back); CpR levels are
/// rotated hand-first (candidate at the front, insert behind the hand).
/// RANDOM levels are handled by the caller (stochastic candidate).
unsigned char level_insert_full(State& level, PolicyKind kind, unsigned char x) {
    if (kind == PolicyKind::FIFO) {
        unsigned char demoted = static_cast<unsigned char>(level.back());
        level.pop_back();
        level.insert(level.begin(), static_cast<char>(x));
        return demoted;
    }
    unsigned char demoted = static_cast<unsigned char>(level.front());
    level.erase(level.begin());
    level += static_cast<char>(x);
    return demoted;
}

void level_insert_free(State& level, PolicyKind kind, unsigned char x) {
    if (kind == PolicyKind::FIFO)
        level.insert(level.begin(), static_cast<char>(x));
    else
        level += static_cast<char>(x);  // CpR and RANDOM
}

void multilevel_step(const StepContext& ctx, const State& s, unsigned char x, double scale,
                     Successors& out) {
    const auto& cfg = ctx.spec.policy;
    auto levels = split_levels(s);
    auto emit = [&](std::vector<State> ls, double pr) {
        for (std::size_t j = 0; j < ls.size(); ++j)
            if (cfg.level_kinds[j] == PolicyKind::RANDOM) std::sort(ls[j].begin(), ls[j].end());
        out.emplace_back(join_levels(ls), pr);
    };

    for (std::size_t j = 0; j < levels.size(); ++j) {
        auto pos = levels[j].find(static_cast<char>(x));
        if (pos == State::npos) continue;
        if (j == 0) {
            if (cfg.level_kinds[0] == PolicyKind::CLOCK_PER_REQUEST && levels[0].size() > 1) {
                levels[0] = levels[0].substr(1) + levels[0][0];
            }
            emit(std::move(levels), scale);
            return;
        }
        if (levels[j - 1].size() < cfg.levels[j - 1]) {
            levels[j].erase(pos, 1);
            level_insert_free(levels[j - 1], cfg.level_kinds[j - 1], x);
            emit(std::move(levels), scale);
            return;
        }
        if (cfg.level_kinds[j - 1] == PolicyKind::RANDOM) {
            const double share = scale / static_cast<double>(levels[j - 1].size());
            for (std::size_t ci = 0; ci < levels[j - 1].size(); ++ci) {
                auto ls = levels;
                unsigned char demoted = static_cast<unsigned char>(ls[j - 1][ci]);
                ls[j - 1][ci] = static_cast<char>(x);
                ls[j][pos] = static_cast<char>(demoted);
                emit(std::move(ls), share);
            }
        } else {
            unsigned char demoted = level_insert_full(levels[j - 1], cfg.level_kinds[j - 1], x);
            levels[j][pos] = static_cast<char>(demoted);
            emit(std::move(levels), scale);
        }
        return;
    }

    // miss: insert at the last level
    std::size_t last = levels.size() - 1;
    if (levels[last].size() < cfg.levels[last]) {
        level_insert_free(levels[last], cfg.level_kinds[last], x);
        emit(std::move(levels), scale);
    } else if (cfg.level_kinds[last] == PolicyKind::RANDOM) {
        const double share = scale / static_cast<double>(levels[last].size());
        for (std::size_t ci = 0; ci < levels[last].size(); ++ci) {
            auto ls = levels;
            ls[last][ci] = static_cast<char>(x);
            emit(std::move(ls), share);
        }
    } else {
        level_insert_full(levels[last], cfg.level_kinds[last], x);
        emit(std::move(levels), scale);
    }
}

void dispatch_step(const StepContext& ctx, PolicyKind kind, const State& s, unsigned char x,
                   double scale, Successors& out) {
    switch (kind) {
        case PolicyKind::LRU: out.emplace_back(lru_step(ctx, s, x), scale); break;
        case PolicyKind::FIFO: out.emplace_back(fifo_step(ctx, s, x), scale); break;
        case PolicyKind::CLOCK_PER_REQUEST: out.emplace_back(cpr_step(ctx, s, x), scale); break;
        case PolicyKind::RANDOM: random_step(ctx, s, x, scale, out); break;
        case PolicyKind::MULTI_LEVEL: multilevel_step(ctx, s, x, scale, out); break;
        default:
            throw std::invalid_argument("brute_force_chain: unsupported policy kind");
    }
}

Successors step(const StepContext& ctx, const State& s, unsigned char x) {
    Successors out;
    const auto& cfg = ctx.spec.policy;
    if (cfg.kind == PolicyKind::PROB_ADMIT) {
        if (cfg.admit_prob.empty())
            throw std::invalid_argument("brute_force_chain: prob_admit requires explicit q");
        double q = cfg.admit_prob.size() == 1 ? cfg.admit_prob[0] : cfg.admit_prob.at(x);
        if (q < 1.0) out.emplace_back(s, 1.0 - q);
        if (q > 0.0) dispatch_step(ctx, cfg.inner_kind, s, x, q, out);
    } else {
        dispatch_step(ctx, cfg.kind, s, x, 1.0, out);
    }
    return out;
}

}  // namespace

ChainResult brute_force_chain(const ChainSpec& spec) {
    detail::check_pmf(spec.pmf, "brute_force_chain");
    const std::size_t n = spec.pmf.size();
    if (n > 250) throw ResourceLimitError("brute_force_chain: too many objects");
    StepContext ctx{spec, spec.sizes};
    if (ctx.sizes.empty()) ctx.sizes.assign(n, 1);
    if (ctx.sizes.size() != n)
        throw std::invalid_argument("brute_force_chain: sizes length mismatch");
    for (Bytes s : ctx.sizes)
        if (s > spec.capacity)
            throw std::invalid_argument(
                "brute_force_chain: objects larger than the capacity must be excluded");
    std::vector<double> values = spec.values;
    if (values.empty()) values.assign(n, 1.0);

    const auto& cfg = spec.policy;
    State start;
    if (cfg.kind == PolicyKind::MULTI_LEVEL ||
        (cfg.kind == PolicyKind::PROB_ADMIT && cfg.inner_kind == PolicyKind::MULTI_LEVEL)) {
        if (cfg.kind == PolicyKind::PROB_ADMIT)
            throw std::invalid_argument("brute_force_chain: prob_admit(multi_level) unsupported");
        std::size_t total = 0;
        for (auto l : cfg.levels) total += l;
        if (total != spec.capacity)
            throw std::invalid_argument("brute_force_chain: capacity must equal sum of levels");
        start = join_levels(std::vector<State>(cfg.levels.size()));
    }

    // --- explore reachable states -------------------------------------------
    std::unordered_map<State, std::size_t> index;
    std::vector<State> states;
    std::vector<std::vector<std::pair<std::size_t, double>>> trans;
    std::vector<State> frontier{start};
    index.emplace(start, 0);
    states.push_back(start);
    while (!frontier.empty()) {
        State s = std::move(frontier.back());
        frontier.pop_back();
        std::size_t si = index.at(s);
        std::map<std::size_t, double> row;
        for (std::size_t k = 0; k < n; ++k) {
            if (spec.pmf[k] == 0.0) continue;
            for (auto& [ns, pr] : step(ctx, s, static_cast<unsigned char>(k))) {
                auto [it, inserted] = index.emplace(ns, states.size());
                if (inserted) {
                    states.push_back(ns);
                    if (states.size() > spec.max_states)
                        throw ResourceLimitError("brute_force_chain: state explosion (" +
                                                 std::to_string(states.size()) + " states)");
                    frontier.push_back(ns);
                }
                row[it->second] += spec.pmf[k] * pr;
            }
        }
        if (trans.size() < states.size()) trans.resize(states.size());
        trans[si].assign(row.begin(), row.end());
    }
    trans.resize(states.size());

    // --- recurrent class: iterative Tarjan SCC -------------------------------
    const std::size_t ns = states.size();
    std::vector<std::int32_t> idx(ns, -1), low(ns, 0), comp(ns, -1);
    std::vector<char> onstack(ns, 0);
    std::vector<std::size_t> stack;
    std::int32_t counter = 0, ncomp = 0;
    {
        struct Frame {
            std::size_t v;
            std::size_t edge;
        };
        std::vector<Frame> call;
        for (std::size_t root = 0; root < ns; ++root) {
            if (idx[root] >= 0) continue;
            call.push_back({root, 0});
            while (!call.empty()) {
                auto& fr = call.back();
                std::size_t v = fr.v;
                if (fr.edge == 0) {
                    idx[v] = low[v] = counter++;
                    stack.push_back(v);
                    onstack[v] = 1;
                }
                bool descended = false;
                while (fr.edge < trans[v].size()) {
                    std::size_t w = trans[v][fr.edge].first;
                    ++fr.edge;
                    if (idx[w] < 0) {
                        call.push_back({w, 0});
                        descended = true;
                        break;
                    }
                    if (onstack[w]) low[v] = std::min(low[v], idx[w]);
                }
                if (descended) continue;
                if (low[v] == idx[v]) {
                    while (true) {
                        std::size_t w = stack.back();
                        stack.pop_back();
                        onstack[w] = 0;
                        comp[w] = ncomp;
                        if (w == v) break;
                    }
                    ++ncomp;
                }
                call.pop_back();
                if (!call.empty()) {
                    auto& parent = call.back();
                    low[parent.v] = std::min(low[parent.v], low[v]);
                }
            }
        }
    }
    std::vector<char> closed(static_cast<std::size_t>(ncomp), 1);
    for (std::size_t v = 0; v < ns; ++v)
        for (auto& [w, pr] : trans[v])
            if (comp[w] != comp[v]) closed[static_cast<std::size_t>(comp[v])] = 0;
    // the recurrent class reached from the empty start; Tarjan emits SCCs in
    // reverse topological order, so the lowest-numbered closed component is a
    // sink reachable from the start
    std::int32_t chosen = -1;
    for (std::int32_t c = 0; c < ncomp; ++c) {
        if (closed[static_cast<std::size_t>(c)]) {
            chosen = c;
            break;
        }
    }
    if (chosen < 0) throw std::logic_error("brute_force_chain: no recurrent class found");

    std::vector<std::size_t> cls;
    std::vector<std::int64_t> reindex(ns, -1);
    for (std::size_t v = 0; v < ns; ++v) {
        if (comp[v] == chosen) {
            reindex[v] = static_cast<std::int64_t>(cls.size());
            cls.push_back(v);
        }
    }

    // --- stationary distribution: solve (P^T - I) pi = 0, sum pi = 1 ---------
    const std::size_t m = cls.size();
    if (m > 4'000)
        throw ResourceLimitError("brute_force_chain: recurrent class too large for dense solve");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
    for (std::size_t v : cls) {
        for (auto& [w, pr] : trans[v]) {
            if (reindex[w] >= 0)
                a(static_cast<Eigen::Index>(reindex[w]),
                  static_cast<Eigen::Index>(reindex[v])) += pr;
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -= 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    a.row(static_cast<Eigen::Index>(m - 1)).setOnes();
    b(static_cast<Eigen::Index>(m - 1)) = 1.0;
    Eigen::VectorXd pi = a.fullPivLu().solve(b);

    // residual ||pi P - pi||_inf
    Eigen::VectorXd flow = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t v : cls) {
        double pv = pi(static_cast<Eigen::Index>(reindex[v]));
        for (auto& [w, pr] : trans[v])
            if (reindex[w] >= 0) flow(static_cast<Eigen::Index>(reindex[w])) += pv * pr;
    }
    double residual = (flow - pi).cwiseAbs().maxCoeff();

    // --- ratios ---------------------------------------------------------------
    ChainResult out;
    out.reachable_states = ns;
    out.recurrent_states = m;
    out.residual = residual;
    out.residency.assign(n, 0.0);
    double ohr = 0.0, bhr = 0.0, vhr = 0.0;
    for (std::size_t v : cls) {
        double pv = pi(static_cast<Eigen::Index>(reindex[v]));
        for (unsigned char k : members_of(states[v])) {
            out.residency[k] += pv;
            ohr += pv * spec.pmf[k];
            bhr += pv * spec.pmf[k] * static_cast<double>(ctx.sizes[k]);
            vhr += pv * spec.pmf[k] * values[k];
        }
    }
    double bytes_norm = 0.0, value_norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        bytes_norm += spec.pmf[k] * static_cast<double>(ctx.sizes[k]);
        value_norm += spec.pmf[k] * values[k];
    }
    out.ohr = ohr;
    out.bhr = bytes_norm > 0 ? bhr / bytes_norm : 0.0;
    out.vhr = value_norm > 0 ? vhr / value_norm : 0.0;
    return out;
}

}  // namespace cachekit
