#include "cachekit/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace cachekit {

std::vector<double> zipf_pmf(std::size_t n, double beta) {
    if (n == 0) throw std::invalid_argument("zipf_pmf: n must be >= 1");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("zipf_pmf: beta must be finite and >= 0");
    std::vector<double> p(n);
    // compensated summation keeps the normalizer exact enough for n up to 1e7
    double sum = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        p[k] = std::pow(static_cast<double>(k + 1), -beta);
        double y = p[k] - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    for (auto& x : p) x /= sum;
    return p;
}

std::vector<Bytes> lognormal_sizes(std::size_t n, double mu, double sigma,
                                   std::uint64_t seed) {
    if (sigma < 0) throw std::invalid_argument("lognormal_sizes: sigma must be >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Bytes> s(n);
    for (std::size_t k = 0; k < n; ++k) {
        double z = sigma == 0.0 ? 0.0 : normal(rng);
        double bytes = std::round(std::exp(mu + sigma * z) * 1000.0);
        s[k] = bytes < 1.0 ? Bytes{1} : static_cast<Bytes>(bytes);
    }
    return s;
}

std::vector<double> lognormal_values(std::size_t n, double mu, double sigma,
                                     std::uint64_t seed) {
    if (sigma < 0) throw std::invalid_argument("lognormal_values: sigma must be >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        double z = sigma == 0.0 ? 0.0 : normal(rng);
        v[k] = std::exp(mu + sigma * z);
    }
    return v;
}

Catalog make_catalog(const std::vector<double>& weights,
                     const std::vector<Bytes>* sizes,
                     const std::vector<double>* values) {
    if (sizes && sizes->size() != weights.size())
        throw std::invalid_argument("make_catalog: sizes length mismatch");
    if (values && values->size() != weights.size())
        throw std::invalid_argument("make_catalog: values length mismatch");
    Catalog c;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        CatalogEntry e;
        e.name = "o" + std::to_string(k + 1);
        e.weight = weights[k];
        if (sizes) e.size = (*sizes)[k];
        if (values) e.value = (*values)[k];
        c.add(std::move(e));
    }
    return c;
}

DiscreteSampler::DiscreteSampler(const std::vector<double>& pmf) {
    if (pmf.empty()) throw std::invalid_argument("sampler: empty pmf");
    cumulative_.resize(pmf.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        if (pmf[k] < 0) throw std::invalid_argument("sampler: negative probability");
        acc += pmf[k];
        cumulative_[k] = acc;
    }
    if (acc <= 0.0) throw std::invalid_argument("sampler: zero total probability");
    // normalize in place so the draw can use U(0,1) directly
    for (auto& c : cumulative_) c /= acc;
    cumulative_.back() = 1.0;
}

ObjectId DiscreteSampler::operator()(std::mt19937_64& rng) const {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<ObjectId>(it - cumulative_.begin());
}

Trace generate_irm_trace(const Catalog& catalog, std::size_t r, std::uint64_t seed) {
    if (catalog.empty()) throw std::invalid_argument("generate_irm_trace: empty catalog");
    DiscreteSampler sample(catalog.pmf());
    std::mt19937_64 rng(seed);
    Trace t;
    t.catalog = catalog;
    t.requests.reserve(r);
    for (std::size_t i = 0; i < r; ++i) t.requests.push_back({sample(rng), kNoTime});
    return t;
}

Trace generate_prm_trace(const Catalog& catalog, std::size_t r, double total_rate,
                         std::uint64_t seed) {
    if (catalog.empty()) throw std::invalid_argument("generate_prm_trace: empty catalog");
    if (!(total_rate > 0)) throw std::invalid_argument("generate_prm_trace: rate must be > 0");
    DiscreteSampler sample(catalog.pmf());
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(total_rate);
    Trace t;
    t.catalog = catalog;
    t.requests.reserve(r);
    double now = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        now += gap(rng);
        t.requests.push_back({sample(rng), now});
    }
    return t;
}

Trace loop_trace(std::size_t n_objects, std::size_t r) {
    if (n_objects == 0) throw std::invalid_argument("loop_trace: n_objects must be >= 1");
    Trace t;
    t.catalog = make_catalog(std::vector<double>(n_objects, 1.0));
    t.requests.reserve(r);
    for (std::size_t i = 0; i < r; ++i)
        t.requests.push_back({static_cast<ObjectId>(i % n_objects), kNoTime});
    return t;
}

InitProbSampler zipf_init_sampler(std::size_t n, double beta, double scale) {
    auto pmf = zipf_pmf(n, beta);
    return [pmf, scale](std::mt19937_64& rng) {
        std::size_t rank = std::uniform_int_distribution<std::size_t>(0, pmf.size() - 1)(rng);
        return pmf[rank] * scale;
    };
}

std::vector<double> ChurnLog::pmf_at(std::size_t r, std::size_t final_size) const {
    std::vector<double> p(final_size, 0.0);
    std::copy(initial_pmf.begin(), initial_pmf.end(), p.begin());
    for (const auto& ev : events) {
        if (ev.request_index >= r) break;
        double keep = 1.0 - ev.p_init;
        for (std::size_t k = 0; k < final_size; ++k) p[k] *= keep;
        p[ev.object] = ev.p_init;
    }
    return p;
}

ChurnTrace generate_churn_trace(const ChurnModel& model, std::size_t r,
                                std::uint64_t seed) {
    if (model.p_new < 0 || model.p_new > 1)
        throw std::invalid_argument("churn: p_new must be in [0,1]");
    if (model.p_new > 0 && !model.init_prob)
        throw std::invalid_argument("churn: init_prob sampler required when p_new > 0");
    if (model.initial_catalog.empty())
        throw std::invalid_argument("churn: empty initial catalog");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    ChurnTrace out;
    out.trace.catalog = model.initial_catalog;
    out.log.p_new = model.p_new;
    out.log.initial_pmf = model.initial_catalog.pmf();
    out.trace.requests.reserve(r);

    // Every rescaling multiplies all live probabilities by the same factor, so
    // the objects' probabilities stay proportional to fixed weights assigned at
    // birth: w = p_init / decay-at-birth. Draws reduce to binary search over an
    // append-only cumulative sum.
    std::vector<double> cumulative = out.log.initial_pmf;
    for (std::size_t k = 1; k < cumulative.size(); ++k) cumulative[k] += cumulative[k - 1];
    double decay = 1.0;  // product of (1 - p_init) over events so far
    std::size_t new_count = 0;

    for (std::size_t i = 0; i < r; ++i) {
        if (model.p_new > 0 && uni(rng) < model.p_new) {
            double p_init = model.init_prob(rng);
            if (!(p_init > 0.0) || p_init >= 1.0)
                throw std::invalid_argument("churn: sampled p_init outside (0,1)");
            CatalogEntry entry;
            if (model.new_entry) {
                entry = model.new_entry(new_count);
            } else {
                entry.name = "n" + std::to_string(new_count + 1);
            }
            ++new_count;
            entry.weight = 0.0;  // popularity tracked by the churn log, not weights
            ObjectId id = out.trace.catalog.add(std::move(entry));
            decay *= 1.0 - p_init;
            if (decay < 1e-280)
                throw std::invalid_argument("churn: cumulative rescaling underflow");
            cumulative.push_back(cumulative.back() + p_init / decay);
            out.log.events.push_back({i, id, p_init});
            out.trace.requests.push_back({id, kNoTime});
        } else {
            double u = uni(rng) * cumulative.back();
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            if (it == cumulative.end()) --it;
            out.trace.requests.push_back(
                {static_cast<ObjectId>(it - cumulative.begin()), kNoTime});
        }
    }
    return out;
}

std::size_t sample_fill_time(const DiscreteSampler& sampler, std::size_t m,
                             std::mt19937_64& rng) {
    std::unordered_set<ObjectId> seen;
    std::size_t t = 0;
    while (seen.size() < m) {
        ++t;
        seen.insert(sampler(rng));
    }
    return t;
}

}  // namespace cachekit
