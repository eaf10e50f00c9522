#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cachekit {

using ObjectId = std::uint32_t;   // dense index into a Catalog
using Bytes = std::uint64_t;

/// Thrown when an exact solver would exceed its configured state-space guard.
class ResourceLimitError : public std::runtime_error {
public:
    explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on malformed trace files; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct CatalogEntry {
    std::string name;     // external identifier, unique within a catalog
    Bytes size = 1;       // bytes, >= 1
    double value = 1.0;   // caching value, >= 0
    double weight = 1.0;  // unnormalized popularity, >= 0
};

/// Object universe. Entries are indexed densely; pmf() derives request
/// probabilities from the weights.
class Catalog {
public:
    Catalog() = default;

    explicit Catalog(std::vector<CatalogEntry> entries) {
        for (auto& e : entries) add(std::move(e));
    }

    ObjectId add(CatalogEntry entry) {
        if (entry.size < 1) throw std::invalid_argument("catalog: size must be >= 1");
        if (entry.value < 0) throw std::invalid_argument("catalog: value must be >= 0");
        if (entry.weight < 0) throw std::invalid_argument("catalog: weight must be >= 0");
        auto [it, inserted] = index_.emplace(entry.name, static_cast<ObjectId>(entries_.size()));
        if (!inserted) throw std::invalid_argument("catalog: duplicate id '" + entry.name + "'");
        entries_.push_back(std::move(entry));
        return it->second;
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const CatalogEntry& operator[](ObjectId k) const { return entries_[k]; }
    CatalogEntry& operator[](ObjectId k) { return entries_[k]; }

    const std::vector<CatalogEntry>& entries() const { return entries_; }

    /// -1 if the id is unknown.
    std::int64_t find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
    }

    /// Normalized request probabilities p_k = w_k / sum(w).
    std::vector<double> pmf() const {
        double total = 0.0;
        for (const auto& e : entries_) total += e.weight;
        if (total <= 0.0) throw std::invalid_argument("catalog: all weights are zero");
        std::vector<double> p(entries_.size());
        for (std::size_t k = 0; k < entries_.size(); ++k) p[k] = entries_[k].weight / total;
        return p;
    }

    std::vector<Bytes> sizes() const {
        std::vector<Bytes> s(entries_.size());
        for (std::size_t k = 0; k < entries_.size(); ++k) s[k] = entries_[k].size;
        return s;
    }

    std::vector<double> values() const {
        std::vector<double> v(entries_.size());
        for (std::size_t k = 0; k < entries_.size(); ++k) v[k] = entries_[k].value;
        return v;
    }

    Bytes total_bytes() const {
        Bytes t = 0;
        for (const auto& e : entries_) t += e.size;
        return t;
    }

private:
    std::vector<CatalogEntry> entries_;
    std::unordered_map<std::string, ObjectId> index_;
};

constexpr double kNoTime = std::numeric_limits<double>::quiet_NaN();

struct Request {
    ObjectId object = 0;
    double time = kNoTime;   // seconds; NaN when the trace carries no timestamps

    bool has_time() const { return !std::isnan(time); }
};

struct Trace {
    Catalog catalog;
    std::vector<Request> requests;

    std::size_t size() const { return requests.size(); }

    /// Checks referential integrity and timestamp monotonicity.
    void validate() const {
        double prev = -1.0;
        for (std::size_t i = 0; i < requests.size(); ++i) {
            const auto& r = requests[i];
            if (r.object >= catalog.size())
                throw std::invalid_argument("trace: request " + std::to_string(i) +
                                            " references unknown object");
            if (r.has_time()) {
                if (r.time < prev)
                    throw std::invalid_argument("trace: timestamps decrease at request " +
                                                std::to_string(i));
                prev = r.time;
            }
        }
    }
};

}  // namespace cachekit
