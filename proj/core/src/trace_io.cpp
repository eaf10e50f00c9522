#include "cachekit/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace cachekit {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, std::size_t line, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
    return v;
}

Bytes parse_size(const std::string& s, std::size_t line) {
    Bytes v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0)
        throw ParseError(line, "bad size '" + s + "' (positive integer bytes required)");
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

Trace load_trace(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    ++lineno;
    auto header = split_csv(trim(line));
    bool has_size = false, has_value = false;
    if (header.size() >= 2 && trim(header[0]) == "time" && trim(header[1]) == "object") {
        if (header.size() >= 3) {
            if (trim(header[2]) != "size") throw ParseError(1, "expected 'size' column");
            has_size = true;
        }
        if (header.size() >= 4) {
            if (trim(header[3]) != "value") throw ParseError(1, "expected 'value' column");
            has_value = true;
        }
        if (header.size() > 4) throw ParseError(1, "too many header columns");
    } else {
        throw ParseError(1, "header must start with 'time,object'");
    }

    Trace t;
    double prev_time = -1.0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty()) continue;
        auto fields = split_csv(stripped);
        if (fields.size() != header.size())
            throw ParseError(lineno, "expected " + std::to_string(header.size()) +
                                         " fields, got " + std::to_string(fields.size()));
        Request req;
        std::string time_s = trim(fields[0]);
        if (!time_s.empty()) {
            req.time = parse_double(time_s, lineno, "time");
            if (req.time < 0) throw ParseError(lineno, "negative time");
            if (req.time < prev_time) throw ParseError(lineno, "timestamps must be non-decreasing");
            prev_time = req.time;
        }
        std::string name = trim(fields[1]);
        if (name.empty()) throw ParseError(lineno, "empty object id");

        std::string size_s = has_size ? trim(fields[2]) : "";
        std::string value_s = has_value ? trim(fields[3]) : "";

        auto idx = t.catalog.find(name);
        if (idx < 0) {
            CatalogEntry e;
            e.name = name;
            e.weight = 0.0;
            if (has_size) {
                if (size_s.empty())
                    throw ParseError(lineno, "first occurrence of '" + name + "' without size");
                e.size = parse_size(size_s, lineno);
            }
            if (!value_s.empty()) {
                e.value = parse_double(value_s, lineno, "value");
                if (e.value < 0) throw ParseError(lineno, "negative value");
            }
            req.object = t.catalog.add(std::move(e));
        } else {
            req.object = static_cast<ObjectId>(idx);
            if (!size_s.empty() && parse_size(size_s, lineno) != t.catalog[req.object].size)
                throw ParseError(lineno, "size of '" + name + "' changed mid-trace");
            if (!value_s.empty() &&
                parse_double(value_s, lineno, "value") != t.catalog[req.object].value)
                throw ParseError(lineno, "value of '" + name + "' changed mid-trace");
        }
        // request counts double as the popularity weight of loaded catalogs
        t.catalog[req.object].weight += 1.0;
        t.requests.push_back(req);
    }
    return t;
}

Trace load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
    return load_trace(in);
}

void save_trace(const Trace& trace, std::ostream& out) {
    out << "time,object,size,value\n";
    std::vector<char> seen(trace.catalog.size(), 0);
    for (const auto& r : trace.requests) {
        const auto& e = trace.catalog[r.object];
        if (r.has_time()) out << format_double(r.time);
        out << ',' << e.name << ',';
        if (!seen[r.object]) {
            seen[r.object] = 1;
            out << e.size << ',' << format_double(e.value);
        } else {
            out << ',';
        }
        out << '\n';
    }
}

void save_trace_file(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    save_trace(trace, out);
}

}  // namespace cachekit
