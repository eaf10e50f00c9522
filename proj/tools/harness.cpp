#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "cachekit/approx.hpp"
#include "cachekit/bounds.hpp"
#include "cachekit/chain.hpp"
#include "cachekit/lru_exact.hpp"
#include "cachekit/policy.hpp"
#include "cachekit/product_form.hpp"
#include "cachekit/sim.hpp"
#include "cachekit/trace_io.hpp"
#include "cachekit/ttl.hpp"
#include "cachekit/workload.hpp"

namespace cachekit::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// small utilities
// ---------------------------------------------------------------------------

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            if (start < s.size()) out.push_back(s.substr(start));
            return out;
        }
        if (pos > start) out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string format_value(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << "experiment,subject,capacity,metric,value,stderr,seed,rep,runtime_s,status\n";
    for (const auto& r : rows) {
        out << r.experiment << ',' << r.subject << ',' << r.capacity << ',' << r.metric << ',';
        if (r.status == "ok") out << format_value(r.value);
        out << ',';
        if (r.has_stderr) out << format_value(r.stderr_);
        out << ',' << r.seed << ',' << r.rep << ',' << format_value(r.runtime_s) << ','
            << r.status << '\n';
    }
}

json rows_to_json(const std::vector<ResultRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json j{{"experiment", r.experiment}, {"subject", r.subject},
               {"capacity", r.capacity},    {"metric", r.metric},
               {"seed", r.seed},            {"rep", r.rep},
               {"runtime_s", r.runtime_s},  {"status", r.status}};
        if (r.status == "ok") j["value"] = r.value;
        if (r.has_stderr) j["stderr"] = r.stderr_;
        arr.push_back(std::move(j));
    }
    return arr;
}

struct OutputOptions {
    std::string path;    // empty = stdout
    std::string format = "csv";
};

int emit(const std::vector<ResultRow>& rows, const json& manifest,
         const OutputOptions& opt, std::ostream& stdout_stream) {
    if (opt.format != "csv" && opt.format != "json")
        throw CLI::ValidationError("--format must be csv or json");
    if (opt.path.empty()) {
        if (opt.format == "csv") {
            write_csv(rows, stdout_stream);
        } else {
            json doc{{"manifest", manifest}, {"rows", rows_to_json(rows)}};
            stdout_stream << doc.dump(2) << '\n';
        }
    } else {
        std::ofstream f(opt.path);
        if (!f) throw std::runtime_error("cannot open output file '" + opt.path + "'");
        if (opt.format == "csv") {
            write_csv(rows, f);
        } else {
            json doc{{"manifest", manifest}, {"rows", rows_to_json(rows)}};
            f << doc.dump(2) << '\n';
        }
        std::ofstream mf(opt.path + ".manifest.json");
        mf << manifest.dump(2) << '\n';
    }
    for (const auto& r : rows)
        if (r.status != "ok") return 3;
    return 0;
}

// ---------------------------------------------------------------------------
// workload construction shared by several subcommands
// ---------------------------------------------------------------------------

struct WorkloadSpec {
    std::string trace_path;
    std::size_t catalog = 1000;
    double zipf_beta = 0.8;
    std::string sizes = "unit";    // unit | lognormal:MU,SIGMA
    std::string values = "unit";
    std::string kind = "irm";      // irm | prm | loop | churn
    std::size_t requests = 100000;
    double rate = 1000.0;          // prm total request rate
    double churn_p_new = 0.01;
    double churn_init_beta = 1.0;
    double churn_init_scale = 0.1;
    std::uint64_t seed = 1;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--trace", trace_path, "read requests from a trace CSV");
        cmd->add_option("--catalog", catalog, "number of objects for generated workloads");
        cmd->add_option("--zipf", zipf_beta, "Zipf shape of the popularity");
        cmd->add_option("--sizes", sizes, "unit | lognormal:MU,SIGMA (x1000 bytes)");
        cmd->add_option("--values", values, "unit | lognormal:MU,SIGMA");
        cmd->add_option("--kind", kind, "irm | prm | loop | churn");
        cmd->add_option("--requests,-r", requests, "trace length");
        cmd->add_option("--rate", rate, "total request rate for --kind prm [1/s]");
        cmd->add_option("--churn-pnew", churn_p_new, "new-object probability per request");
        cmd->add_option("--churn-init-beta", churn_init_beta,
                        "Zipf shape of new-object initial probabilities");
        cmd->add_option("--churn-init-scale", churn_init_scale,
                        "scale of new-object initial probabilities");
        cmd->add_option("--seed", seed, "master seed");
    }

    Catalog build_catalog(std::uint64_t catalog_seed) const {
        auto weights = zipf_pmf(catalog, zipf_beta);
        std::optional<std::vector<Bytes>> size_vec;
        std::optional<std::vector<double>> value_vec;
        auto parse_lognormal = [](const std::string& spec, double* mu, double* sigma) {
            auto parts = split(spec.substr(10), ',');
            if (spec.rfind("lognormal:", 0) != 0 || parts.size() != 2)
                throw CLI::ValidationError("expected unit or lognormal:MU,SIGMA");
            *mu = std::stod(parts[0]);
            *sigma = std::stod(parts[1]);
        };
        if (sizes != "unit") {
            double mu, sigma;
            parse_lognormal(sizes, &mu, &sigma);
            size_vec = lognormal_sizes(catalog, mu, sigma, catalog_seed ^ 0x51ul);
        }
        if (values != "unit") {
            double mu, sigma;
            parse_lognormal(values, &mu, &sigma);
            value_vec = lognormal_values(catalog, mu, sigma, catalog_seed ^ 0x52ul);
        }
        return make_catalog(weights, size_vec ? &*size_vec : nullptr,
                            value_vec ? &*value_vec : nullptr);
    }

    /// Returns the trace plus, for churn workloads, the event log.
    std::pair<Trace, std::optional<ChurnLog>> build(std::uint64_t use_seed) const {
        if (!trace_path.empty()) return {load_trace_file(trace_path), std::nullopt};
        if (kind == "loop") return {loop_trace(catalog, requests), std::nullopt};
        auto cat = build_catalog(use_seed);
        if (kind == "irm") return {generate_irm_trace(cat, requests, use_seed), std::nullopt};
        if (kind == "prm")
            return {generate_prm_trace(cat, requests, rate, use_seed), std::nullopt};
        if (kind == "churn") {
            ChurnModel model;
            model.p_new = churn_p_new;
            model.initial_catalog = cat;
            model.init_prob = zipf_init_sampler(catalog, churn_init_beta, churn_init_scale);
            auto ct = generate_churn_trace(model, requests, use_seed);
            return {std::move(ct.trace), std::move(ct.log)};
        }
        throw CLI::ValidationError("unknown workload kind '" + kind + "'");
    }

    json manifest() const {
        return json{{"trace", trace_path},
                    {"kind", kind},
                    {"catalog", catalog},
                    {"zipf", zipf_beta},
                    {"sizes", sizes},
                    {"values", values},
                    {"requests", requests},
                    {"rate", rate},
                    {"churn_pnew", churn_p_new},
                    {"churn_init_beta", churn_init_beta},
                    {"churn_init_scale", churn_init_scale},
                    {"seed", seed}};
    }
};

json base_manifest(const std::string& subcommand, const std::vector<std::string>& args) {
    return json{{"tool", "cachekit"},
                {"version", kVersion},
                {"subcommand", subcommand},
                {"args", args}};
}

/// Runs independent cells on a small worker pool; results keep cell order.
template <typename Fn>
std::vector<std::vector<ResultRow>> run_cells(std::size_t n_cells, std::size_t workers,
                                              Fn&& fn) {
    std::vector<std::vector<ResultRow>> out(n_cells);
    if (workers <= 1 || n_cells <= 1) {
        for (std::size_t i = 0; i < n_cells; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::size_t n_threads = std::min(workers, n_cells);
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n_cells) return;
                out[i] = fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

std::optional<TtlFlag> parse_ttl_flag(const std::string& spec) {
    if (spec.empty()) return std::nullopt;
    auto parts = split(spec, ':');
    if (parts.size() != 2) throw CLI::ValidationError("--ttl expects DISCIPLINE:DT");
    TtlFlag f;
    if (parts[0] == "miss")
        f.discipline = TtlDiscipline::RESET_PER_MISS;
    else if (parts[0] == "req")
        f.discipline = TtlDiscipline::RESET_PER_REQUEST;
    else if (parts[0] == "periodic")
        f.discipline = TtlDiscipline::PERIODIC;
    else
        throw CLI::ValidationError("--ttl discipline must be miss|req|periodic");
    f.delta_t = std::stod(parts[1]);
    return f;
}

TtlDiscipline parse_discipline(const std::string& s) {
    if (s == "miss") return TtlDiscipline::RESET_PER_MISS;
    if (s == "req") return TtlDiscipline::RESET_PER_REQUEST;
    if (s == "periodic") return TtlDiscipline::PERIODIC;
    throw CLI::ValidationError("discipline must be miss|req|periodic");
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) out.push_back(std::stod(tok));
    return out;
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

struct CommonOut {
    OutputOptions output;
    std::size_t workers = 1;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--out,-o", output.path, "output file (stdout when omitted)");
        cmd->add_option("--format", output.format, "csv | json");
        cmd->add_option("--workers", workers, "parallel cells");
    }
};

int cmd_gen(const WorkloadSpec& wl, const std::string& out_path,
            const std::vector<std::string>& args, std::ostream& out) {
    auto [trace, log] = wl.build(wl.seed);
    if (out_path.empty()) {
        save_trace(trace, out);
    } else {
        save_trace_file(trace, out_path);
        json manifest = base_manifest("gen", args);
        manifest["workload"] = wl.manifest();
        std::ofstream mf(out_path + ".manifest.json");
        mf << manifest.dump(2) << '\n';
    }
    return 0;
}

int cmd_sim(const WorkloadSpec& wl, const CommonOut& common, const std::string& policies,
            const std::string& capacities, int reps, double warmup,
            const std::string& ttl_spec, std::size_t series_window,
            const std::vector<std::string>& args, std::ostream& out) {
    auto caps = parse_capacity_list(capacities);
    auto policy_specs = split(policies, ',');
    if (policy_specs.empty()) throw CLI::ValidationError("--policy list is empty");
    auto ttl = parse_ttl_flag(ttl_spec);

    struct Cell {
        std::size_t policy_i, cap_i;
        int rep;
    };
    std::vector<Cell> cells;
    for (std::size_t p = 0; p < policy_specs.size(); ++p)
        for (std::size_t c = 0; c < caps.size(); ++c)
            for (int r = 0; r < reps; ++r) cells.push_back({p, c, r});

    auto results = run_cells(cells.size(), common.workers, [&](std::size_t i) {
        const auto& cell = cells[i];
        std::uint64_t seed =
            cell_seed(wl.seed, cell.policy_i, cell.cap_i, static_cast<std::uint64_t>(cell.rep));
        std::vector<ResultRow> rows;
        Timer timer;
        ResultRow base;
        base.experiment = "sim";
        base.subject = policy_specs[cell.policy_i];
        base.capacity = caps[cell.cap_i];
        base.seed = seed;
        base.rep = cell.rep;
        try {
            auto cfg = parse_policy(policy_specs[cell.policy_i]);
            cfg.seed = seed;
            auto [trace, log] = wl.build(seed);
            SimOptions o;
            o.warmup_fraction = warmup;
            o.ttl = ttl;
            o.hit_series_window = series_window;
            auto rep = simulate(cfg, trace, caps[cell.cap_i], o);
            base.runtime_s = timer.seconds();
            auto push = [&](const char* metric, double v, bool stat) {
                ResultRow r = base;
                r.metric = metric;
                r.value = v;
                if (stat) {
                    r.stderr_ = rep.ohr_stderr();
                    r.has_stderr = true;
                }
                rows.push_back(std::move(r));
            };
            push("ohr", rep.ohr, true);
            push("bhr", rep.bhr, true);
            push("vhr", rep.vhr, true);
            push("upload_ratio", upload_ratio(rep), true);
            push("throughput", rep.throughput, false);
        } catch (const ResourceLimitError& e) {
            base.runtime_s = timer.seconds();
            base.metric = "ohr";
            base.status = std::string("skipped: resource-limit: ") + e.what();
            rows.push_back(base);
        }
        return rows;
    });

    std::vector<ResultRow> rows;
    for (auto& rv : results) rows.insert(rows.end(), rv.begin(), rv.end());
    json manifest = base_manifest("sim", args);
    manifest["workload"] = wl.manifest();
    manifest["policies"] = policy_specs;
    manifest["capacities"] = caps;
    manifest["reps"] = reps;
    manifest["warmup"] = warmup;
    manifest["cell_seed"] = "splitmix64(master ^ policy_index, capacity_index, rep)";
    return emit(rows, manifest, common.output, out);
}

int cmd_sweep(const WorkloadSpec& wl, const CommonOut& common, const std::string& policies,
              const std::string& capacities, double warmup, bool with_2d_bounds,
              const std::vector<std::string>& args, std::ostream& out) {
    auto caps = parse_capacity_list(capacities);
    auto policy_specs = split(policies, ',');
    auto [trace, churn_log] = wl.build(wl.seed);
    bool unit_sizes = true;
    for (const auto& e : trace.catalog.entries())
        if (e.size != 1) unit_sizes = false;

    std::vector<ResultRow> rows;
    auto add = [&](const std::string& subject, Bytes cap, const char* metric, double v,
                   double se = -1.0) {
        ResultRow r;
        r.experiment = "sweep";
        r.subject = subject;
        r.capacity = cap;
        r.metric = metric;
        r.value = v;
        r.seed = wl.seed;
        if (se >= 0) {
            r.stderr_ = se;
            r.has_stderr = true;
        }
        rows.push_back(std::move(r));
    };

    // policies: stack fast path where valid, per-capacity simulation otherwise
    for (const auto& spec : policy_specs) {
        auto cfg = parse_policy(spec);
        if (cfg.kind == PolicyKind::LRU || cfg.kind == PolicyKind::LFU) {
            auto reports = hrc_sweep_stack(cfg.kind, trace, caps, warmup);
            for (std::size_t c = 0; c < caps.size(); ++c) {
                add(spec, caps[c], "ohr", reports[c].ohr, reports[c].ohr_stderr());
                add(spec, caps[c], "bhr", reports[c].bhr);
                add(spec, caps[c], "vhr", reports[c].vhr);
            }
        } else {
            auto results = run_cells(caps.size(), common.workers, [&](std::size_t c) {
                auto cell_cfg = cfg;
                cell_cfg.seed = cell_seed(wl.seed, 1000, c, 0);
                SimOptions o;
                o.warmup_fraction = warmup;
                auto rep = simulate(cell_cfg, trace, caps[c], o);
                std::vector<ResultRow> rv;
                ResultRow r;
                r.experiment = "sweep";
                r.subject = spec;
                r.capacity = caps[c];
                r.seed = cell_cfg.seed;
                r.metric = "ohr";
                r.value = rep.ohr;
                r.stderr_ = rep.ohr_stderr();
                r.has_stderr = true;
                rv.push_back(r);
                r.metric = "bhr";
                r.value = rep.bhr;
                r.has_stderr = false;
                rv.push_back(r);
                r.metric = "vhr";
                r.value = rep.vhr;
                rv.push_back(r);
                return rv;
            });
            for (auto& rv : results) rows.insert(rows.end(), rv.begin(), rv.end());
        }
    }

    // analytic columns
    auto pmf = trace.catalog.pmf();
    auto sizes = trace.catalog.sizes();
    auto values = trace.catalog.values();
    for (Bytes cap : caps) {
        if (churn_log) {
            auto dyn = dynamic_popularity_bound(*churn_log, trace.size(), sizes, values, cap);
            add("dynamic_bound", cap, "bound_hi", dyn.vhr_bound);
        } else {
            add("static_bound", cap, "bound_hi", static_knapsack_bound(pmf, sizes, values, cap).vhr_bound);
        }
        if (unit_sizes && cap >= 1 && cap <= pmf.size()) {
            auto m = static_cast<std::size_t>(cap);
            if (m < pmf.size()) {
                add("che", cap, "ohr", che_lru(pmf, m).hit_ratio);
                add("fagin", cap, "ohr", fagin_lru(pmf, m).hit_ratio);
                add("fifo_approx", cap, "ohr", fifo_approx(pmf, m).hit_ratio);
            }
            add("product_form", cap, "ohr", product_form_hit_ratio(pmf, m));
        }
    }
    if (with_2d_bounds) {
        auto trimmed = trim_trace(trace, 0.1, 0.1);
        for (Bytes cap : caps) {
            auto rep = knapsack_2d_bounds(trimmed, cap);
            add("knapsack2d", cap, "bound_lo", rep.vhr_lower);
            add("knapsack2d", cap, "bound_hi", rep.vhr_upper);
        }
    }

    json manifest = base_manifest("sweep", args);
    manifest["workload"] = wl.manifest();
    manifest["policies"] = policy_specs;
    manifest["capacities"] = caps;
    manifest["warmup"] = warmup;
    return emit(rows, manifest, common.output, out);
}

int cmd_exact(const CommonOut& common, const std::string& pmf_spec, std::size_t catalog,
              double zipf_beta, const std::string& sizes_spec, const std::string& values_spec,
              Bytes capacity, const std::string& policies, const std::string& levels_spec,
              const std::string& admit_spec, std::size_t guard,
              const std::vector<std::string>& args, std::ostream& out) {
    std::vector<double> pmf =
        pmf_spec.empty() ? zipf_pmf(catalog, zipf_beta) : parse_double_list(pmf_spec);
    std::vector<Bytes> sizes(pmf.size(), 1);
    if (!sizes_spec.empty() && sizes_spec != "unit") {
        sizes.clear();
        for (const auto& tok : split(sizes_spec, ',')) sizes.push_back(std::stoull(tok));
        if (sizes.size() != pmf.size())
            throw CLI::ValidationError("--sizes length must match the pmf");
    }
    std::vector<double> values(pmf.size(), 1.0);
    if (!values_spec.empty() && values_spec != "unit") {
        values = parse_double_list(values_spec);
        if (values.size() != pmf.size())
            throw CLI::ValidationError("--values length must match the pmf");
    }
    bool unit_sizes = std::all_of(sizes.begin(), sizes.end(), [](Bytes s) { return s == 1; });

    std::vector<ResultRow> rows;
    bool partial = false;
    auto add = [&](const std::string& subject, const char* metric, double v) {
        ResultRow r;
        r.experiment = "exact";
        r.subject = subject;
        r.capacity = capacity;
        r.metric = metric;
        r.value = v;
        rows.push_back(std::move(r));
    };
    auto skip = [&](const std::string& subject, const std::string& why) {
        ResultRow r;
        r.experiment = "exact";
        r.subject = subject;
        r.capacity = capacity;
        r.metric = "ohr";
        r.status = "skipped: " + why;
        rows.push_back(std::move(r));
        partial = true;
    };

    LruExactOptions guard_opt;
    guard_opt.max_objects = guard;
    try {
        auto r = lru_exact_variable_size(pmf, sizes, capacity, values, guard_opt);
        add("lru_exact", "ohr", r.ohr);
        add("lru_exact", "bhr", r.bhr);
        add("lru_exact", "vhr", r.vhr);
    } catch (const ResourceLimitError& e) {
        skip("lru_exact", std::string("resource-limit: ") + e.what());
    }
    if (unit_sizes && capacity <= pmf.size())
        add("product_form", "ohr",
            product_form_hit_ratio(pmf, static_cast<std::size_t>(capacity)));

    for (const auto& spec : split(policies, ',')) {
        ChainSpec chain;
        chain.policy = parse_policy(spec);
        chain.pmf = pmf;
        chain.sizes = sizes;
        chain.values = values;
        chain.capacity = capacity;
        try {
            auto r = brute_force_chain(chain);
            add("chain:" + spec, "ohr", r.ohr);
            add("chain:" + spec, "bhr", r.bhr);
            add("chain:" + spec, "vhr", r.vhr);
            add("chain:" + spec, "states", static_cast<double>(r.recurrent_states));
        } catch (const ResourceLimitError& e) {
            skip("chain:" + spec, std::string("resource-limit: ") + e.what());
        }
    }

    if (!levels_spec.empty()) {
        MultiLevelProblem prob;
        prob.pmf = pmf;
        for (const auto& tok : split(levels_spec, ',')) prob.levels.push_back(std::stoull(tok));
        try {
            add("multilevel", "ohr", multilevel_product_form(prob));
        } catch (const ResourceLimitError& e) {
            skip("multilevel", std::string("resource-limit: ") + e.what());
        }
    }
    if (!admit_spec.empty()) {
        auto q = parse_double_list(admit_spec);
        auto gamma = probabilistic_substitution(pmf, q);
        if (unit_sizes) {
            try {
                add("gamma_lru", "ohr",
                    lru_exact_hit_ratio_weighted(gamma, pmf, static_cast<std::size_t>(capacity),
                                                 guard_opt));
                add("gamma_product_form", "ohr",
                    product_form_hit_ratio_weighted(gamma, pmf,
                                                    static_cast<std::size_t>(capacity)));
            } catch (const ResourceLimitError& e) {
                skip("gamma_lru", std::string("resource-limit: ") + e.what());
            }
        }
    }

    json manifest = base_manifest("exact", args);
    manifest["pmf"] = pmf;
    manifest["sizes"] = sizes;
    manifest["values"] = values;
    manifest["capacity"] = capacity;
    int rc = emit(rows, manifest, common.output, out);
    return partial ? 3 : rc;
}

int cmd_approx(const CommonOut& common, const std::string& pmf_spec, std::size_t catalog,
               double zipf_beta, const std::string& capacities, const std::string& fill_r,
               const std::vector<std::string>& args, std::ostream& out) {
    std::vector<double> pmf =
        pmf_spec.empty() ? zipf_pmf(catalog, zipf_beta) : parse_double_list(pmf_spec);
    auto caps = parse_capacity_list(capacities);
    std::vector<ResultRow> rows;
    auto add = [&](const char* subject, Bytes cap, const char* metric, double v) {
        ResultRow r;
        r.experiment = "approx";
        r.subject = subject;
        r.capacity = cap;
        r.metric = metric;
        r.value = v;
        rows.push_back(std::move(r));
    };
    for (Bytes cap : caps) {
        auto m = static_cast<std::size_t>(cap);
        if (m < 1 || m > pmf.size())
            throw CLI::ValidationError("capacity must be in [1, N] for approximations");
        auto che = che_lru(pmf, m);
        add("che", cap, "ohr", che.hit_ratio);
        add("che", cap, "t_che", che.root);
        auto fag = fagin_lru(pmf, m);
        add("fagin", cap, "ohr", fag.hit_ratio);
        add("fagin", cap, "ct", fag.root);
        auto ff = fifo_approx(pmf, m);
        add("fifo_approx", cap, "ohr", ff.hit_ratio);
        add("fifo_approx", cap, "delta_fifo", ff.root);
    }
    if (!fill_r.empty())
        for (const auto& tok : split(fill_r, ','))
            add("fill_bound", std::stoull(tok), "hit_bound",
                filling_phase_hit_bound(pmf, std::stoull(tok)));
    json manifest = base_manifest("approx", args);
    manifest["catalog"] = pmf.size();
    manifest["capacities"] = caps;
    return emit(rows, manifest, common.output, out);
}

int cmd_bounds(const WorkloadSpec& wl, const CommonOut& common, const std::string& capacities,
               double trim_head, double trim_tail, bool run_exhaustive,
               const std::vector<std::string>& args, std::ostream& out) {
    auto caps = parse_capacity_list(capacities);
    auto [raw, churn_log] = wl.build(wl.seed);
    auto trace = (trim_head > 0 || trim_tail > 0) ? trim_trace(raw, trim_head, trim_tail) : raw;
    bool unit_sizes = true;
    for (const auto& e : trace.catalog.entries())
        if (e.size != 1) unit_sizes = false;

    std::vector<ResultRow> rows;
    bool partial = false;
    auto add = [&](const char* subject, Bytes cap, const char* metric, double v) {
        ResultRow r;
        r.experiment = "bounds";
        r.subject = subject;
        r.capacity = cap;
        r.metric = metric;
        r.value = v;
        r.seed = wl.seed;
        rows.push_back(std::move(r));
    };
    for (Bytes cap : caps) {
        Timer timer;
        auto rep = knapsack_2d_bounds(trace, cap);
        add("knapsack2d", cap, "bound_lo", rep.vhr_lower);
        add("knapsack2d", cap, "bound_hi", rep.vhr_upper);
        add("knapsack2d", cap, "v_total", rep.v_total);
        rows.back().runtime_s = timer.seconds();
        if (unit_sizes) {
            auto b = belady(trace, static_cast<std::size_t>(cap));
            add("belady", cap, "hits", static_cast<double>(b.hits));
            add("belady", cap, "ohr", b.hit_ratio);
        }
        if (run_exhaustive) {
            try {
                add("exhaustive", cap, "v_max", exhaustive_offline_optimum(trace, cap));
            } catch (const ResourceLimitError& e) {
                ResultRow r;
                r.experiment = "bounds";
                r.subject = "exhaustive";
                r.capacity = cap;
                r.metric = "v_max";
                r.status = std::string("skipped: resource-limit: ") + e.what();
                rows.push_back(std::move(r));
                partial = true;
            }
        }
    }
    json manifest = base_manifest("bounds", args);
    manifest["workload"] = wl.manifest();
    manifest["capacities"] = caps;
    manifest["trim"] = {trim_head, trim_tail};
    int rc = emit(rows, manifest, common.output, out);
    return partial ? 3 : rc;
}

int cmd_ttl(const CommonOut& common, const std::string& lambdas_spec, std::size_t catalog,
            double zipf_beta, double rate, const std::string& dts, const std::string& disc_spec,
            double target_hit, double target_occ, std::uint64_t mc_cycles, std::uint64_t seed,
            const std::vector<std::string>& args, std::ostream& out) {
    RateModel model;
    if (!lambdas_spec.empty()) {
        model.lambdas = parse_double_list(lambdas_spec);
    } else {
        auto pmf = zipf_pmf(catalog, zipf_beta);
        model.lambdas.resize(pmf.size());
        for (std::size_t k = 0; k < pmf.size(); ++k) model.lambdas[k] = rate * pmf[k];
    }
    auto disc = parse_discipline(disc_spec);
    std::vector<ResultRow> rows;
    auto add = [&](const char* subject, const char* metric, double v, double se = -1.0) {
        ResultRow r;
        r.experiment = "ttl";
        r.subject = subject;
        r.metric = metric;
        r.value = v;
        r.seed = seed;
        if (se >= 0) {
            r.stderr_ = se;
            r.has_stderr = true;
        }
        rows.push_back(std::move(r));
    };
    for (const auto& tok : split(dts, ',')) {
        double dt = std::stod(tok);
        add("formula", "hit_ratio", ttl_hit_aggregate(model, disc, dt));
        auto occ = ttl_occupancy(model, disc, dt, mc_cycles, seed);
        add("occupancy", "objects", occ.expected, occ.stderr_ > 0 ? occ.stderr_ : -1.0);
        if (model.lambdas.size() == 1) {
            auto sim = simulate_ttl_hit_ratio(model.lambdas[0], dt, disc, mc_cycles, seed);
            add("event_sim", "hit_ratio", sim.hit_ratio, sim.stderr_);
        }
    }
    if (target_hit >= 0)
        add("adapt", "delta_t", ttl_adapt(model, {TtlTarget::HIT_RATIO, target_hit}, disc));
    if (target_occ >= 0)
        add("adapt", "delta_t", ttl_adapt(model, {TtlTarget::OCCUPANCY, target_occ}, disc));
    json manifest = base_manifest("ttl", args);
    manifest["lambdas"] = model.lambdas.size();
    manifest["discipline"] = disc_spec;
    return emit(rows, manifest, common.output, out);
}

int cmd_bench(const WorkloadSpec& wl, const CommonOut& common, const std::string& policies,
              Bytes capacity, int reps, const std::vector<std::string>& args,
              std::ostream& out, std::ostream& err) {
#ifndef NDEBUG
    err << "warning: benchmarking a non-release build\n";
#endif
    if (reps < 5) reps = 5;
    auto [trace, log] = wl.build(wl.seed);
    auto policy_specs = split(policies, ',');
    std::vector<ResultRow> rows;
    std::vector<double> medians;
    for (std::size_t p = 0; p < policy_specs.size(); ++p) {
        auto cfg = parse_policy(policy_specs[p]);
        cfg.seed = cell_seed(wl.seed, p, 0, 0);
        std::vector<double> samples;
        for (int r = 0; r < reps; ++r) {
            SimOptions o;
            o.warmup_fraction = 0.0;
            auto rep = simulate(cfg, trace, capacity, o);
            samples.push_back(rep.throughput);
        }
        std::sort(samples.begin(), samples.end());
        double median = samples[samples.size() / 2];
        medians.push_back(median);
        ResultRow row;
        row.experiment = "bench";
        row.subject = policy_specs[p];
        row.capacity = capacity;
        row.metric = "throughput";
        row.value = median;
        row.seed = cfg.seed;
        rows.push_back(std::move(row));
    }
    // soft expectation: fifo >= sgc >= lru >= lfu where those policies appear
    auto median_of = [&](const std::string& name) -> double {
        for (std::size_t p = 0; p < policy_specs.size(); ++p)
            if (policy_specs[p].rfind(name, 0) == 0) return medians[p];
        return -1.0;
    };
    std::vector<std::pair<std::string, double>> ordering;
    for (const char* n : {"fifo", "sgc", "lru", "lfu"}) {
        double v = median_of(n);
        if (v >= 0) ordering.emplace_back(n, v);
    }
    for (std::size_t i = 1; i < ordering.size(); ++i)
        if (ordering[i].second > ordering[i - 1].second)
            err << "warning: update-speed ordering " << ordering[i - 1].first
                << " >= " << ordering[i].first << " does not hold on this run\n";
    json manifest = base_manifest("bench", args);
    manifest["workload"] = wl.manifest();
    manifest["policies"] = policy_specs;
    manifest["reps"] = reps;
    return emit(rows, manifest, common.output, out);
}

}  // namespace

std::vector<Bytes> parse_capacity_list(const std::string& spec) {
    std::vector<Bytes> caps;
    if (spec.rfind("log:", 0) == 0 || spec.rfind("lin:", 0) == 0) {
        auto parts = split(spec.substr(4), ':');
        if (parts.size() != 3)
            throw std::invalid_argument("capacity grid: expected log:LO:HI:N or lin:LO:HI:N");
        double lo = std::stod(parts[0]);
        double hi = std::stod(parts[1]);
        std::size_t n = std::stoull(parts[2]);
        if (n < 1 || lo <= 0 || hi < lo)
            throw std::invalid_argument("capacity grid: need 0 < LO <= HI and N >= 1");
        for (std::size_t i = 0; i < n; ++i) {
            double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
            double v = spec[1] == 'o' ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
            caps.push_back(static_cast<Bytes>(std::llround(v)));
        }
    } else {
        for (const auto& tok : split(spec, ','))
            caps.push_back(std::stoull(tok));
    }
    std::sort(caps.begin(), caps.end());
    caps.erase(std::unique(caps.begin(), caps.end()), caps.end());
    if (caps.empty()) throw std::invalid_argument("capacity list is empty");
    return caps;
}

std::uint64_t cell_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                        std::uint64_t c) {
    std::uint64_t x = master ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xbf58476d1ce4e5b9ULL) ^
                      (c * 0x94d049bb133111ebULL);
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"cache performance workbench: simulation, exact solvers, "
                 "approximations, offline bounds and TTL analysis"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a trace file");
    WorkloadSpec gen_wl;
    std::string gen_out;
    gen_wl.add_options(gen);
    gen->add_option("--out,-o", gen_out, "trace file path (stdout when omitted)");

    // sim
    auto* sim = app.add_subcommand("sim", "trace-driven policy simulation");
    WorkloadSpec sim_wl;
    CommonOut sim_out;
    std::string sim_policies = "lru";
    std::string sim_caps = "64";
    int sim_reps = 1;
    double sim_warmup = 0.1;
    std::string sim_ttl;
    std::size_t sim_series = 0;
    sim_wl.add_options(sim);
    sim_out.add_options(sim);
    sim->add_option("--policy", sim_policies, "comma list of policy specs");
    sim->add_option("--capacity", sim_caps, "capacity list or grid");
    sim->add_option("--reps", sim_reps, "replications per cell")->check(CLI::PositiveNumber);
    sim->add_option("--warmup", sim_warmup, "warmup fraction excluded from counters");
    sim->add_option("--ttl", sim_ttl, "TTL invalidation flag DISCIPLINE:DT");
    sim->add_option("--series-window", sim_series, "hit-rate series window (0 = off)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "hit-ratio curves with analytic columns");
    WorkloadSpec sweep_wl;
    CommonOut sweep_out;
    std::string sweep_policies = "lru,lfu";
    std::string sweep_caps = "log:16:4096:9";
    double sweep_warmup = 0.1;
    bool sweep_bounds = false;
    sweep_wl.add_options(sweep);
    sweep_out.add_options(sweep);
    sweep->add_option("--policy", sweep_policies, "comma list of policy specs");
    sweep->add_option("--capacity", sweep_caps, "capacity list or grid");
    sweep->add_option("--warmup", sweep_warmup, "warmup fraction");
    sweep->add_flag("--bounds", sweep_bounds, "add trimmed 2D-knapsack bound rows");

    // exact
    auto* exact = app.add_subcommand("exact", "exact steady-state solvers and chains");
    CommonOut exact_out;
    std::string exact_pmf, exact_sizes, exact_values, exact_policies = "lru,fifo,cpr,random";
    std::string exact_levels, exact_admit;
    std::size_t exact_catalog = 8;
    double exact_beta = 1.0;
    Bytes exact_capacity = 2;
    std::size_t exact_guard = 12;
    exact_out.add_options(exact);
    exact->add_option("--pmf", exact_pmf, "explicit pmf, comma separated");
    exact->add_option("--catalog", exact_catalog, "catalog size for a Zipf pmf");
    exact->add_option("--zipf", exact_beta, "Zipf shape");
    exact->add_option("--sizes", exact_sizes, "unit or comma list of byte sizes");
    exact->add_option("--values", exact_values, "unit or comma list of values");
    exact->add_option("--capacity", exact_capacity, "cache size in bytes");
    exact->add_option("--policy", exact_policies, "chains to solve");
    exact->add_option("--levels", exact_levels, "multi-level sizes l1,l2,...");
    exact->add_option("--admit-q", exact_admit, "per-object admission probabilities");
    exact->add_option("--guard", exact_guard, "object-count guard for the exact LRU solver");

    // approx
    auto* approx = app.add_subcommand("approx", "closed-form approximations");
    CommonOut approx_out;
    std::string approx_pmf, approx_caps = "8", approx_fill;
    std::size_t approx_catalog = 64;
    double approx_beta = 1.0;
    approx_out.add_options(approx);
    approx->add_option("--pmf", approx_pmf, "explicit pmf");
    approx->add_option("--catalog", approx_catalog, "catalog size for a Zipf pmf");
    approx->add_option("--zipf", approx_beta, "Zipf shape");
    approx->add_option("--capacity", approx_caps, "capacity list or grid");
    approx->add_option("--fill-r", approx_fill, "request indices for the filling bound");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "clairvoyant caching bounds");
    WorkloadSpec bounds_wl;
    CommonOut bounds_out;
    std::string bounds_caps = "64";
    double bounds_trim_head = 0.1, bounds_trim_tail = 0.1;
    bool bounds_exhaustive = false;
    bounds_wl.add_options(bounds);
    bounds_out.add_options(bounds);
    bounds->add_option("--capacity", bounds_caps, "capacity list or grid");
    bounds->add_option("--trim-head", bounds_trim_head, "head fraction to drop");
    bounds->add_option("--trim-tail", bounds_trim_tail, "tail fraction to drop");
    bounds->add_flag("--exhaustive", bounds_exhaustive, "also search the exact optimum (guarded)");

    // ttl
    auto* ttl = app.add_subcommand("ttl", "TTL hit ratios, occupancy and adaptation");
    CommonOut ttl_out;
    std::string ttl_lambdas, ttl_dts = "1.0", ttl_disc = "req";
    std::size_t ttl_catalog = 100;
    double ttl_beta = 0.8, ttl_rate = 100.0;
    double ttl_target_hit = -1.0, ttl_target_occ = -1.0;
    std::uint64_t ttl_cycles = 100000, ttl_seed = 1;
    ttl_out.add_options(ttl);
    ttl->add_option("--lambda", ttl_lambdas, "explicit per-object rates");
    ttl->add_option("--catalog", ttl_catalog, "catalog size for Zipf rates");
    ttl->add_option("--zipf", ttl_beta, "Zipf shape of the rates");
    ttl->add_option("--rate", ttl_rate, "total request rate [1/s]");
    ttl->add_option("--dt", ttl_dts, "TTL values, comma separated [s]");
    ttl->add_option("--discipline", ttl_disc, "miss | req | periodic");
    ttl->add_option("--target-hit", ttl_target_hit, "adapt dt to this aggregate hit ratio");
    ttl->add_option("--target-occupancy", ttl_target_occ, "adapt dt to this expected occupancy");
    ttl->add_option("--mc-cycles", ttl_cycles, "Monte Carlo cycles");
    ttl->add_option("--seed", ttl_seed, "Monte Carlo seed");

    // bench
    auto* bench = app.add_subcommand("bench", "policy update-speed measurement");
    WorkloadSpec bench_wl;
    CommonOut bench_out;
    std::string bench_policies = "fifo,sgc,lru,lfu";
    Bytes bench_capacity = 1024;
    int bench_reps = 5;
    bench_wl.add_options(bench);
    bench_out.add_options(bench);
    bench->add_option("--policy", bench_policies, "comma list of policy specs");
    bench->add_option("--capacity", bench_capacity, "cache size in bytes");
    bench->add_option("--reps", bench_reps, "repetitions (median reported, min 5)");

    std::vector<const char*> argv;
    argv.push_back("cachekit");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_wl, gen_out, args, out);
        if (sim->parsed())
            return cmd_sim(sim_wl, sim_out, sim_policies, sim_caps, sim_reps, sim_warmup,
                           sim_ttl, sim_series, args, out);
        if (sweep->parsed())
            return cmd_sweep(sweep_wl, sweep_out, sweep_policies, sweep_caps, sweep_warmup,
                             sweep_bounds, args, out);
        if (exact->parsed())
            return cmd_exact(exact_out, exact_pmf, exact_catalog, exact_beta, exact_sizes,
                             exact_values, exact_capacity, exact_policies, exact_levels,
                             exact_admit, exact_guard, args, out);
        if (approx->parsed())
            return cmd_approx(approx_out, approx_pmf, approx_catalog, approx_beta, approx_caps,
                              approx_fill, args, out);
        if (bounds->parsed())
            return cmd_bounds(bounds_wl, bounds_out, bounds_caps, bounds_trim_head,
                              bounds_trim_tail, bounds_exhaustive, args, out);
        if (ttl->parsed())
            return cmd_ttl(ttl_out, ttl_lambdas, ttl_catalog, ttl_beta, ttl_rate, ttl_dts,
                           ttl_disc, ttl_target_hit, ttl_target_occ, ttl_cycles, ttl_seed, args,
                           out);
        if (bench->parsed())
            return cmd_bench(bench_wl, bench_out, bench_policies, bench_capacity, bench_reps,
                             args, out, err);
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace cachekit::cli
