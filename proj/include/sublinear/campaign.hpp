#pragma once

// Batch experiments: run one estimator many times against the exact oracle, record one
// row per trial, and audit measured reads against the planned ceilings.
//
// Config (JSON):
//   {
//     "name": "alg1-alternating",
//     "estimator": {"id": "rle-additive", "epsilon": 0.1},
//     "instance": {"generator": {"family": "alternating", "n": 100000}},
//     "trials": 100, "base_seed": 7, "min_success_rate": 0.9,
//     "contract": {"lambda": 1, "epsilon": 0.1},          (optional)
//     "threads": 1,                                         (optional)
//     "output": {"csv": "out.csv", "json": "out.json"}      (optional)
//   }
// or {"campaigns": [config, ...]}. An instance may instead be {"file": PATH,
// "alphabet_size": N}; relative paths resolve against the config's directory.
//
// Estimator ids: rle-additive (epsilon), rle-bucketed (epsilon, delta), rle-search,
// rle-refined (gamma), lz (A, epsilon), colors (lambda), colors-amplified (lambda, delta).
//
// CSV columns, in order:
//   trial,seed,valid,estimate,exact,queries_used,query_ceiling,lambda,epsilon,pass,error

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sublinear/colors_estimator.hpp"
#include "sublinear/exact_oracles.hpp"
#include "sublinear/generators.hpp"
#include "sublinear/lz_estimator.hpp"
#include "sublinear/random.hpp"
#include "sublinear/rle_estimators.hpp"
#include "sublinear/string_access.hpp"

namespace sublinear {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// JSON conversions

inline json to_json(const EstimateReport& r) {
    return json{{"algorithm", r.algorithm},       {"estimate", r.estimate},
                {"lambda", r.lambda},             {"epsilon", r.epsilon},
                {"queries_used", r.queries_used}, {"query_ceiling", r.query_ceiling},
                {"seed", r.seed},                 {"confidence", r.confidence},
                {"n", r.n},                       {"rounds", r.rounds},
                {"exhaustive", r.exhaustive}};
}

/// Parts are written with 0-based offsets; a literal or run has source null.
inline json to_json(const CostBreakdown& c, bool with_parts) {
    json out{{"total_cost", c.total_cost}, {"parts_count", c.parts.size()}};
    if (with_parts) {
        json parts = json::array();
        for (const auto& s : c.parts) {
            json part{{"start", s.start - 1}, {"length", s.length}, {"cost", s.cost}};
            part["source"] = s.source == 0 ? json(nullptr) : json(s.source - 1);
            parts.push_back(std::move(part));
        }
        out["parts"] = std::move(parts);
    }
    return out;
}

namespace detail {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(std::string("config: bad value for '") + key + "'");
    }
}

template <typename T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("config: missing '") + key + "'");
    return get_or<T>(j, key, T{});
}

/// Shortest round-trip decimal form.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline GeneratorSpec generator_spec_from_json(const json& j) {
    GeneratorSpec g;
    g.family = detail::require<std::string>(j, "family");
    g.n = detail::get_or<std::size_t>(j, "n", 0);
    g.k = detail::get_or<std::size_t>(j, "k", 0);
    g.p = detail::get_or<double>(j, "p", 0.5);
    g.m = detail::get_or<std::size_t>(j, "m", 0);
    g.ell0 = detail::get_or<std::size_t>(j, "ell0", 0);
    g.binary = detail::get_or<bool>(j, "binary", false);
    g.tau_length = detail::get_or<std::size_t>(j, "tau_length", 0);
    g.colors = detail::get_or<std::size_t>(j, "colors", 0);
    g.alpha_prime = detail::get_or<double>(j, "alpha_prime", 0.0);
    g.alphabet_size = detail::get_or<std::size_t>(j, "alphabet_size", 2);
    g.long_run = detail::get_or<std::size_t>(j, "long_run", 8);
    g.seed = detail::get_or<std::uint64_t>(j, "seed", 0);
    return g;
}

inline json to_json(const GeneratorSpec& g) {
    return json{{"family", g.family},   {"n", g.n},
                {"k", g.k},             {"p", g.p},
                {"m", g.m},             {"ell0", g.ell0},
                {"binary", g.binary},   {"tau_length", g.tau_length},
                {"colors", g.colors},   {"alpha_prime", g.alpha_prime},
                {"alphabet_size", g.alphabet_size}, {"long_run", g.long_run},
                {"seed", g.seed}};
}

// ---------------------------------------------------------------------------
// Estimator dispatch

struct EstimatorSpec {
    std::string id;
    double epsilon = 0.1;
    double delta = 1.0 / 3.0;
    double gamma = 0.5;
    double A = 8.0;
    double lambda = 2.0;
};

enum class CostKind { Rle, Lz, Colors };

inline CostKind cost_kind(const std::string& id) {
    if (id == "rle-additive" || id == "rle-bucketed" || id == "rle-search" || id == "rle-refined") return CostKind::Rle;
    if (id == "lz") return CostKind::Lz;
    if (id == "colors" || id == "colors-amplified") return CostKind::Colors;
    throw std::invalid_argument("unknown estimator id: " + id);
}

inline EstimatorSpec estimator_spec_from_json(const json& j) {
    EstimatorSpec e;
    e.id = detail::require<std::string>(j, "id");
    cost_kind(e.id);
    e.epsilon = detail::get_or(j, "epsilon", e.epsilon);
    e.delta = detail::get_or(j, "delta", e.delta);
    e.gamma = detail::get_or(j, "gamma", e.gamma);
    e.A = detail::get_or(j, "A", e.A);
    e.lambda = detail::get_or(j, "lambda", e.lambda);
    return e;
}

inline json to_json(const EstimatorSpec& e) {
    json out{{"id", e.id}};
    const auto& id = e.id;
    if (id == "rle-additive" || id == "rle-bucketed" || id == "lz") out["epsilon"] = e.epsilon;
    if (id == "rle-bucketed" || id == "colors-amplified") out["delta"] = e.delta;
    if (id == "rle-refined") out["gamma"] = e.gamma;
    if (id == "lz") out["A"] = e.A;
    if (id == "colors" || id == "colors-amplified") out["lambda"] = e.lambda;
    return out;
}

inline EstimateReport run_estimator(const EstimatorSpec& e, QueryCountedString& w, std::uint64_t seed) {
    const auto& id = e.id;
    if (id == "rle-additive") return rle_additive_estimate(w, e.epsilon, seed);
    if (id == "rle-bucketed") return rle_bucketed_estimate(w, e.epsilon, e.delta, seed);
    if (id == "rle-search") return rle_multiplicative_search(w, seed);
    if (id == "rle-refined") return rle_refined_search(w, e.gamma, seed);
    if (id == "lz") return lz_estimate(w, e.A, e.epsilon, seed);
    if (id == "colors") return colors_estimate(w, e.lambda, seed);
    if (id == "colors-amplified") return colors_estimate_amplified(w, e.lambda, e.delta, seed);
    throw std::invalid_argument("unknown estimator id: " + id);
}

inline double exact_cost(CostKind kind, std::span<const Symbol> w, std::size_t alphabet_size) {
    switch (kind) {
        case CostKind::Rle: return static_cast<double>(exact_rle_cost(w, alphabet_size).total_cost);
        case CostKind::Lz: return static_cast<double>(exact_lz_cost(w).total_cost);
        case CostKind::Colors: return static_cast<double>(exact_color_count(w));
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Campaigns

struct CampaignConfig {
    std::string name = "campaign";
    EstimatorSpec estimator;
    std::optional<std::filesystem::path> instance_file;
    std::size_t file_alphabet_size = 0;
    std::optional<GeneratorSpec> generator;
    std::size_t trials = 0;
    std::uint64_t base_seed = 0;
    double min_success_rate = 0.0;
    std::optional<double> contract_lambda;
    std::optional<double> contract_epsilon;
    std::size_t threads = 1;
    std::optional<std::filesystem::path> csv_path;
    std::optional<std::filesystem::path> json_path;
};

inline CampaignConfig campaign_config_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
    if (!j.is_object()) throw std::invalid_argument("config: campaign must be a JSON object");
    CampaignConfig c;
    c.name = detail::get_or<std::string>(j, "name", c.name);
    c.estimator = estimator_spec_from_json(detail::require<json>(j, "estimator"));
    const json instance = detail::require<json>(j, "instance");
    if (instance.contains("file")) {
        std::filesystem::path p = detail::require<std::string>(instance, "file");
        c.instance_file = p.is_relative() ? base_dir / p : p;
        c.file_alphabet_size = detail::get_or<std::size_t>(instance, "alphabet_size", 0);
    } else if (instance.contains("generator")) {
        c.generator = generator_spec_from_json(instance.at("generator"));
    } else {
        throw std::invalid_argument("config: instance needs 'file' or 'generator'");
    }
    c.trials = detail::require<std::size_t>(j, "trials");
    if (c.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    c.base_seed = detail::get_or<std::uint64_t>(j, "base_seed", 0);
    c.min_success_rate = detail::get_or<double>(j, "min_success_rate", 0.0);
    if (!(c.min_success_rate >= 0.0 && c.min_success_rate <= 1.0)) {
        throw std::invalid_argument("config: min_success_rate must lie in [0, 1]");
    }
    if (j.contains("contract")) {
        const json& k = j.at("contract");
        if (k.contains("lambda")) c.contract_lambda = detail::get_or<double>(k, "lambda", 1.0);
        if (k.contains("epsilon")) c.contract_epsilon = detail::get_or<double>(k, "epsilon", 0.0);
    }
    c.threads = std::max<std::size_t>(1, detail::get_or<std::size_t>(j, "threads", 1));
    if (j.contains("output")) {
        const json& o = j.at("output");
        auto resolve = [&](const char* key) -> std::optional<std::filesystem::path> {
            if (!o.contains(key)) return std::nullopt;
            std::filesystem::path p = detail::get_or<std::string>(o, key, "");
            return p.is_relative() ? base_dir / p : p;
        };
        c.csv_path = resolve("csv");
        c.json_path = resolve("json");
    }
    return c;
}

/// Reads one campaign or a {"campaigns": [...]} list.
inline std::vector<CampaignConfig> load_campaign_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    const auto dir = path.parent_path();
    std::vector<CampaignConfig> out;
    if (j.is_object() && j.contains("campaigns")) {
        for (const auto& c : j.at("campaigns")) out.push_back(campaign_config_from_json(c, dir));
        if (out.empty()) throw std::invalid_argument("config: empty campaign list");
    } else {
        out.push_back(campaign_config_from_json(j, dir));
    }
    return out;
}

struct TrialRow {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    bool valid = true;
    double estimate = 0.0;
    double exact = 0.0;
    std::uint64_t queries_used = 0;
    std::uint64_t query_ceiling = 0;
    double lambda = 1.0;
    double epsilon = 0.0;
    bool pass = false;
    std::string error;
};

struct CampaignAggregate {
    std::size_t trials = 0;
    std::size_t valid_trials = 0;
    std::size_t passes = 0;
    double success_rate = 0.0;
    double mean_queries = 0.0;
    std::uint64_t max_queries = 0;
    std::size_t over_ceiling = 0;
    double min_success_rate = 0.0;
    bool met_threshold = false;
};

struct CampaignResult {
    std::string name;
    std::uint64_t base_seed = 0;
    EstimatorSpec estimator;
    json instance;
    std::size_t n = 0;
    std::size_t alphabet_size = 0;
    double exact = 0.0;
    std::vector<TrialRow> rows;
    CampaignAggregate aggregate;
    double wall_seconds = 0.0;
};

/// Calls fn(i) for i in [0, count) on up to `threads` workers.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

inline GeneratedString load_instance(const CampaignConfig& config) {
    if (config.instance_file) {
        const auto w = QueryCountedString::from_file(*config.instance_file, config.file_alphabet_size);
        return {w.contents_uncounted(), w.alphabet_size()};
    }
    if (config.generator) return generate(*config.generator);
    throw std::invalid_argument("config: no instance");
}

inline CampaignResult run_campaign(const CampaignConfig& config) {
    if (config.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    CampaignResult result;
    result.name = config.name;
    result.base_seed = config.base_seed;
    result.estimator = config.estimator;
    if (config.instance_file) {
        result.instance = json{{"file", config.instance_file->filename().string()},
                               {"alphabet_size", config.file_alphabet_size}};
    } else {
        result.instance = json{{"generator", to_json(*config.generator)}};
    }

    const GeneratedString instance = load_instance(config);
    const auto base = QueryCountedString::from_symbols(instance.symbols, instance.alphabet_size);
    result.n = base.length();
    result.alphabet_size = base.alphabet_size();
    result.exact = exact_cost(cost_kind(config.estimator.id), instance.symbols, base.alphabet_size());

    result.rows.resize(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t i) {
        TrialRow& row = result.rows[i];
        row.trial = i;
        row.seed = derive_seed(config.base_seed, i);
        row.exact = result.exact;
        QueryCountedString w = base.fresh_view();
        try {
            const EstimateReport r = run_estimator(config.estimator, w, row.seed);
            row.estimate = r.estimate;
            row.queries_used = r.queries_used;
            row.query_ceiling = r.query_ceiling;
            row.lambda = config.contract_lambda.value_or(r.lambda);
            row.epsilon = config.contract_epsilon.value_or(r.epsilon);
            EstimateReport judged = r;
            judged.lambda = row.lambda;
            judged.epsilon = row.epsilon;
            row.pass = meets_contract(judged, result.exact, result.n);
        } catch (const std::exception& e) {
            row.valid = false;
            row.pass = false;
            row.error = e.what();
        }
    });

    CampaignAggregate& agg = result.aggregate;
    agg.trials = config.trials;
    agg.min_success_rate = config.min_success_rate;
    double query_sum = 0.0;
    for (const auto& row : result.rows) {
        if (row.pass) ++agg.passes;
        if (!row.valid) continue;
        ++agg.valid_trials;
        query_sum += static_cast<double>(row.queries_used);
        agg.max_queries = std::max(agg.max_queries, row.queries_used);
        if (row.queries_used > row.query_ceiling) ++agg.over_ceiling;
    }
    agg.success_rate = static_cast<double>(agg.passes) / static_cast<double>(agg.trials);
    agg.mean_queries = agg.valid_trials ? query_sum / static_cast<double>(agg.valid_trials) : 0.0;
    agg.met_threshold = agg.success_rate >= config.min_success_rate;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

inline json to_json(const TrialRow& r) {
    return json{{"trial", r.trial},
                {"seed", r.seed},
                {"valid", r.valid},
                {"estimate", r.estimate},
                {"exact", r.exact},
                {"queries_used", r.queries_used},
                {"query_ceiling", r.query_ceiling},
                {"lambda", r.lambda},
                {"epsilon", r.epsilon},
                {"pass", r.pass},
                {"error", r.error}};
}

inline json to_json(const CampaignAggregate& a) {
    return json{{"trials", a.trials},
                {"valid_trials", a.valid_trials},
                {"passes", a.passes},
                {"success_rate", a.success_rate},
                {"mean_queries", a.mean_queries},
                {"max_queries", a.max_queries},
                {"over_ceiling", a.over_ceiling},
                {"min_success_rate", a.min_success_rate},
                {"met_threshold", a.met_threshold}};
}

/// Wall time varies between runs, so it is only included on request.
inline json to_json(const CampaignResult& r, bool with_timing = false) {
    json rows = json::array();
    for (const auto& row : r.rows) rows.push_back(to_json(row));
    json out{{"name", r.name},
             {"base_seed", r.base_seed},
             {"estimator", to_json(r.estimator)},
             {"instance", r.instance},
             {"n", r.n},
             {"alphabet_size", r.alphabet_size},
             {"exact", r.exact},
             {"rows", std::move(rows)},
             {"aggregate", to_json(r.aggregate)}};
    if (with_timing) out["wall_seconds"] = r.wall_seconds;
    return out;
}

inline std::string to_csv(const CampaignResult& r) {
    std::ostringstream out;
    out << "trial,seed,valid,estimate,exact,queries_used,query_ceiling,lambda,epsilon,pass,error\n";
    for (const auto& row : r.rows) {
        out << row.trial << ',' << row.seed << ',' << (row.valid ? 1 : 0) << ','
            << detail::format_double(row.estimate) << ',' << detail::format_double(row.exact) << ','
            << row.queries_used << ',' << row.query_ceiling << ',' << detail::format_double(row.lambda) << ','
            << detail::format_double(row.epsilon) << ',' << (row.pass ? 1 : 0) << ','
            << detail::csv_escape(row.error) << '\n';
    }
    return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

inline void write_outputs(const CampaignConfig& config, const CampaignResult& result, bool with_timing = false) {
    if (config.csv_path) write_text(*config.csv_path, to_csv(result));
    if (config.json_path) write_text(*config.json_path, to_json(result, with_timing).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Query audit

struct AuditRow {
    std::string label;
    std::uint64_t queries_used = 0;
    std::uint64_t query_ceiling = 0;
    double utilization = 0.0;  // queries_used / query_ceiling
    bool flagged = false;
};

struct AuditTable {
    std::vector<AuditRow> rows;
    std::size_t flagged = 0;
};

/// One entry per report; a report whose reads exceed its ceiling is flagged.
inline AuditTable audit_queries(std::span<const AuditRow> reports) {
    AuditTable table;
    for (AuditRow row : reports) {
        row.flagged = row.queries_used > row.query_ceiling;
        row.utilization = row.query_ceiling == 0 ? (row.queries_used == 0 ? 0.0 : INFINITY)
                                                 : static_cast<double>(row.queries_used) /
                                                       static_cast<double>(row.query_ceiling);
        if (row.flagged) ++table.flagged;
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline AuditTable audit_queries(std::span<const EstimateReport> reports) {
    std::vector<AuditRow> rows;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        rows.push_back({reports[i].algorithm + "#" + std::to_string(i), reports[i].queries_used,
                        reports[i].query_ceiling});
    }
    return audit_queries(std::span<const AuditRow>(rows));
}

inline AuditTable audit_queries(const CampaignResult& result) {
    std::vector<AuditRow> rows;
    for (const auto& r : result.rows) {
        if (!r.valid) continue;
        rows.push_back({"trial#" + std::to_string(r.trial), r.queries_used, r.query_ceiling});
    }
    return audit_queries(std::span<const AuditRow>(rows));
}

/// Accepts a campaign result ({"rows": [...]}), a JSON array of reports, or one report
/// object per line. Every entry needs queries_used and query_ceiling.
inline AuditTable audit_queries_from_text(const std::string& text) {
    auto entry = [](const json& j, std::size_t index) {
        AuditRow row;
        if (j.contains("trial")) {
            row.label = "trial#" + std::to_string(j.at("trial").get<std::size_t>());
        } else {
            row.label = detail::get_or<std::string>(j, "algorithm", "report") + "#" + std::to_string(index);
        }
        row.queries_used = detail::require<std::uint64_t>(j, "queries_used");
        row.query_ceiling = detail::require<std::uint64_t>(j, "query_ceiling");
        return row;
    };
    std::vector<AuditRow> rows;
    auto add_all = [&](const json& array) {
        for (const auto& j : array) {
            if (j.contains("valid") && !j.at("valid").get<bool>()) continue;
            rows.push_back(entry(j, rows.size()));
        }
    };
    json whole = json::parse(text, nullptr, false);
    if (!whole.is_discarded()) {
        if (whole.is_object() && whole.contains("rows")) {
            add_all(whole.at("rows"));
        } else if (whole.is_array()) {
            add_all(whole);
        } else {
            rows.push_back(entry(whole, 0));
        }
    } else {
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded()) throw std::invalid_argument("audit: malformed JSON line");
            rows.push_back(entry(j, rows.size()));
        }
    }
    return audit_queries(std::span<const AuditRow>(rows));
}

inline json to_json(const AuditTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back(json{{"label", r.label},
                            {"queries_used", r.queries_used},
                            {"query_ceiling", r.query_ceiling},
                            {"utilization", r.utilization},
                            {"flagged", r.flagged}});
    }
    return json{{"rows", std::move(rows)}, {"entries", t.rows.size()}, {"flagged", t.flagged}};
}

}  // namespace sublinear
