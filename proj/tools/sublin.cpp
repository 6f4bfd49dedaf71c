// sublin: command-line front end for the estimators, exact oracles, generators and
// campaign runner. Every command prints JSON to stdout. Offsets in output are 0-based.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sublinear.hpp"

namespace fs = std::filesystem;
using namespace sublinear;

namespace {

std::uint64_t default_seed() {
    const char* env = std::getenv("SUBLIN_SEED");
    if (!env || !*env) return 0;
    try {
        return std::stoull(env);
    } catch (const std::exception&) {
        throw std::invalid_argument("SUBLIN_SEED must be an unsigned integer");
    }
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

struct InputOptions {
    std::string path;
    std::size_t alphabet_size = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("input", path, "Input file (raw bytes, one symbol per byte)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--alphabet-size", alphabet_size, "Alphabet size; default is the number of distinct bytes");
    }

    QueryCountedString load() const { return QueryCountedString::from_file(path, alphabet_size); }
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_bytes(const fs::path& path, const std::vector<Symbol>& symbols) {
    std::string bytes(symbols.size(), '\0');
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (symbols[i] > 255) throw std::invalid_argument("symbol " + std::to_string(symbols[i]) + " does not fit a byte");
        bytes[i] = static_cast<char>(symbols[i]);
    }
    write_text(path, bytes);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sublinear estimation of RLE and LZ77 compressibility"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    std::optional<std::uint64_t> seed_flag;
    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_flag, "RNG seed (default: $SUBLIN_SEED, else 0)");
    };
    auto seed = [&] { return seed_flag ? *seed_flag : default_seed(); };

    // exact
    auto* exact = app.add_subcommand("exact", "Exact RLE cost and LZ77 symbol count");
    InputOptions exact_in;
    exact_in.attach(exact);
    std::string scheme = "all";
    bool with_parts = false;
    std::size_t lemma_ell0 = 0;
    exact->add_option("--scheme", scheme, "Which cost to compute")->check(CLI::IsMember({"rle", "lz", "all"}));
    exact->add_flag("--parts", with_parts, "Include the run / segment decomposition");
    exact->add_option("--lemmas", lemma_ell0, "Also check the structural inequalities up to this ell0");

    // rle-est
    auto* rle = app.add_subcommand("rle-est", "Sublinear RLE cost estimate");
    InputOptions rle_in;
    rle_in.attach(rle);
    std::string mode = "additive";
    double rle_eps = 0.1, rle_delta = 1.0 / 3.0, gamma = 0.5;
    rle->add_option("--mode", mode, "additive | bucketed | search | refined")
        ->check(CLI::IsMember({"additive", "bucketed", "search", "refined"}));
    rle->add_option("--epsilon", rle_eps, "Additive error as a fraction of n (additive, bucketed)");
    rle->add_option("--delta", rle_delta, "Failure probability (bucketed)");
    rle->add_option("--gamma", gamma, "Target factor 1+gamma (refined)");
    add_seed(rle);

    // lz-est
    auto* lz = app.add_subcommand("lz-est", "Sublinear (A, eps) estimate of the LZ77 symbol count");
    InputOptions lz_in;
    lz_in.attach(lz);
    double lz_A = 8.0, lz_eps = 0.05;
    lz->add_option("--A", lz_A, "Multiplicative factor A > 1");
    lz->add_option("--epsilon", lz_eps, "Additive error as a fraction of n; A*epsilon < 2");
    add_seed(lz);

    // lz-distinguish
    auto* dist = app.add_subcommand("lz-distinguish", "Decide C_LZ <= lo versus C_LZ >= hi");
    InputOptions dist_in;
    dist_in.attach(dist);
    double lo = 0, hi = 0;
    dist->add_option("--lo", lo, "Low threshold")->required();
    dist->add_option("--hi", hi, "High threshold; hi / lo must exceed 4")->required();
    add_seed(dist);

    // colors-est
    auto* colors = app.add_subcommand("colors-est", "Estimate the number of distinct symbols");
    InputOptions colors_in;
    colors_in.attach(colors);
    double lambda = 2.0;
    std::optional<double> colors_delta;
    colors->add_option("--lambda", lambda, "Approximation factor lambda > 1");
    colors->add_option("--delta", colors_delta, "Amplify to failure probability delta (median of runs)");
    add_seed(colors);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate an instance and write it as raw bytes");
    GeneratorSpec spec;
    std::string out_path, tau_path;
    bool emit_meta = false;
    gen->add_option("--family", spec.family, "wk | coin | lztight | col2lz | random | alternating | constant | runmix")
        ->required()
        ->check(CLI::IsMember({"wk", "coin", "lztight", "col2lz", "random", "alternating", "constant", "runmix"}));
    gen->add_option("--n", spec.n, "Length (wk, coin, random, alternating, constant, runmix)");
    gen->add_option("--k", spec.k, "Block count (wk)");
    gen->add_option("--p", spec.p, "Coin bias (coin)");
    gen->add_option("--m", spec.m, "Alphabet size (lztight)");
    gen->add_option("--ell0", spec.ell0, "Phase count (lztight)");
    gen->add_flag("--binary", spec.binary, "Binarize the lztight string");
    gen->add_option("--tau", tau_path, "Color source file (col2lz); default is a synthetic source")
        ->check(CLI::ExistingFile);
    gen->add_option("--tau-length", spec.tau_length, "Synthetic source length (col2lz)");
    gen->add_option("--colors", spec.colors, "Synthetic source color count (col2lz)");
    gen->add_option("--alpha-prime", spec.alpha_prime, "Reduction parameter alpha' (col2lz)");
    gen->add_option("--alphabet-size", spec.alphabet_size, "Output alphabet size (col2lz, random)");
    gen->add_option("--long-run", spec.long_run, "Long run length (runmix)");
    gen->add_option("--out", out_path, "Output file")->required();
    gen->add_flag("--emit-meta", emit_meta, "Write OUT.json with exact costs");
    add_seed(gen);

    // campaign
    auto* campaign = app.add_subcommand("campaign", "Batch experiments");
    campaign->require_subcommand(1);
    auto* run = campaign->add_subcommand("run", "Run the campaign(s) in CONFIG");
    std::string config_path;
    bool timing = false;
    std::optional<std::size_t> threads;
    run->add_option("config", config_path, "Campaign config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_flag("--timing", timing, "Add wall time to the JSON output");
    run->add_option("--threads", threads, "Override the configured worker count");
    auto* audit = campaign->add_subcommand("audit", "Compare measured reads with the planned ceilings");
    std::string audit_path;
    audit->add_option("file", audit_path, "Campaign result JSON, JSON array of reports, or one report per line")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*exact) {
            const auto w = exact_in.load();
            const auto symbols = w.contents_uncounted();
            json out{{"n", w.length()}, {"alphabet_size", w.alphabet_size()}};
            if (scheme != "lz") out["rle"] = to_json(exact_rle_cost(symbols, w.alphabet_size()), with_parts);
            if (scheme != "rle") out["lz"] = to_json(exact_lz_cost(symbols), with_parts);
            if (lemma_ell0 > 0) {
                const auto report = verify_structural_lemmas(symbols, lemma_ell0);
                json checks = json::array();
                for (const auto& c : report.checks) {
                    checks.push_back(
                        json{{"name", c.name}, {"ell", c.ell}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
                }
                out["lemmas"] = json{{"ell0", report.ell0}, {"m", report.m}, {"all_hold", report.all_hold()},
                                     {"checks", std::move(checks)}};
            }
            print(out);
        } else if (*rle) {
            auto w = rle_in.load();
            EstimateReport r;
            if (mode == "additive") r = rle_additive_estimate(w, rle_eps, seed());
            if (mode == "bucketed") r = rle_bucketed_estimate(w, rle_eps, rle_delta, seed());
            if (mode == "search") r = rle_multiplicative_search(w, seed());
            if (mode == "refined") r = rle_refined_search(w, gamma, seed());
            print(to_json(r));
        } else if (*lz) {
            auto w = lz_in.load();
            print(to_json(lz_estimate(w, lz_A, lz_eps, seed())));
        } else if (*dist) {
            auto w = dist_in.load();
            const auto v = distinguish_compressible(w, lo, hi, seed());
            print(json{{"verdict", v.compressible ? "LOW" : "HIGH"},
                       {"threshold", v.threshold},
                       {"A", v.A},
                       {"epsilon", v.epsilon},
                       {"report", to_json(v.report)}});
        } else if (*colors) {
            auto w = colors_in.load();
            if (colors_delta) {
                print(to_json(colors_estimate_amplified(w, lambda, *colors_delta, seed())));
            } else {
                print(to_json(colors_estimate(w, lambda, seed())));
            }
        } else if (*gen) {
            spec.seed = seed();
            GeneratedString g;
            json extra = json::object();
            if (spec.family == "col2lz" && !tau_path.empty()) {
                ColorsToLzInstance instance(QueryCountedString::from_file(tau_path), spec.alpha_prime,
                                            spec.alphabet_size, spec.seed);
                g.symbols = instance.materialize();
                g.alphabet_size = spec.alphabet_size;
                extra["tau"] = fs::path(tau_path).filename().string();
                extra["block_length"] = instance.block_length();
            } else {
                g = generate(spec);
            }
            write_bytes(out_path, g.symbols);
            json meta{{"out", fs::path(out_path).filename().string()},
                      {"n", g.symbols.size()},
                      {"alphabet_size", g.alphabet_size},
                      {"spec", to_json(spec)}};
            meta.update(extra);
            if (emit_meta) {
                meta["exact"] = json{{"rle_cost", exact_rle_cost(g.symbols, g.alphabet_size).total_cost},
                                     {"lz_cost", exact_lz_cost(g.symbols).total_cost},
                                     {"colors", exact_color_count(g.symbols)}};
                write_text(out_path + ".json", meta.dump(2) + "\n");
            }
            print(meta);
        } else if (*run) {
            auto configs = load_campaign_file(config_path);
            json summary = json::array();
            bool all_met = true;
            for (auto& config : configs) {
                if (threads) config.threads = std::max<std::size_t>(1, *threads);
                const CampaignResult result = run_campaign(config);
                write_outputs(config, result, timing);
                std::cerr << config.name << ": " << result.aggregate.passes << "/" << result.aggregate.trials
                          << " passed in " << result.wall_seconds << " s\n";
                all_met = all_met && result.aggregate.met_threshold;
                json entry{{"name", result.name},
                           {"base_seed", result.base_seed},
                           {"exact", result.exact},
                           {"aggregate", to_json(result.aggregate)}};
                if (timing) entry["wall_seconds"] = result.wall_seconds;
                summary.push_back(std::move(entry));
            }
            print(json{{"campaigns", std::move(summary)}, {"all_met", all_met}});
            return all_met ? 0 : 1;
        } else if (*audit) {
            const AuditTable table = audit_queries_from_text(read_file(audit_path));
            print(to_json(table));
            return table.flagged == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
