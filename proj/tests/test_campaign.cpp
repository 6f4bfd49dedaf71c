#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "sublinear/campaign.hpp"

using namespace sublinear;
namespace fs = std::filesystem;

namespace {

CampaignConfig alternating_config(std::size_t trials) {
    json j = json::parse(R"({
        "name": "alt",
        "estimator": {"id": "rle-additive", "epsilon": 0.1},
        "instance": {"generator": {"family": "alternating", "n": 100000}},
        "base_seed": 7, "min_success_rate": 0.9
    })");
    j["trials"] = trials;
    return campaign_config_from_json(j);
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sublinear_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Campaign, AdditiveOnAlternatingAlwaysPasses) {
    const auto result = run_campaign(alternating_config(100));
    EXPECT_EQ(result.exact, 200000.0);
    EXPECT_EQ(result.aggregate.trials, 100u);
    EXPECT_EQ(result.aggregate.passes, 100u);
    EXPECT_DOUBLE_EQ(result.aggregate.success_rate, 1.0);
    EXPECT_TRUE(result.aggregate.met_threshold);
    EXPECT_EQ(result.aggregate.over_ceiling, 0u);
    for (const auto& row : result.rows) {
        EXPECT_EQ(row.seed, derive_seed(7, row.trial));
        EXPECT_TRUE(row.valid);
        EXPECT_LE(row.queries_used, row.query_ceiling);
    }
}

TEST(Campaign, ZeroTrialsIsAConfigError) {
    EXPECT_THROW(alternating_config(0), std::invalid_argument);
    CampaignConfig c = alternating_config(1);
    c.trials = 0;
    EXPECT_THROW(run_campaign(c), std::invalid_argument);
}

TEST(Campaign, ReplayIsByteIdentical) {
    const auto dir = scratch_dir("replay");
    const std::string config = R"({
        "name": "mix",
        "estimator": {"id": "rle-bucketed", "epsilon": 0.1, "delta": 0.1},
        "instance": {"generator": {"family": "runmix", "n": 20000, "long_run": 8, "seed": 3}},
        "trials": 12, "base_seed": 99,
        "output": {"csv": "out/a.csv", "json": "out/a.json"}
    })";
    std::ofstream(dir / "c.json") << config;
    std::string csv[2], js[2];
    for (int rep = 0; rep < 2; ++rep) {
        const auto configs = load_campaign_file(dir / "c.json");
        ASSERT_EQ(configs.size(), 1u);
        write_outputs(configs[0], run_campaign(configs[0]));
        csv[rep] = slurp(dir / "out/a.csv");
        js[rep] = slurp(dir / "out/a.json");
    }
    EXPECT_FALSE(csv[0].empty());
    EXPECT_EQ(csv[0], csv[1]);
    EXPECT_EQ(js[0], js[1]);
    EXPECT_EQ(csv[0].substr(0, csv[0].find('\n')),
              "trial,seed,valid,estimate,exact,queries_used,query_ceiling,lambda,epsilon,pass,error");
    EXPECT_EQ(std::count(csv[0].begin(), csv[0].end(), '\n'), 13);
}

TEST(Campaign, ThreadCountDoesNotChangeRows) {
    CampaignConfig c = campaign_config_from_json(json::parse(R"({
        "estimator": {"id": "colors", "lambda": 4},
        "instance": {"generator": {"family": "random", "n": 5000, "alphabet_size": 300, "seed": 1}},
        "trials": 40, "base_seed": 5
    })"));
    const auto one = run_campaign(c);
    c.threads = 4;
    const auto four = run_campaign(c);
    EXPECT_EQ(to_json(one).dump(), to_json(four).dump());
    EXPECT_EQ(to_csv(one), to_csv(four));
}

TEST(Campaign, EstimatorErrorsMarkRowsInvalid) {
    CampaignConfig c = alternating_config(5);
    c.estimator.epsilon = 2.0;
    const auto result = run_campaign(c);
    EXPECT_EQ(result.aggregate.valid_trials, 0u);
    EXPECT_EQ(result.aggregate.passes, 0u);
    EXPECT_FALSE(result.aggregate.met_threshold);
    for (const auto& row : result.rows) {
        EXPECT_FALSE(row.valid);
        EXPECT_FALSE(row.error.empty());
    }
    EXPECT_NE(to_csv(result).find(",0,"), std::string::npos);
}

TEST(Campaign, ContractOverrideIsApplied) {
    CampaignConfig c = alternating_config(3);
    c.contract_lambda = 1.0;
    c.contract_epsilon = 0.0;
    const auto result = run_campaign(c);
    for (const auto& row : result.rows) {
        EXPECT_EQ(row.lambda, 1.0);
        EXPECT_EQ(row.epsilon, 0.0);
        EXPECT_EQ(row.pass, row.estimate == row.exact);
    }
}

TEST(CampaignConfig, RejectsMalformedInput) {
    EXPECT_THROW(campaign_config_from_json(json::array()), std::invalid_argument);
    EXPECT_THROW(campaign_config_from_json(json::parse(R"({"estimator": {"id": "rle-additive"},
        "instance": {"generator": {"family": "constant", "n": 10}}})")),
                 std::exception);
    EXPECT_THROW(campaign_config_from_json(json::parse(R"({"estimator": {"id": "bogus"},
        "instance": {"generator": {"family": "constant", "n": 10}}, "trials": 1})")),
                 std::invalid_argument);
    EXPECT_THROW(campaign_config_from_json(json::parse(R"({"estimator": {"id": "lz"},
        "instance": {}, "trials": 1})")),
                 std::invalid_argument);
    EXPECT_THROW(campaign_config_from_json(json::parse(R"({"estimator": {"id": "lz"},
        "instance": {"generator": {"family": "constant", "n": 10}}, "trials": 1, "min_success_rate": 2})")),
                 std::invalid_argument);
}

TEST(CampaignConfig, ListAndRelativePaths) {
    const auto dir = scratch_dir("list");
    std::ofstream(dir / "w.bin", std::ios::binary) << "abababababababab";
    std::ofstream(dir / "list.json") << R"({"campaigns": [
        {"name": "file", "estimator": {"id": "rle-search"}, "instance": {"file": "w.bin"}, "trials": 2,
         "output": {"csv": "res/file.csv"}},
        {"name": "gen", "estimator": {"id": "lz", "A": 4, "epsilon": 0.2},
         "instance": {"generator": {"family": "constant", "n": 64}}, "trials": 1}
    ]})";
    const auto configs = load_campaign_file(dir / "list.json");
    ASSERT_EQ(configs.size(), 2u);
    EXPECT_EQ(*configs[0].instance_file, dir / "w.bin");
    EXPECT_EQ(*configs[0].csv_path, dir / "res/file.csv");
    EXPECT_FALSE(configs[1].csv_path.has_value());
    const auto r = run_campaign(configs[0]);
    EXPECT_EQ(r.n, 16u);
    EXPECT_EQ(r.exact, 32.0);
    write_outputs(configs[0], r);
    EXPECT_TRUE(fs::exists(dir / "res/file.csv"));

    std::ofstream(dir / "empty.json") << R"({"campaigns": []})";
    EXPECT_THROW(load_campaign_file(dir / "empty.json"), std::invalid_argument);
    std::ofstream(dir / "broken.json") << "{";
    EXPECT_THROW(load_campaign_file(dir / "broken.json"), std::invalid_argument);
    EXPECT_THROW(load_campaign_file(dir / "missing.json"), std::runtime_error);
}

TEST(Audit, FlagsReadsOverCeiling) {
    const std::vector<AuditRow> rows{{"a", 10, 20}, {"b", 21, 20}, {"c", 0, 0}, {"d", 1, 0}};
    const auto t = audit_queries(std::span<const AuditRow>(rows));
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_EQ(t.flagged, 2u);
    EXPECT_FALSE(t.rows[0].flagged);
    EXPECT_DOUBLE_EQ(t.rows[0].utilization, 0.5);
    EXPECT_TRUE(t.rows[1].flagged);
    EXPECT_FALSE(t.rows[2].flagged);
    EXPECT_TRUE(t.rows[3].flagged);
}

TEST(Audit, CampaignRowsStayUnderCeiling) {
    const auto result = run_campaign(alternating_config(10));
    const auto t = audit_queries(result);
    EXPECT_EQ(t.rows.size(), 10u);
    EXPECT_EQ(t.flagged, 0u);
    const auto from_text = audit_queries_from_text(to_json(result).dump());
    EXPECT_EQ(from_text.rows.size(), 10u);
    EXPECT_EQ(from_text.flagged, 0u);
    EXPECT_EQ(from_text.rows[3].label, "trial#3");
}

TEST(Audit, TextFormats) {
    const auto array = audit_queries_from_text(R"([{"algorithm": "x", "queries_used": 5, "query_ceiling": 4},
                                                   {"algorithm": "y", "queries_used": 1, "query_ceiling": 4}])");
    EXPECT_EQ(array.rows.size(), 2u);
    EXPECT_EQ(array.flagged, 1u);
    EXPECT_EQ(array.rows[0].label, "x#0");

    const auto single = audit_queries_from_text(R"({"queries_used": 3, "query_ceiling": 3})");
    EXPECT_EQ(single.rows.size(), 1u);
    EXPECT_EQ(single.flagged, 0u);

    const auto lines = audit_queries_from_text(
        "{\"queries_used\": 3, \"query_ceiling\": 9}\n\n{\"queries_used\": 10, \"query_ceiling\": 9}\n");
    EXPECT_EQ(lines.rows.size(), 2u);
    EXPECT_EQ(lines.flagged, 1u);

    EXPECT_THROW(audit_queries_from_text("{\"queries_used\": 1}\nnot json\n"), std::invalid_argument);
    EXPECT_THROW(audit_queries_from_text(R"({"queries_used": 1})"), std::exception);
}

TEST(Json, ReportAndPartsUseZeroBasedOffsets) {
    const auto c = exact_lz_cost(to_symbols("abab"));
    const json j = to_json(c, true);
    EXPECT_EQ(j["total_cost"], 3);
    EXPECT_TRUE(j["parts"][0]["source"].is_null());
    EXPECT_EQ(j["parts"][2]["start"], 2);
    EXPECT_EQ(j["parts"][2]["source"], 0);
    EXPECT_FALSE(to_json(c, false).contains("parts"));
}
