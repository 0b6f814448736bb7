#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "etg/dot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kFixtures = ETG_FIXTURE_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<json> read_jsonl(const fs::path& p) {
    std::vector<json> rows;
    std::ifstream f(p);
    for (std::string line; std::getline(f, line);) {
        if (!line.empty()) rows.push_back(json::parse(line));
    }
    return rows;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("etg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string fixture(const char* name) const { return (kFixtures / name).string(); }
    std::string tmp(const char* name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, ParseFigureTarget) {
    ASSERT_EQ(etg::cli::run({"parse", "--in", fixture("figure_target.dot"), "--out", tmp("edges.json")}), 0);
    const auto j = json::parse(slurp(tmp("edges.json")));
    ASSERT_EQ(j["edges"].size(), 1u);
    EXPECT_EQ(j["edges"][0]["head"], "The Organization asserted responsibility");
    EXPECT_EQ(j["edges"][0]["relation"], "before");
    EXPECT_EQ(j["edges"][0]["tail"], "a United States Navy diver killed");
    EXPECT_EQ(j["edges"][0]["spans"]["relation"], json::array({102, 108}));
    EXPECT_EQ(j["skipped_lines"], 0);
}

TEST_F(Cli, PipelineThenAugmentIsDeterministic) {
    ASSERT_EQ(etg::cli::run({"pipeline", "--in", fixture("annotations.jsonl"), "--out", tmp("ds"), "--merge",
                             "--k", "0", "--test-fraction", "0", "--seed", "7"}),
              0);
    const auto base = read_jsonl(dir_ / "ds" / "train.jsonl");
    ASSERT_EQ(base.size(), 3u);
    EXPECT_TRUE(read_jsonl(dir_ / "ds" / "test.jsonl").empty());

    for (const char* out : {"aug1.jsonl", "aug2.jsonl"}) {
        ASSERT_EQ(etg::cli::run({"augment", "--in", (dir_ / "ds" / "train.jsonl").string(), "--out", tmp(out),
                                 "--k", "4", "--seed", "7"}),
                  0);
    }
    EXPECT_EQ(slurp(tmp("aug1.jsonl")), slurp(tmp("aug2.jsonl")));
    const auto rows = read_jsonl(tmp("aug1.jsonl"));
    ASSERT_EQ(rows.size(), 15u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& src = base[i / 5];
        EXPECT_EQ(rows[i]["doc_id"], src["doc_id"]);
        EXPECT_EQ(rows[i]["input"], src["input"]);
        const auto a = etg::parse(rows[i]["target"].get<std::string>());
        EXPECT_TRUE(a.clean());
        EXPECT_TRUE(etg::edge_set_equal(a.edge_list(), etg::parse(src["target"].get<std::string>()).edge_list()));
    }
}

TEST_F(Cli, PipelineHonoursAllowlistSplitAndMerge) {
    const std::vector<std::string> args{"pipeline", "--in", fixture("annotations.jsonl"), "--out", tmp("ds"),
                                        "--merge", "--allowlist", fixture("allowlist.txt"), "--test-fraction",
                                        "0.5", "--seed", "3"};
    ASSERT_EQ(etg::cli::run(args), 0);
    const std::string train = slurp(dir_ / "ds" / "train.jsonl");
    const std::string test = slurp(dir_ / "ds" / "test.jsonl");
    ASSERT_EQ(etg::cli::run(args), 0);
    EXPECT_EQ(train, slurp(dir_ / "ds" / "train.jsonl"));
    EXPECT_EQ(test, slurp(dir_ / "ds" / "test.jsonl"));

    const auto tr = read_jsonl(dir_ / "ds" / "train.jsonl");
    const auto te = read_jsonl(dir_ / "ds" / "test.jsonl");
    // Two allowlisted documents, one held out; training rows carry 4 permutations.
    ASSERT_EQ(te.size(), 1u);
    ASSERT_EQ(tr.size(), 5u);
    EXPECT_NE(tr[0]["doc_id"], te[0]["doc_id"]);
    for (const auto& rows : {tr, te}) {
        for (const auto& r : rows) {
            EXPECT_NE(r["doc_id"], "nyt-001");
            for (const auto& e : etg::parse(r["target"].get<std::string>()).edge_list()) {
                EXPECT_TRUE(etg::is_merged_label(e.relation()));
            }
        }
    }
}

TEST_F(Cli, PipelineAppearanceOrderTarget) {
    ASSERT_EQ(etg::cli::run({"pipeline", "--in", fixture("annotations.jsonl"), "--out", tmp("ds"), "--merge",
                             "--k", "0", "--test-fraction", "0"}),
              0);
    const auto rows = read_jsonl(dir_ / "ds" / "train.jsonl");
    EXPECT_EQ(rows[0]["target"],
              "strict graph {\n"
              "\"Rebels attacked the convoy\" -- \"Troops responded\" [rel=before];\n"
              "\"Rebels attacked the convoy\" -- \"Officials met with reporters\" [rel=before];\n"
              "\"the clash\" -- \"Rebels attacked the convoy\" [rel=includes];\n"
              "\"the clash\" -- \"Officials met with reporters\" [rel=before];\n"
              "}");
}

TEST_F(Cli, EvalIdenticalFilesScoresOne) {
    ASSERT_EQ(etg::cli::run({"pipeline", "--in", fixture("annotations.jsonl"), "--out", tmp("ds"), "--k", "0",
                             "--test-fraction", "0"}),
              0);
    const std::string gold = (dir_ / "ds" / "train.jsonl").string();
    ASSERT_EQ(etg::cli::run({"eval", "--pred", gold, "--gold", gold, "--out", tmp("report.json")}), 0);
    const auto r = json::parse(slurp(tmp("report.json")));
    for (const char* avg : {"macro", "micro"}) {
        for (const char* part : {"node", "edge"}) EXPECT_EQ(r[avg][part]["f1"], 1.0) << avg << part;
    }
    EXPECT_EQ(r["per_doc"].size(), 3u);
    EXPECT_TRUE(r["stats"]["gold"]["avg_node_degree"].is_number());
}

TEST_F(Cli, EvalMergeAlignsReciprocalPredictions) {
    {
        std::ofstream g(tmp("gold.jsonl")), p(tmp("pred.jsonl"));
        g << json{{"doc_id", "d"}, {"target", "strict graph {\n\"a\" -- \"b\" [rel=before];\n}"}}.dump() << '\n';
        p << json{{"doc_id", "d"}, {"target", "strict graph {\n\"b\" -- \"a\" [rel=after];\n}"}}.dump() << '\n';
        p << json{{"doc_id", "unknown"}, {"target", ""}}.dump() << '\n';
    }
    ASSERT_EQ(etg::cli::run({"eval", "--in", tmp("pred.jsonl"), "--gold", tmp("gold.jsonl"), "--out", tmp("r1")}), 0);
    EXPECT_EQ(json::parse(slurp(tmp("r1")))["micro"]["edge"]["f1"], 0.0);
    ASSERT_EQ(etg::cli::run({"eval", "--merge", "--in", tmp("pred.jsonl"), "--gold", tmp("gold.jsonl"), "--out",
                             tmp("r2")}),
              0);
    EXPECT_EQ(json::parse(slurp(tmp("r2")))["micro"]["edge"]["f1"], 1.0);
}

TEST_F(Cli, SprZeroFixture) {
    ASSERT_EQ(etg::cli::run({"spr", "--in", fixture("spr_zero_sampled.json"), "--gold", fixture("spr_zero_gold.json"),
                             "--out", tmp("spr.json")}),
              0);
    const auto r = json::parse(slurp(tmp("spr.json")));
    EXPECT_EQ(r["spr_total"], 0.0);
    EXPECT_TRUE(r["combined_loss"].is_null());
}

TEST_F(Cli, SprPartialFixture) {
    ASSERT_EQ(etg::cli::run({"spr", "--in", fixture("spr_partial_sampled.json"), "--gold",
                             fixture("spr_partial_gold.json"), "--out", tmp("spr.json"), "--ce", "2", "--step", "5",
                             "--warmup", "5"}),
              0);
    const auto r = json::parse(slurp(tmp("spr.json")));
    EXPECT_EQ(r["r_dupl"], 1.0);
    EXPECT_EQ(r["r_card"], 1.0);
    EXPECT_NEAR(r["d_hausdorff"].get<double>(), 0.1772513878160486, 1e-12);
    EXPECT_NEAR(r["spr_total"].get<double>(), 2.1772513878160487, 1e-12);
    EXPECT_NEAR(r["combined_loss"].get<double>(), 2.0886256939080243, 1e-12);
    EXPECT_EQ(r["active"], true);
}

TEST_F(Cli, EfIdfTsv) {
    ASSERT_EQ(etg::cli::run({"efidf", "--in", fixture("annotations.jsonl"), "--out", tmp("s.tsv")}), 0);
    const std::string tsv = slurp(tmp("s.tsv"));
    std::istringstream in(tsv);
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line); ++lines) {
        EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 2) << line;
    }
    // 4 + 3 + 4 + 4 (nyt-003 counted under both of its descriptors) entries.
    EXPECT_EQ(lines, 15u);
    // |D| = 3; "the storm" occurs only under two descriptors, 1 of 4 mentions in each.
    EXPECT_NE(tsv.find("the storm\tairlines and airplanes\t0.101366\n"), std::string::npos);
}

TEST_F(Cli, Schedule) {
    ASSERT_EQ(etg::cli::run({"schedule", "--warmup-epochs", "10", "--spr-epochs", "3", "--steps-per-epoch", "100",
                             "--out", tmp("s.json")}),
              0);
    EXPECT_EQ(json::parse(slurp(tmp("s.json"))),
              json::parse(R"([{"step_start":0,"active":false},{"step_start":1000,"active":true}])"));
}

TEST_F(Cli, UsageAndInputErrors) {
    EXPECT_EQ(etg::cli::run({}), 1);
    EXPECT_EQ(etg::cli::run({"--help"}), 0);
    EXPECT_EQ(etg::cli::run({"frobnicate"}), 1);
    EXPECT_EQ(etg::cli::run({"parse", "--in", fixture("figure_target.dot"), "--bogus"}), 1);
    EXPECT_EQ(etg::cli::run({"parse", "--in", fixture("figure_target.dot"), "--k", "4"}), 1);
    EXPECT_EQ(etg::cli::run({"parse", "--in", tmp("missing.dot")}), 1);
    EXPECT_EQ(etg::cli::run({"parse", "--in", fixture("figure_target.dot"), "--out", tmp("no/such/dir/x")}), 1);
    {
        std::ofstream bad(tmp("bad.jsonl"));
        bad << "{not json\n";
    }
    EXPECT_EQ(etg::cli::run({"augment", "--in", tmp("bad.jsonl"), "--out", tmp("o")}), 1);
    EXPECT_EQ(etg::cli::run({"eval", "--in", fixture("annotations.jsonl")}), 1);
    EXPECT_EQ(etg::cli::run({"spr", "--in", fixture("spr_zero_sampled.json"), "--gold", fixture("spr_zero_gold.json"),
                             "--lambda", "2"}),
              1);
    EXPECT_EQ(etg::cli::run({"pipeline", "--in", fixture("annotations.jsonl"), "--out", tmp("p"), "--order", "sideways"}),
              1);
}

TEST_F(Cli, AugmentSkipsUnparseableRows) {
    {
        std::ofstream f(tmp("in.jsonl"));
        f << json{{"doc_id", "ok"}, {"input", "x"}, {"target", "strict graph {\n\"a\" -- \"b\" [rel=before];\n}"}}.dump()
          << '\n';
        f << json{{"doc_id", "bad"}, {"input", "y"}, {"target", "strict graph {\nnonsense\n}"}}.dump() << '\n';
    }
    ASSERT_EQ(etg::cli::run({"augment", "--in", tmp("in.jsonl"), "--out", tmp("out.jsonl"), "--k", "2"}), 0);
    EXPECT_EQ(read_jsonl(tmp("out.jsonl")).size(), 3u);
}
