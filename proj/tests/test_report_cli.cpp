#include "moba/cli.hpp"
#include "moba/report.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace moba;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() /
                ("moba_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
        fs::create_directories(root_);
        ASSERT_EQ(call({"synth", "--npos", "120", "--nneg", "180", "--mu-pos", "1.2", "--mu-neg", "0", "--seed", "4",
                        "--out", dir("data")}),
                  cli::kSuccess);
        scores_ = dir("data") + "/scores.csv";
    }
    void TearDown() override { fs::remove_all(root_); }

    int call(const std::vector<std::string>& args) {
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }
    std::string dir(const std::string& name) const { return (root_ / name).string(); }

    fs::path root_;
    std::string scores_;
    std::ostringstream out_;
    std::ostringstream err_;
};

EvaluatedSolution sol(const RejectionConfusion& c, double t1, double t2) { return evaluate_solution(c, {t1, t2}); }

} // namespace

TEST(Report, FormatNumberRoundTrips) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(0.1 + 0.2), "0.30000000000000004");
    EXPECT_EQ(format_number(-2.5), "-2.5");
}

TEST(Report, ParetoJsonRoundTrip) {
    const std::vector<EvaluatedSolution> in{sol({3, 1, 1, 1, 3, 1}, 0.25, 0.5), sol({4, 0, 1, 0, 2, 3}, -1, 2)};
    const auto doc = pareto_json("moba", {7, 20, 100, 0.1, 0.2, 5, 5}, in);
    EXPECT_EQ(doc["metadata"]["seed"], 7);
    EXPECT_EQ(doc["metadata"]["p_max"], 0.1);
    EXPECT_EQ(doc["solutions"].size(), 2u);
    EXPECT_EQ(doc["solutions"][0]["rpr"], 0.2);
    EXPECT_TRUE(doc["solutions"][1]["fpr"].is_number());
    const auto out = solutions_from_json(json::parse(doc.dump()));
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[1].confusion, in[1].confusion);
    EXPECT_EQ(out[1].thresholds, in[1].thresholds);
}

TEST(Report, UndefinedRateIsNull) {
    const auto j = solution_json(sol({2, 1, 0, 0, 0, 2}, 0.35, 0.65), true);
    EXPECT_TRUE(j["fpr"].is_null());
    EXPECT_DOUBLE_EQ(j["fnr"].get<double>(), 1.0 / 3.0);
}

TEST(Report, MalformedParetoDocument) {
    EXPECT_THROW(solutions_from_json(json::parse(R"({"solutions":[{"t1":0}]})")), DataError);
    EXPECT_THROW(solutions_from_json(json::parse(R"({"model":"x"})")), DataError);
    EXPECT_THROW(solutions_from_json(json::parse(
                     R"({"solutions":[{"t1":0,"t2":1,"confusion":{"tp":-1,"fn":0,"rp":0,"fp":0,"tn":1,"rn":0}}]})")),
                 DataError);
}

TEST(Report, CsvLayouts) {
    std::ostringstream cmp;
    const std::pair<std::string, ComparisonCounts> row{"cm1", {744, 158, 98, 12, 0}};
    write_comparison_csv(cmp, std::span(&row, 1));
    EXPECT_EQ(cmp.str(), "cost_model,lower,higher,identical,not_activated\ncm1,744,158,98,12\n");

    std::ostringstream curves;
    const std::vector<CurvePoint> pts{{0.01, CurveModel::Ba, 0.8, 0.75, std::nullopt, 0.0},
                                      {0.01, CurveModel::Moba, 0.5, 0.5, 0.5, 0.01}};
    write_curve_csv(curves, pts);
    EXPECT_EQ(curves.str(), "reject_param,model,acc,auc,gmean,observed_rej\n0.01,BA,0.8,0.75,NA,0\n"
                            "0.01,MOBA,0.5,0.5,0.5,0.01\n");
}

TEST(Report, SvgHasBothSeries) {
    const std::vector<CurvePoint> pts{{0.01, CurveModel::Ba, 0.8, 0.75, 0.7, 0.0},
                                      {0.01, CurveModel::Moba, 0.7, 0.8, 0.79, 0.01},
                                      {0.03, CurveModel::Ba, 0.82, 0.76, 0.71, 0.02},
                                      {0.03, CurveModel::Moba, 0.72, 0.81, 0.8, 0.03}};
    const auto svg = curve_svg(pts, SelectionMetric::Auc);
    EXPECT_NE(svg.find("viewBox=\"0 0 800 600\""), std::string::npos);
    EXPECT_NE(svg.find(">MOBA<"), std::string::npos);
    EXPECT_NE(svg.find(">BA<"), std::string::npos);
    EXPECT_NE(svg.find("AUC-Rej"), std::string::npos);
    EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST_F(CliTest, HelpAndUsageErrors) {
    EXPECT_EQ(call({"--help"}), cli::kSuccess);
    EXPECT_EQ(call({}), cli::kUsageError);
    EXPECT_EQ(call({"frobnicate"}), cli::kUsageError);
    EXPECT_EQ(call({"optimize", "--scores", scores_, "--out", dir("o"), "--pmax", "1.5"}), cli::kUsageError);
    EXPECT_EQ(call({"optimize", "--scores", scores_, "--out", dir("o"), "--popsize", "7"}), cli::kUsageError);
    EXPECT_EQ(call({"optimize", "--scores", scores_, "--out", dir("o"), "--seed", "abc"}), cli::kUsageError);
    EXPECT_EQ(call({"compare-costs", "--scores", scores_, "--out", dir("o"), "--cost-model", "cm9"}),
              cli::kUsageError);
    EXPECT_EQ(call({"synth", "--sigma", "0", "--out", dir("o")}), cli::kUsageError);
    // nothing is written when validation fails
    EXPECT_FALSE(fs::exists(dir("o")));
}

TEST_F(CliTest, MissingOrMalformedInputIsDataError) {
    EXPECT_EQ(call({"optimize", "--scores", dir("none.csv"), "--out", dir("o")}), cli::kDataError);
    std::ofstream(dir("bad.csv")) << "id,label,score\na,+1,abc\n";
    EXPECT_EQ(call({"optimize", "--scores", dir("bad.csv"), "--out", dir("o")}), cli::kDataError);
    EXPECT_NE(err_.str().find("row 1"), std::string::npos);
    std::ofstream(dir("bad.json")) << "{not json";
    EXPECT_EQ(call({"select", "--pareto", dir("bad.json"), "--mode", "best-metric", "--out", dir("o")}),
              cli::kDataError);
}

TEST_F(CliTest, OptimizeWritesParetoWithDefaults) {
    ASSERT_EQ(call({"optimize", "--scores", scores_, "--seed", "42", "--out", dir("a")}), cli::kSuccess);
    const auto doc = json::parse(slurp(dir("a") + "/pareto.json"));
    EXPECT_EQ(doc["metadata"]["popsize"], 20);
    EXPECT_EQ(doc["metadata"]["gensize"], 100);
    EXPECT_EQ(doc["metadata"]["p_max"], 0.1);
    EXPECT_EQ(doc["metadata"]["n_max"], 0.1);
    EXPECT_EQ(doc["metadata"]["seed"], 42);
    ASSERT_GE(doc["solutions"].size(), 1u);
    EXPECT_LE(doc["solutions"].size(), 20u);
    for (const auto& s : doc["solutions"]) {
        EXPECT_LE(s["rpr"].get<double>(), 0.1);
        EXPECT_LE(s["rnr"].get<double>(), 0.1);
        EXPECT_LT(s["t1"].get<double>(), s["t2"].get<double>());
        EXPECT_TRUE(s["feasible"].get<bool>());
    }
    EXPECT_TRUE(fs::exists(dir("a") + "/pareto.txt"));
    EXPECT_NE(out_.str().find("rpr"), std::string::npos);

    ASSERT_EQ(call({"optimize", "--scores", scores_, "--seed", "42", "--out", dir("b")}), cli::kSuccess);
    EXPECT_EQ(slurp(dir("a") + "/pareto.json"), slurp(dir("b") + "/pareto.json"));
}

TEST_F(CliTest, OptimizeWithoutFeasiblePairExitsThree) {
    // two adjacent doubles: every t1 < t2 inside the score range rejects the upper example
    std::ofstream(dir("tight.csv")) << "id,label,score\na,-1,0.5\nb,+1,0.5000000000000001\n";
    EXPECT_EQ(call({"optimize", "--scores", dir("tight.csv"), "--pmax", "0", "--nmax", "0", "--gensize", "5",
                    "--out", dir("o")}),
              cli::kNoFeasible);
    EXPECT_NE(err_.str().find("p_max=0"), std::string::npos);
}

TEST_F(CliTest, BaselineModels) {
    EXPECT_EQ(call({"baseline", "--scores", scores_, "--model", "ba", "--out", dir("b")}), cli::kUsageError);
    EXPECT_EQ(call({"baseline", "--scores", scores_, "--model", "tortorella", "--ctp", "-1", "--out", dir("b")}),
              cli::kUsageError);

    ASSERT_EQ(call({"baseline", "--scores", scores_, "--model", "ba", "--kmax", "0.1", "--out", dir("b")}),
              cli::kSuccess);
    const auto ba = json::parse(slurp(dir("b") + "/baseline_ba.json"));
    EXPECT_LE(ba["result"]["rej"].get<double>(), 0.1);
    EXPECT_EQ(ba["result"]["cfn"], 1.0);
    const auto data = load_scored_csv(scores_);
    EXPECT_EQ(ba["result"]["objective"].get<double>(), oracle::ba_brute_force(data, 0.1, 1.0, 1.0));

    ASSERT_EQ(call({"baseline", "--scores", scores_, "--model", "tortorella", "--ctp", "-10", "--ctn", "-10", "--cfp",
                    "2", "--cfn", "1.5", "--crp", "1", "--crn", "1", "--out", dir("t")}),
              cli::kSuccess);
    const auto tort = json::parse(slurp(dir("t") + "/baseline_tortorella.json"));
    EXPECT_FALSE(tort["result"]["activated"].get<bool>());
    EXPECT_EQ(tort["result"]["t1"], tort["result"]["t2"]);

    ASSERT_EQ(call({"baseline", "--scores", scores_, "--model", "tortorella", "--ctp", "-10", "--ctn", "-10", "--cfp",
                    "2", "--cfn", "1.5", "--crp", "1", "--crn", "1", "--out", dir("t2")}),
              cli::kSuccess);
    EXPECT_EQ(slurp(dir("t") + "/baseline_tortorella.json"), slurp(dir("t2") + "/baseline_tortorella.json"));
}

TEST_F(CliTest, SelectFromParetoFile) {
    ASSERT_EQ(call({"optimize", "--scores", scores_, "--seed", "3", "--pmax", "0.2", "--nmax", "0.2", "--out",
                    dir("p")}),
              cli::kSuccess);
    const std::string pareto = dir("p") + "/pareto.json";
    const auto doc = json::parse(slurp(pareto));
    const auto solutions = solutions_from_json(doc);
    const auto data = load_scored_csv(scores_);
    const double p_pos = static_cast<double>(data.n_pos()) / static_cast<double>(data.size());

    const std::vector<std::string> cost_flags{"--ctp", "-3", "--ctn", "-2", "--cfp", "30",
                                              "--cfn", "10", "--crp", "1",  "--crn", "1"};
    std::vector<std::string> args{"select", "--pareto", pareto, "--mode", "min-cost", "--out", dir("s")};
    args.insert(args.end(), cost_flags.begin(), cost_flags.end());
    ASSERT_EQ(call(args), cli::kSuccess);
    const auto chosen = json::parse(slurp(dir("s") + "/selected.json"));
    const CostMatrix costs{-3, -2, 30, 10, 1, 1};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : solutions) best = std::min(best, oracle::cost_from_counts(s.confusion, p_pos, costs));
    EXPECT_NEAR(chosen["selection"]["expected_cost"].get<double>(), best, 1e-12);
    const std::string first = slurp(dir("s") + "/selected.json");
    ASSERT_EQ(call(args), cli::kSuccess);
    EXPECT_EQ(slurp(dir("s") + "/selected.json"), first);

    // different costs, same file
    args[args.size() - 5] = "50";
    ASSERT_EQ(call(args), cli::kSuccess);

    ASSERT_EQ(call({"select", "--pareto", pareto, "--mode", "best-metric", "--metric", "auc", "--out", dir("m")}),
              cli::kSuccess);
    const auto by_auc = json::parse(slurp(dir("m") + "/selected.json"));
    double top = 0.0;
    for (const auto& s : solutions) {
        if (s.metrics.auc) top = std::max(top, *s.metrics.auc);
    }
    EXPECT_EQ(by_auc["auc"].get<double>(), top);

    EXPECT_EQ(call({"select", "--pareto", pareto, "--mode", "min-cost", "--out", dir("x")}), cli::kUsageError);
    EXPECT_EQ(call({"select", "--pareto", pareto, "--mode", "best-metric", "--pcap", "0", "--ncap", "0", "--cap",
                    "0", "--out", dir("x")}),
              cli::kNoFeasible);
}

TEST_F(CliTest, CompareCostsAndCurves) {
    ASSERT_EQ(call({"compare-costs", "--scores", scores_, "--cost-model", "cm1", "--trials", "25", "--gensize", "20",
                    "--seed", "1", "--out", dir("c")}),
              cli::kSuccess);
    const auto csv = slurp(dir("c") + "/comparison.csv");
    EXPECT_EQ(csv.rfind("cost_model,lower,higher,identical,not_activated\ncm1,", 0), 0u);
    std::istringstream rows(csv);
    std::string header, line;
    std::getline(rows, header);
    std::getline(rows, line);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string name;
    std::size_t lower, higher, identical, not_activated;
    fields >> name >> lower >> higher >> identical >> not_activated;
    EXPECT_EQ(lower + higher + identical, 25u);
    EXPECT_LE(not_activated, identical);

    ASSERT_EQ(call({"curves", "--scores", scores_, "--gensize", "20", "--seed", "1", "--out", dir("v")}),
              cli::kSuccess);
    std::istringstream curve(slurp(dir("v") + "/curves.csv"));
    std::getline(curve, header);
    EXPECT_EQ(header, "reject_param,model,acc,auc,gmean,observed_rej");
    std::size_t n = 0;
    std::vector<std::pair<double, std::string>> keys;
    while (std::getline(curve, line)) {
        ++n;
        const auto comma = line.find(',');
        const auto second = line.find(',', comma + 1);
        keys.push_back({std::stod(line.substr(0, comma)), line.substr(comma + 1, second - comma - 1)});
    }
    EXPECT_EQ(n, 30u);
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
    for (const char* svg : {"acc_rej.svg", "auc_rej.svg", "g_rej.svg"}) {
        const auto text = slurp(dir("v") + "/" + svg);
        EXPECT_NE(text.find(">MOBA<"), std::string::npos);
        EXPECT_NE(text.find(">BA<"), std::string::npos);
    }
}
