#include "moba/cli.hpp"

#include "moba/baselines.hpp"
#include "moba/data.hpp"
#include "moba/harness.hpp"
#include "moba/nsga2.hpp"
#include "moba/report.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace moba::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CommonOptions {
    std::string scores;
    std::uint64_t seed = 0;
    std::string out_dir;
};

struct OptimizerOptions {
    MobaConfig cfg;
};

struct BaselineOptions {
    std::string model;
    std::optional<double> k_max;
    std::optional<double> ctp, ctn, cfp, cfn, crp, crn;
    std::optional<double> prior_pos;
};

struct ExperimentOptions {
    std::string cost_model = "cm1";
    std::size_t trials = 1000;
    bool joint_correct_costs = false;
    double valid_frac = 0.2;
    double test_frac = 0.2;
};

struct SelectOptions {
    std::string pareto;
    std::string mode;
    std::string metric = "auc";
    std::optional<double> cap;
    double p_cap = 1.0;
    double n_cap = 1.0;
};

struct SynthOptions {
    std::size_t n_pos = 100;
    std::size_t n_neg = 100;
    double mu_pos = 1.0;
    double mu_neg = -1.0;
    double sigma = 1.0;
};

void add_optimizer_flags(CLI::App& cmd, MobaConfig& cfg) {
    cmd.add_option("--popsize", cfg.popsize, "Population size (even, >= 4)")->capture_default_str();
    cmd.add_option("--gensize", cfg.gensize, "Number of generations")->capture_default_str();
    cmd.add_option("--pc", cfg.crossover_prob, "Crossover probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd.add_option("--pm", cfg.mutation_prob, "Per-variable mutation probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd.add_option("--eta-c", cfg.eta_c, "SBX distribution index")->check(CLI::NonNegativeNumber)->capture_default_str();
    cmd.add_option("--eta-m", cfg.eta_m, "Mutation distribution index")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

void add_cost_flags(CLI::App& cmd, BaselineOptions& o) {
    cmd.add_option("--ctp", o.ctp, "Cost of a true positive");
    cmd.add_option("--ctn", o.ctn, "Cost of a true negative");
    cmd.add_option("--cfp", o.cfp, "Cost of a false positive");
    cmd.add_option("--cfn", o.cfn, "Cost of a false negative");
    cmd.add_option("--crp", o.crp, "Cost of rejecting a positive");
    cmd.add_option("--crn", o.crn, "Cost of rejecting a negative");
    cmd.add_option("--prior-pos", o.prior_pos, "Positive-class prior (default: class frequency)")
        ->check(CLI::Range(0.0, 1.0));
}

CostMatrix require_costs(const BaselineOptions& o) {
    const std::pair<const char*, const std::optional<double>*> fields[] = {
        {"--ctp", &o.ctp}, {"--ctn", &o.ctn}, {"--cfp", &o.cfp},
        {"--cfn", &o.cfn}, {"--crp", &o.crp}, {"--crn", &o.crn},
    };
    for (const auto& [flag, value] : fields) {
        if (!value->has_value()) throw UsageError(std::string("missing required cost flag ") + flag);
    }
    CostMatrix costs{*o.ctp, *o.ctn, *o.cfp, *o.cfn, *o.crp, *o.crn};
    try {
        costs.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return costs;
}

void validate_config(const MobaConfig& cfg) {
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) {
        throw DataError("cannot write '" + path.string() + "'");
    }
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
    return p;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

DatasetSplit split_for_experiment(const ScoredDataset& data, const ExperimentOptions& o, std::uint64_t seed) {
    SplitSpec spec{1.0 - o.valid_frac - o.test_frac, o.valid_frac, o.test_frac, seed};
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return stratified_split(data, spec);
}

int cmd_optimize(const CommonOptions& common, MobaConfig cfg, std::ostream& out) {
    cfg.seed = common.seed;
    validate_config(MobaConfig{cfg});

    const auto valid = load_scored_csv(common.scores);
    require_both_classes(valid, "validation");
    cfg = with_score_bounds(cfg, valid);

    const auto result = evolve(valid, cfg);
    const auto solutions = evaluate_pareto(valid, result.pareto);
    const auto doc = pareto_json("moba", run_metadata(cfg, valid), solutions);
    const auto table = solution_table(solutions);

    const auto dir = prepare_out_dir(common.out_dir);
    write_text(dir / "pareto.json", dump(doc));
    write_text(dir / "pareto.txt", table);
    out << table;
    return kSuccess;
}

int cmd_baseline(const CommonOptions& common, const BaselineOptions& o, std::ostream& out) {
    std::optional<CostMatrix> costs;
    double cfn = 1.0;
    double cfp = 1.0;
    if (o.model == "tortorella") {
        costs = require_costs(o);
    } else {
        if (!o.k_max) throw UsageError("ba requires --kmax");
        cfn = o.cfn.value_or(1.0);
        cfp = o.cfp.value_or(1.0);
    }

    const auto valid = load_scored_csv(common.scores);
    require_both_classes(valid, "validation");
    const RunMetadata meta{common.seed, 0, 0, 0.0, 0.0, valid.n_pos(), valid.n_neg()};

    json doc;
    if (costs) {
        ClassPriors priors = empirical_priors(valid);
        if (o.prior_pos) priors = {*o.prior_pos, 1.0 - *o.prior_pos};
        const auto r = tortorella_optimize(valid, *costs, priors);
        const EvaluatedSolution sol = evaluate_solution(r.confusion, r.thresholds);
        doc = pareto_json("tortorella", meta, std::span(&sol, 1));
        doc["result"] = {
            {"activated", r.activated()},
            {"zero_denominator", r.activation.zero_denominator},
            {"cost", r.cost},
            {"t1", r.thresholds.t1},
            {"t2", r.thresholds.t2},
            {"rpr", r.rpr},
            {"rnr", r.rnr},
            {"p_pos", priors.p_pos},
        };
        out << "tortorella: activated=" << (r.activated() ? "true" : "false") << " t1=" << format_number(r.thresholds.t1)
            << " t2=" << format_number(r.thresholds.t2) << " cost=" << format_number(r.cost) << '\n';
        if (r.activation.zero_denominator) {
            out << "note: activation inequality has a zero denominator (CFN == CRP or CTP == CRP)\n";
        }
    } else {
        const auto r = ba_optimize(valid, *o.k_max, cfn, cfp);
        const EvaluatedSolution sol = evaluate_solution(r.confusion, r.thresholds);
        doc = pareto_json("ba", meta, std::span(&sol, 1));
        doc["result"] = {
            {"objective", r.objective}, {"k_max", *o.k_max},    {"cfn", cfn},        {"cfp", cfp},
            {"t1", r.thresholds.t1},    {"t2", r.thresholds.t2}, {"rej", r.reject_rate},
            {"rpr", sol.metrics.rpr},   {"rnr", sol.metrics.rnr},
        };
        out << "ba: t1=" << format_number(r.thresholds.t1) << " t2=" << format_number(r.thresholds.t2)
            << " objective=" << format_number(r.objective) << " rej=" << format_number(r.reject_rate) << '\n';
    }
    const auto dir = prepare_out_dir(common.out_dir);
    write_text(dir / ("baseline_" + o.model + ".json"), dump(doc));
    return kSuccess;
}

int cmd_compare_costs(const CommonOptions& common, const ExperimentOptions& o, MobaConfig cfg, std::ostream& out) {
    auto spec = find_cost_model(o.cost_model);
    if (!spec) throw UsageError("unknown cost model '" + o.cost_model + "'");
    spec->joint_correct_costs = o.joint_correct_costs;
    if (o.trials == 0) throw UsageError("--trials must be >= 1");
    validate_config(cfg);

    const auto data = load_scored_csv(common.scores);
    const auto split = split_for_experiment(data, o, common.seed);
    cfg = with_score_bounds(cfg, split.train);

    const auto counts = cost_comparison_experiment(split.valid, split.test, *spec, o.trials, cfg, common.seed);
    const std::pair<std::string, ComparisonCounts> row{spec->name, counts};
    std::ostringstream csv;
    write_comparison_csv(csv, std::span(&row, 1));

    const auto dir = prepare_out_dir(common.out_dir);
    write_text(dir / "comparison.csv", csv.str());
    out << spec->name << " (" << o.trials << " cost matrices)\n"
        << "  lower     " << counts.lower << '\n'
        << "  higher    " << counts.higher << '\n'
        << "  identical " << counts.identical << "  (not activated: " << counts.not_activated << ")\n";
    if (counts.moba_no_feasible > 0) {
        out << "  note: " << counts.moba_no_feasible
            << " trial(s) found no feasible pair and reused the baseline thresholds\n";
    }
    return kSuccess;
}

int cmd_curves(const CommonOptions& common, const ExperimentOptions& o, MobaConfig cfg, std::ostream& out) {
    validate_config(cfg);
    const auto data = load_scored_csv(common.scores);
    const auto split = split_for_experiment(data, o, common.seed);
    cfg = with_score_bounds(cfg, split.train);

    const auto points = curve_sweep(split.valid, split.test, cfg, common.seed);
    std::ostringstream csv;
    write_curve_csv(csv, points);

    const auto dir = prepare_out_dir(common.out_dir);
    write_text(dir / "curves.csv", csv.str());
    write_text(dir / "acc_rej.svg", curve_svg(points, SelectionMetric::Accuracy));
    write_text(dir / "auc_rej.svg", curve_svg(points, SelectionMetric::Auc));
    write_text(dir / "g_rej.svg", curve_svg(points, SelectionMetric::GMean));
    out << csv.str();
    return kSuccess;
}

int cmd_select(const CommonOptions& common, const SelectOptions& s, const BaselineOptions& costs_in,
               std::ostream& out) {
    std::optional<CostMatrix> costs;
    if (s.mode == "min-cost") costs = require_costs(costs_in);

    json doc;
    {
        std::ifstream f(s.pareto, std::ios::binary);
        if (!f) throw DataError("cannot open Pareto file '" + s.pareto + "'");
        try {
            doc = json::parse(f);
        } catch (const json::exception& e) {
            throw DataError(std::string("cannot parse Pareto file: ") + e.what());
        }
    }
    const auto solutions = solutions_from_json(doc);

    std::size_t chosen = 0;
    json rationale;
    if (costs) {
        ClassPriors priors;
        if (costs_in.prior_pos) {
            priors = {*costs_in.prior_pos, 1.0 - *costs_in.prior_pos};
        } else {
            try {
                const double np = doc.at("metadata").at("n_pos").get<double>();
                const double nn = doc.at("metadata").at("n_neg").get<double>();
                priors = {np / (np + nn), nn / (np + nn)};
            } catch (const json::exception&) {
                throw UsageError("Pareto file carries no class counts; pass --prior-pos");
            }
        }
        chosen = select_min_cost(solutions, *costs, priors);
        json all_costs = json::array();
        for (const auto& sol : solutions) all_costs.push_back(expected_cost(sol.metrics, priors, *costs));
        rationale = {{"mode", "min-cost"},
                     {"p_pos", priors.p_pos},
                     {"expected_cost", all_costs[chosen]},
                     {"candidate_costs", all_costs}};
    } else {
        static const std::map<std::string, SelectionMetric> metrics{
            {"acc", SelectionMetric::Accuracy}, {"auc", SelectionMetric::Auc}, {"g", SelectionMetric::GMean}};
        const auto metric = metrics.at(s.metric);
        const RejectCaps caps{s.p_cap, s.n_cap, s.cap};
        chosen = select_best_under_cap(solutions, metric, caps);
        rationale = {{"mode", "best-metric"},
                     {"metric", s.metric},
                     {"value", *metric_value(solutions[chosen].metrics, metric)},
                     {"p_cap", s.p_cap},
                     {"n_cap", s.n_cap},
                     {"cap", s.cap ? json(*s.cap) : json(nullptr)}};
    }

    const auto& sol = solutions[chosen];
    json result = solution_json(sol, true);
    result["index"] = chosen;
    result["rej"] = sol.metrics.rej;
    result["acc"] = sol.metrics.acc ? json(*sol.metrics.acc) : json(nullptr);
    result["auc"] = sol.metrics.auc ? json(*sol.metrics.auc) : json(nullptr);
    result["gmean"] = sol.metrics.gmean ? json(*sol.metrics.gmean) : json(nullptr);
    result["selection"] = rationale;

    const auto dir = prepare_out_dir(common.out_dir);
    write_text(dir / "selected.json", dump(result));
    out << "selected #" << chosen << ": t1=" << format_number(sol.thresholds.t1)
        << " t2=" << format_number(sol.thresholds.t2) << '\n';
    return kSuccess;
}

int cmd_synth(const CommonOptions& common, const SynthOptions& o, std::ostream& out) {
    ScoredDataset data;
    try {
        data = synth_two_gaussian(o.n_pos, o.n_neg, o.mu_pos, o.mu_neg, o.sigma, common.seed);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto dir = prepare_out_dir(common.out_dir);
    std::ostringstream csv;
    write_scored_csv(data, csv);
    write_text(dir / "scores.csv", csv.str());
    out << "wrote " << data.size() << " examples to " << (dir / "scores.csv").string() << '\n';
    return kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Abstaining-classifier threshold optimisation under per-class reject caps"};
    app.require_subcommand(1);

    CommonOptions common;
    MobaConfig cfg;
    BaselineOptions baseline;
    ExperimentOptions experiment;
    SelectOptions select;
    SynthOptions synth;

    auto add_common = [&](CLI::App& cmd, bool needs_scores) {
        auto* scores = cmd.add_option("--scores", common.scores, "Scores CSV (id,label,score)");
        if (needs_scores) scores->required();
        cmd.add_option("--seed", common.seed, "Random seed")->capture_default_str();
        cmd.add_option("--out", common.out_dir, "Output directory")->required();
    };

    auto* optimize = app.add_subcommand("optimize", "Run the constrained NSGA-II and export the Pareto set");
    add_common(*optimize, true);
    optimize->add_option("--pmax", cfg.p_max, "Cap on the rejected-positive rate")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    optimize->add_option("--nmax", cfg.n_max, "Cap on the rejected-negative rate")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    add_optimizer_flags(*optimize, cfg);

    auto* base = app.add_subcommand("baseline", "Fit a comparison model (ba or tortorella)");
    add_common(*base, true);
    base->add_option("--model", baseline.model, "ba | tortorella")
        ->required()
        ->check(CLI::IsMember({"ba", "tortorella"}));
    base->add_option("--kmax", baseline.k_max, "Overall reject-rate cap (ba)")->check(CLI::Range(0.0, 1.0));
    add_cost_flags(*base, baseline);

    auto* compare = app.add_subcommand("compare-costs", "Count lower/higher/identical test costs vs the ROCCH model");
    add_common(*compare, true);
    compare->add_option("--cost-model", experiment.cost_model, "cm1 | cm2 | cm3 | cm4")
        ->check(CLI::IsMember({"cm1", "cm2", "cm3", "cm4"}))
        ->capture_default_str();
    compare->add_option("--trials", experiment.trials, "Number of sampled cost matrices")->capture_default_str();
    compare->add_flag("--joint-correct-costs", experiment.joint_correct_costs,
                      "Draw CTP and CTN as a single value");
    add_optimizer_flags(*compare, cfg);

    auto* curves = app.add_subcommand("curves", "Performance-rejection sweep against the BA model");
    add_common(*curves, true);
    add_optimizer_flags(*curves, cfg);

    for (auto* cmd : {compare, curves}) {
        cmd->add_option("--valid-frac", experiment.valid_frac, "Validation share of the scores file")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        cmd->add_option("--test-frac", experiment.test_frac, "Test share of the scores file")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
    }

    auto* sel = app.add_subcommand("select", "Pick one classifier from a Pareto file");
    add_common(*sel, false);
    sel->add_option("--pareto", select.pareto, "Pareto JSON from `optimize`")->required();
    sel->add_option("--mode", select.mode, "min-cost | best-metric")
        ->required()
        ->check(CLI::IsMember({"min-cost", "best-metric"}));
    sel->add_option("--metric", select.metric, "acc | auc | g")
        ->check(CLI::IsMember({"acc", "auc", "g"}))
        ->capture_default_str();
    sel->add_option("--cap", select.cap, "Cap on the overall reject rate")->check(CLI::Range(0.0, 1.0));
    sel->add_option("--pcap", select.p_cap, "Cap on the rejected-positive rate")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sel->add_option("--ncap", select.n_cap, "Cap on the rejected-negative rate")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    add_cost_flags(*sel, baseline);

    auto* syn = app.add_subcommand("synth", "Write a two-Gaussian synthetic scores file");
    add_common(*syn, false);
    syn->add_option("--npos", synth.n_pos, "Positive examples")->capture_default_str();
    syn->add_option("--nneg", synth.n_neg, "Negative examples")->capture_default_str();
    syn->add_option("--mu-pos", synth.mu_pos, "Mean positive score")->capture_default_str();
    syn->add_option("--mu-neg", synth.mu_neg, "Mean negative score")->capture_default_str();
    syn->add_option("--sigma", synth.sigma, "Score standard deviation")->capture_default_str();

    std::vector<const char*> argv{"moba"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (optimize->parsed()) return cmd_optimize(common, cfg, out);
        if (base->parsed()) return cmd_baseline(common, baseline, out);
        if (compare->parsed()) return cmd_compare_costs(common, experiment, cfg, out);
        if (curves->parsed()) return cmd_curves(common, experiment, cfg, out);
        if (sel->parsed()) return cmd_select(common, select, baseline, out);
        if (syn->parsed()) return cmd_synth(common, synth, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const NoFeasibleSolution& e) {
        err << "error: " << e.what() << '\n';
        return kNoFeasible;
    } catch (const NoEligibleSolution& e) {
        err << "error: " << e.what() << '\n';
        return kNoFeasible;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsageError;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace moba::cli
