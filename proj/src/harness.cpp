#include "moba/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>

namespace moba {

namespace {

void check_entry(const CostEntry& e, const char* name) {
    if (!std::isfinite(e.lo) || !std::isfinite(e.hi) || e.lo > e.hi) {
        throw std::invalid_argument(std::string("cost model entry ") + name + " must be finite with lo <= hi");
    }
}

double test_cost(const ScoreIndex& index, const ThresholdPair& t, const ClassPriors& priors,
                 const CostMatrix& costs) {
    return expected_cost(essential_metrics(index.confusion(t)), priors, costs);
}

} // namespace

void CostModelSpec::validate() const {
    check_entry(ctp, "ctp");
    check_entry(ctn, "ctn");
    check_entry(cfp, "cfp");
    check_entry(cfn, "cfn");
    check_entry(crp, "crp");
    check_entry(crn, "crn");
}

std::array<CostModelSpec, 4> builtin_cost_models() {
    const auto correct = CostEntry::uniform(-10.0, 0.0);
    CostModelSpec cm1{"cm1",
                      correct,
                      correct,
                      CostEntry::uniform(0.0, 50.0),
                      CostEntry::uniform(0.0, 50.0),
                      CostEntry::fixed(1.0),
                      CostEntry::fixed(1.0)};
    CostModelSpec cm2 = cm1;
    cm2.name = "cm2";
    cm2.cfp = CostEntry::uniform(0.0, 100.0);
    CostModelSpec cm3 = cm1;
    cm3.name = "cm3";
    cm3.cfn = CostEntry::uniform(0.0, 100.0);
    CostModelSpec cm4 = cm1;
    cm4.name = "cm4";
    cm4.crp = CostEntry::uniform(0.0, 30.0);
    cm4.crn = CostEntry::uniform(0.0, 30.0);
    return {cm1, cm2, cm3, cm4};
}

std::optional<CostModelSpec> find_cost_model(std::string_view name) {
    std::string lowered(name);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto& spec : builtin_cost_models()) {
        if (spec.name == lowered) return spec;
    }
    return std::nullopt;
}

CostMatrix sample_cost_matrix(const CostModelSpec& spec, RandomStream& rng) {
    CostMatrix c;
    c.ctp = spec.ctp.sample(rng);
    c.ctn = spec.joint_correct_costs ? c.ctp : spec.ctn.sample(rng);
    c.cfp = spec.cfp.sample(rng);
    c.cfn = spec.cfn.sample(rng);
    c.crp = spec.crp.sample(rng);
    c.crn = spec.crn.sample(rng);
    return c;
}

EvaluatedSolution evaluate_solution(const RejectionConfusion& c, const ThresholdPair& t) {
    return {t, c, essential_metrics(c)};
}

EvaluatedSolution evaluate_solution(const ScoredDataset& data, const ThresholdPair& t) {
    return evaluate_solution(classify_with_rejection(data, t), t);
}

std::vector<EvaluatedSolution> evaluate_pareto(const ScoredDataset& data, std::span<const Individual> pareto) {
    const ScoreIndex index(data);
    std::vector<EvaluatedSolution> out;
    out.reserve(pareto.size());
    for (const auto& ind : pareto) {
        out.push_back(evaluate_solution(index.confusion(ind.thresholds), ind.thresholds));
    }
    return out;
}

std::size_t select_min_cost(std::span<const EvaluatedSolution> solutions, const CostMatrix& costs,
                            const ClassPriors& priors) {
    if (solutions.empty()) {
        throw NoEligibleSolution("cannot select from an empty solution set");
    }
    std::size_t best = 0;
    double best_cost = expected_cost(solutions[0].metrics, priors, costs);
    for (std::size_t i = 1; i < solutions.size(); ++i) {
        const double cost = expected_cost(solutions[i].metrics, priors, costs);
        const auto& a = solutions[i];
        const auto& b = solutions[best];
        if (std::tie(cost, a.metrics.rej, a.thresholds.t1, a.thresholds.t2) <
            std::tie(best_cost, b.metrics.rej, b.thresholds.t1, b.thresholds.t2)) {
            best = i;
            best_cost = cost;
        }
    }
    return best;
}

std::optional<double> metric_value(const EssentialMetrics& m, SelectionMetric metric) {
    switch (metric) {
    case SelectionMetric::Accuracy: return m.acc;
    case SelectionMetric::Auc: return m.auc;
    case SelectionMetric::GMean: return m.gmean;
    }
    return std::nullopt;
}

bool RejectCaps::admits(const EssentialMetrics& m) const {
    return m.rpr <= p_cap && m.rnr <= n_cap && (!overall || m.rej <= *overall);
}

std::size_t select_best_under_cap(std::span<const EvaluatedSolution> solutions, SelectionMetric metric,
                                  const RejectCaps& caps) {
    std::optional<std::size_t> best;
    double best_value = 0.0;
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        const auto& s = solutions[i];
        const auto value = metric_value(s.metrics, metric);
        if (!value || !caps.admits(s.metrics)) continue;
        if (!best) {
            best = i;
            best_value = *value;
            continue;
        }
        const auto& b = solutions[*best];
        // larger metric first, so compare negated values
        if (std::make_tuple(-*value, s.metrics.rej, s.thresholds.t1, s.thresholds.t2) <
            std::make_tuple(-best_value, b.metrics.rej, b.thresholds.t1, b.thresholds.t2)) {
            best = i;
            best_value = *value;
        }
    }
    if (!best) {
        throw NoEligibleSolution("no solution satisfies the reject caps");
    }
    return *best;
}

ComparisonCounts cost_comparison_experiment(const ScoredDataset& valid, const ScoredDataset& test,
                                            const CostModelSpec& spec, std::size_t trials,
                                            const MobaConfig& cfg, std::uint64_t master_seed) {
    if (trials == 0) {
        throw std::invalid_argument("cost_comparison_experiment: trials must be >= 1");
    }
    spec.validate();
    cfg.validate();
    require_both_classes(valid, "validation");
    require_both_classes(test, "test");
    const ClassPriors valid_priors = empirical_priors(valid);
    const ClassPriors test_priors = empirical_priors(test);
    const ScoreIndex test_index(test);

    ComparisonCounts counts;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        RandomStream rng(child_seed(master_seed, trial));
        const CostMatrix costs = sample_cost_matrix(spec, rng);
        const auto baseline = tortorella_optimize(valid, costs, valid_priors);
        if (!baseline.activated()) {
            ++counts.identical;
            ++counts.not_activated;
            continue;
        }

        MobaConfig run = cfg;
        run.p_max = baseline.rpr;
        run.n_max = baseline.rnr;
        run.seed = rng.next_seed();
        ThresholdPair chosen = baseline.thresholds;
        try {
            const auto result = evolve(valid, run);
            const auto solutions = evaluate_pareto(valid, result.pareto);
            chosen = solutions[select_min_cost(solutions, costs, valid_priors)].thresholds;
        } catch (const NoFeasibleSolution&) {
            ++counts.moba_no_feasible;
        }

        const double moba_cost = test_cost(test_index, chosen, test_priors, costs);
        const double baseline_cost = test_cost(test_index, baseline.thresholds, test_priors, costs);
        if (std::abs(moba_cost - baseline_cost) <= kCostTieTolerance) {
            ++counts.identical;
        } else if (moba_cost < baseline_cost) {
            ++counts.lower;
        } else {
            ++counts.higher;
        }
    }
    return counts;
}

std::string_view to_string(CurveModel model) {
    return model == CurveModel::Moba ? "MOBA" : "BA";
}

std::vector<double> sweep_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 15; ++i) {
        grid.push_back(static_cast<double>(1 + 2 * i) / 100.0);
    }
    return grid;
}

std::vector<CurvePoint> curve_sweep(const ScoredDataset& valid, const ScoredDataset& test,
                                    const MobaConfig& cfg, std::uint64_t master_seed) {
    cfg.validate();
    require_both_classes(valid, "validation");
    require_both_classes(test, "test");
    const ScoreIndex test_index(test);
    auto on_test = [&](const ThresholdPair& t) { return essential_metrics(test_index.confusion(t)); };

    const auto grid = sweep_grid();
    std::vector<CurvePoint> points;
    points.reserve(2 * grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double k = grid[g];

        MobaConfig run = cfg;
        run.p_max = k;
        run.n_max = k;
        run.seed = child_seed(master_seed, g);
        CurvePoint moba_row{k, CurveModel::Moba, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
        try {
            const auto result = evolve(valid, run);
            const auto solutions = evaluate_pareto(valid, result.pareto);
            const RejectCaps caps{k, k, std::nullopt};
            auto pick = [&](SelectionMetric metric) {
                return on_test(solutions[select_best_under_cap(solutions, metric, caps)].thresholds);
            };
            const auto by_auc = pick(SelectionMetric::Auc);
            moba_row.acc = pick(SelectionMetric::Accuracy).acc;
            moba_row.auc = by_auc.auc;
            moba_row.gmean = pick(SelectionMetric::GMean).gmean;
            moba_row.observed_rej = by_auc.rej;
        } catch (const NoFeasibleSolution&) {
        } catch (const NoEligibleSolution&) {
        }

        const auto ba = ba_optimize(valid, k, 1.0, 1.0);
        const auto m = on_test(ba.thresholds);
        points.push_back({k, CurveModel::Ba, m.acc, m.auc, m.gmean, m.rej});
        points.push_back(moba_row);
    }
    return points;
}

} // namespace moba
