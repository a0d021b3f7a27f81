#pragma once

#include "moba/baselines.hpp"
#include "moba/data.hpp"
#include "moba/metrics.hpp"
#include "moba/nsga2.hpp"
#include "moba/random.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace moba {

/// A cost entry that is either fixed (lo == hi) or drawn from U[lo, hi].
struct CostEntry {
    double lo = 0.0;
    double hi = 0.0;

    static CostEntry fixed(double v) { return {v, v}; }
    static CostEntry uniform(double a, double b) { return {a, b}; }
    bool is_fixed() const noexcept { return lo == hi; }
    double sample(RandomStream& rng) const { return is_fixed() ? lo : rng.uniform(lo, hi); }
};

struct CostModelSpec {
    std::string name;
    CostEntry ctp;
    CostEntry ctn;
    CostEntry cfp;
    CostEntry cfn;
    CostEntry crp;
    CostEntry crn;
    /// Use one draw for both correct-classification costs instead of two.
    bool joint_correct_costs = false;

    void validate() const;
};

/// CM1..CM4 in order.
std::array<CostModelSpec, 4> builtin_cost_models();

/// Looks up "cm1".."cm4" (case-insensitive).
std::optional<CostModelSpec> find_cost_model(std::string_view name);

/// Draws ctp, ctn, cfp, cfn, crp, crn in that order; fixed entries consume no draw.
CostMatrix sample_cost_matrix(const CostModelSpec& spec, RandomStream& rng);

struct EvaluatedSolution {
    ThresholdPair thresholds;
    RejectionConfusion confusion;
    EssentialMetrics metrics;
};

EvaluatedSolution evaluate_solution(const ScoredDataset& data, const ThresholdPair& t);
EvaluatedSolution evaluate_solution(const RejectionConfusion& c, const ThresholdPair& t);

class NoEligibleSolution : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Index of the lowest expected cost; ties go to the lower reject rate, then
/// lexicographic thresholds. Throws NoEligibleSolution on an empty set.
std::size_t select_min_cost(std::span<const EvaluatedSolution> solutions, const CostMatrix& costs,
                            const ClassPriors& priors);

enum class SelectionMetric { Accuracy, Auc, GMean };

std::optional<double> metric_value(const EssentialMetrics& m, SelectionMetric metric);

/// Per-class caps on rpr / rnr, optionally combined with a cap on the
/// overall reject rate.
struct RejectCaps {
    double p_cap = 1.0;
    double n_cap = 1.0;
    std::optional<double> overall;

    bool admits(const EssentialMetrics& m) const;
};

/// Index of the metric maximiser among solutions within the caps. Solutions
/// whose metric is undefined are not eligible. Ties: lower reject rate, then
/// lexicographic thresholds. Throws NoEligibleSolution if nothing qualifies.
std::size_t select_best_under_cap(std::span<const EvaluatedSolution> solutions, SelectionMetric metric,
                                  const RejectCaps& caps);

/// Evaluates each Pareto member on `data`.
std::vector<EvaluatedSolution> evaluate_pareto(const ScoredDataset& data, std::span<const Individual> pareto);

struct ComparisonCounts {
    std::size_t lower = 0;
    std::size_t higher = 0;
    std::size_t identical = 0;
    std::size_t not_activated = 0;
    /// Activated trials where the optimiser found no feasible pair and the
    /// baseline thresholds were reused (counted as identical).
    std::size_t moba_no_feasible = 0;

    std::size_t total() const noexcept { return lower + higher + identical; }
};

inline constexpr double kCostTieTolerance = 1e-9;

/// Cost-aware comparison against the ROCCH baseline. Trial i uses the
/// stream child_seed(master_seed, i) for its cost matrix and optimiser seed.
ComparisonCounts cost_comparison_experiment(const ScoredDataset& valid, const ScoredDataset& test,
                                            const CostModelSpec& spec, std::size_t trials,
                                            const MobaConfig& cfg, std::uint64_t master_seed);

enum class CurveModel { Moba, Ba };

std::string_view to_string(CurveModel model);

/// One row of a performance-rejection curve. Metric columns are measured on
/// the test set; an empty value means the metric was undefined there.
struct CurvePoint {
    double reject_param = 0.0;
    CurveModel model = CurveModel::Moba;
    std::optional<double> acc;
    std::optional<double> auc;
    std::optional<double> gmean;
    std::optional<double> observed_rej;
};

/// 0.01, 0.03, ..., 0.29.
std::vector<double> sweep_grid();

/// For every grid value k: the optimiser with p_max = n_max = k (seed
/// child_seed(master_seed, grid index)) and BA with k_max = k, cfn = cfp = 1.
/// The optimiser's acc / auc / gmean columns each come from the Pareto
/// member that maximises that metric on the validation set; observed_rej is
/// that of the AUC-selected member. A grid value where the optimiser finds no
/// feasible pair yields an optimiser row with every value empty. Rows are
/// ordered by k, then model name ("BA" before "MOBA").
std::vector<CurvePoint> curve_sweep(const ScoredDataset& valid, const ScoredDataset& test,
                                    const MobaConfig& cfg, std::uint64_t master_seed);

} // namespace moba
