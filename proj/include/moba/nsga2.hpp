#pragma once

// Constrained bi-objective NSGA-II over rejection threshold pairs.
//
// Decision vector: (t1, t2). Objectives, both minimised, measured on the
// validation set with among-classified rates:
//   f1 = fpr = FP / (FP + TN)
//   f2 = fnr = FN / (FN + TP)
// Feasible set: rpr <= p_max, rnr <= n_max, t1 < t2. Infeasible individuals
// are scored (1, 1) and compete on that basis (death penalty).
//
// One RandomStream drives a run. Per generation it is consumed in this order:
// two draws per tournament (popsize tournaments); then for each parent pair in
// order one crossover-probability draw followed by the SBX draws; then for
// each child in order the per-variable mutation draws. Evaluation is
// deterministic and consumes nothing.

#include "moba/data.hpp"
#include "moba/metrics.hpp"
#include "moba/random.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace moba {

struct MobaConfig {
    std::size_t popsize = 20;
    std::size_t gensize = 100;
    double crossover_prob = 0.9;
    double mutation_prob = 0.5; // 1 / number of decision variables
    double eta_c = 20.0;
    double eta_m = 20.0;
    double p_max = 0.1;
    double n_max = 0.1;
    std::uint64_t seed = 0;
    double var_lower = 0.0;
    double var_upper = 1.0;

    /// Throws std::invalid_argument on the first violated precondition.
    void validate() const;
};

/// Search bounds [s_min, s_max] taken from a score sample.
MobaConfig with_score_bounds(MobaConfig cfg, const ScoredDataset& scores);

struct Objectives {
    double fpr = 1.0;
    double fnr = 1.0;

    friend bool operator==(const Objectives&, const Objectives&) = default;
};

struct Individual {
    ThresholdPair thresholds;
    Objectives objectives;
    bool feasible = false;
    std::size_t rank = 0;
    double crowding = 0.0;
};

/// Fronts in rank order, each a list of population indices.
using FrontSet = std::vector<std::vector<std::size_t>>;

struct Evaluation {
    Objectives objectives;
    bool feasible = false;
};

/// Scores one threshold pair against the validation data.
class MobaProblem {
public:
    MobaProblem(const ScoredDataset& valid, double p_max, double n_max);

    Evaluation evaluate(const ThresholdPair& t) const;
    RejectionConfusion confusion(const ThresholdPair& t) const { return index_.confusion(t); }

    double p_max() const noexcept { return p_max_; }
    double n_max() const noexcept { return n_max_; }

private:
    ScoreIndex index_;
    double p_max_;
    double n_max_;
};

Evaluation evaluate(const ThresholdPair& t, const ScoredDataset& valid, double p_max, double n_max);

/// Pareto dominance for minimisation: a <= b everywhere and a < b somewhere.
bool dominates(const Objectives& a, const Objectives& b);

/// Deb's fast non-dominated sort. Sets each individual's rank to its front index.
FrontSet fast_nondominated_sort(std::span<Individual> pop);

/// Crowding distances aligned with `front`. Boundary members of each
/// objective get +inf; a flat objective (max == min) adds nothing.
std::vector<double> crowding_distances(std::span<const Objectives> front);

/// Writes crowding distances of every front into the population.
void assign_crowding(std::span<Individual> pop, const FrontSet& fronts);

/// Binary tournament on (rank asc, crowding desc). Both contestants are drawn
/// uniformly with replacement; a full tie goes to the first drawn.
std::vector<std::size_t> tournament_selection(std::span<const Individual> pop, std::size_t count,
                                              RandomStream& rng);

/// Index of the tournament winner between contestants a (drawn first) and b.
std::size_t tournament_winner(std::span<const Individual> pop, std::size_t a, std::size_t b);

/// SBX spread factor from u in [0, 1).
double sbx_beta(double u, double eta_c);

/// SBX children for one variable given the spread factor.
std::pair<double, double> sbx_pair(double x1, double x2, double beta);

/// Polynomial-mutation perturbation from u in [0, 1); ranges over [-1, 1].
double mutation_delta(double u, double eta_m);

/// Mutated variable x + (upper - lower) * delta(u), clamped to [lower, upper].
double mutate_value(double x, double u, double eta_m, double lower, double upper);

inline constexpr std::size_t kRetryBudget = 100;

struct OperatorStats {
    std::size_t crossover_calls = 0;
    std::size_t crossover_retries = 0;
    std::size_t crossover_fallbacks = 0;
    std::size_t mutation_retries = 0;
    std::size_t mutation_fallbacks = 0;
};

/// Simulated binary crossover of two threshold pairs. One u per variable;
/// if either child breaks t1 < t2 both u's are redrawn, up to kRetryBudget
/// attempts, after which the parents are returned unchanged.
std::pair<ThresholdPair, ThresholdPair> sbx_crossover(const ThresholdPair& x1, const ThresholdPair& x2,
                                                      double eta_c, const UniformDraw& draw,
                                                      OperatorStats& stats);

/// Polynomial mutation. Each variable is selected with probability
/// `mutation_prob`; the selected ones are perturbed and clamped. A result
/// breaking t1 < t2 is redrawn (selection kept) up to kRetryBudget times,
/// after which `x` is returned unchanged.
ThresholdPair polynomial_mutation(const ThresholdPair& x, double eta_m, double mutation_prob, double lower,
                                  double upper, const UniformDraw& draw, OperatorStats& stats);

/// popsize pairs drawn uniformly from [var_lower, var_upper]^2 subject to
/// t1 < t2 (rejection sampling). Individuals are not evaluated.
std::vector<Individual> pop_initialization(const MobaConfig& cfg, RandomStream& rng);

/// Keeps whole fronts of `combined` in rank order while they fit, then fills
/// the remainder from the next front by descending crowding distance.
std::vector<Individual> elite_preservation(std::vector<Individual> combined, std::size_t popsize);

struct GenerationStats {
    std::size_t generation = 0;
    double best_fpr = 1.0;
    double best_fnr = 1.0;
    std::size_t feasible_count = 0;
};

struct MobaResult {
    std::vector<Individual> population;
    /// Feasible members of the final first front, ordered by (fpr, fnr, t1, t2),
    /// with repeated threshold pairs kept once.
    std::vector<Individual> pareto;
    /// Entry 0 describes the initial population, entry g the population after generation g.
    std::vector<GenerationStats> history;
    OperatorStats operator_stats;
};

class NoFeasibleSolution : public std::runtime_error {
public:
    NoFeasibleSolution(double p_max, double n_max);
    double p_max() const noexcept { return p_max_; }
    double n_max() const noexcept { return n_max_; }

private:
    double p_max_;
    double n_max_;
};

/// Called with the generation number and the population after the
/// initialisation (generation 0) and after every elite-preservation step.
using GenerationObserver = std::function<void(std::size_t, std::span<const Individual>)>;

/// Full run: initialise, then gensize rounds of offspring generation and
/// elite preservation. Throws NoFeasibleSolution when the final population
/// holds no feasible individual.
MobaResult evolve(const ScoredDataset& valid, const MobaConfig& cfg, const GenerationObserver& observe = {});

/// Area dominated by `points` inside the box bounded by `reference`
/// (minimisation). Points outside the box contribute nothing.
double hypervolume(std::span<const Objectives> points, Objectives reference = {1.0, 1.0});

} // namespace moba
