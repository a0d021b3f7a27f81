#include "moba/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace moba {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("MobaConfig: ") + what);
}

bool strictly_ordered(const ThresholdPair& t) { return t.t1 < t.t2; }

double& variable(ThresholdPair& t, std::size_t m) { return m == 0 ? t.t1 : t.t2; }
double variable(const ThresholdPair& t, std::size_t m) { return m == 0 ? t.t1 : t.t2; }

GenerationStats summarize(const std::vector<Individual>& pop, std::size_t generation) {
    GenerationStats s;
    s.generation = generation;
    for (const auto& ind : pop) {
        s.best_fpr = std::min(s.best_fpr, ind.objectives.fpr);
        s.best_fnr = std::min(s.best_fnr, ind.objectives.fnr);
        if (ind.feasible) ++s.feasible_count;
    }
    return s;
}

void evaluate_all(std::span<Individual> pop, const MobaProblem& problem) {
    for (auto& ind : pop) {
        const auto e = problem.evaluate(ind.thresholds);
        ind.objectives = e.objectives;
        ind.feasible = e.feasible;
    }
}

} // namespace

void MobaConfig::validate() const {
    require(popsize >= 4 && popsize % 2 == 0, "popsize must be an even number >= 4");
    require(gensize >= 1, "gensize must be >= 1");
    require(crossover_prob >= 0.0 && crossover_prob <= 1.0, "crossover probability must lie in [0,1]");
    require(mutation_prob >= 0.0 && mutation_prob <= 1.0, "mutation probability must lie in [0,1]");
    require(eta_c >= 0.0 && std::isfinite(eta_c), "eta_c must be a finite value >= 0");
    require(eta_m >= 0.0 && std::isfinite(eta_m), "eta_m must be a finite value >= 0");
    require(p_max >= 0.0 && p_max <= 1.0, "p_max must lie in [0,1]");
    require(n_max >= 0.0 && n_max <= 1.0, "n_max must lie in [0,1]");
    require(std::isfinite(var_lower) && std::isfinite(var_upper) && var_lower < var_upper,
            "search bounds must be finite with var_lower < var_upper");
}

MobaConfig with_score_bounds(MobaConfig cfg, const ScoredDataset& scores) {
    const auto [lo, hi] = scores.score_range();
    if (!(lo < hi)) {
        throw DataError("scores are all equal; cannot derive search bounds");
    }
    cfg.var_lower = lo;
    cfg.var_upper = hi;
    return cfg;
}

MobaProblem::MobaProblem(const ScoredDataset& valid, double p_max, double n_max)
    : index_(valid), p_max_(p_max), n_max_(n_max) {
    require_both_classes(valid, "validation");
}

Evaluation MobaProblem::evaluate(const ThresholdPair& t) const {
    if (!strictly_ordered(t)) {
        return {};
    }
    const auto c = index_.confusion(t);
    const auto m = essential_metrics(c);
    if (m.rpr > p_max_ || m.rnr > n_max_) {
        return {};
    }
    return {{m.fpr_cls.value_or(1.0), m.fnr_cls.value_or(1.0)}, true};
}

Evaluation evaluate(const ThresholdPair& t, const ScoredDataset& valid, double p_max, double n_max) {
    return MobaProblem(valid, p_max, n_max).evaluate(t);
}

bool dominates(const Objectives& a, const Objectives& b) {
    return a.fpr <= b.fpr && a.fnr <= b.fnr && (a.fpr < b.fpr || a.fnr < b.fnr);
}

FrontSet fast_nondominated_sort(std::span<Individual> pop) {
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    std::vector<std::size_t> domination_count(n, 0);
    FrontSet fronts(1);

    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (dominates(pop[p].objectives, pop[q].objectives)) {
                dominated_by_me[p].push_back(q);
            } else if (dominates(pop[q].objectives, pop[p].objectives)) {
                ++domination_count[p];
            }
        }
        if (domination_count[p] == 0) {
            pop[p].rank = 0;
            fronts[0].push_back(p);
        }
    }

    for (std::size_t i = 0; !fronts[i].empty(); ++i) {
        std::vector<std::size_t> next;
        for (std::size_t p : fronts[i]) {
            for (std::size_t q : dominated_by_me[p]) {
                if (--domination_count[q] == 0) {
                    pop[q].rank = i + 1;
                    next.push_back(q);
                }
            }
        }
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

std::vector<double> crowding_distances(std::span<const Objectives> front) {
    const std::size_t n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), kInf);
        return distance;
    }
    std::vector<std::size_t> order(n);
    for (double Objectives::*field : {&Objectives::fpr, &Objectives::fnr}) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a].*field < front[b].*field; });
        distance[order.front()] = kInf;
        distance[order.back()] = kInf;
        const double range = front[order.back()].*field - front[order.front()].*field;
        if (range <= 0.0) continue;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            distance[order[k]] += (front[order[k + 1]].*field - front[order[k - 1]].*field) / range;
        }
    }
    return distance;
}

void assign_crowding(std::span<Individual> pop, const FrontSet& fronts) {
    std::vector<Objectives> objectives;
    for (const auto& front : fronts) {
        objectives.clear();
        for (std::size_t i : front) objectives.push_back(pop[i].objectives);
        const auto d = crowding_distances(objectives);
        for (std::size_t k = 0; k < front.size(); ++k) pop[front[k]].crowding = d[k];
    }
}

std::size_t tournament_winner(std::span<const Individual> pop, std::size_t a, std::size_t b) {
    if (pop[a].rank != pop[b].rank) {
        return pop[a].rank < pop[b].rank ? a : b;
    }
    return pop[b].crowding > pop[a].crowding ? b : a;
}

std::vector<std::size_t> tournament_selection(std::span<const Individual> pop, std::size_t count,
                                              RandomStream& rng) {
    std::vector<std::size_t> winners;
    winners.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t a = rng.index(pop.size());
        const std::size_t b = rng.index(pop.size());
        winners.push_back(tournament_winner(pop, a, b));
    }
    return winners;
}

double sbx_beta(double u, double eta_c) {
    const double exponent = 1.0 / (eta_c + 1.0);
    if (u <= 0.5) {
        return std::pow(2.0 * u, exponent);
    }
    return 1.0 / std::pow(2.0 - 2.0 * u, exponent);
}

std::pair<double, double> sbx_pair(double x1, double x2, double beta) {
    return {0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2),
            0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2)};
}

double mutation_delta(double u, double eta_m) {
    const double exponent = 1.0 / (eta_m + 1.0);
    if (u < 0.5) {
        return std::pow(2.0 * u, exponent) - 1.0;
    }
    return 1.0 - std::pow(2.0 - 2.0 * u, exponent);
}

double mutate_value(double x, double u, double eta_m, double lower, double upper) {
    const double y = x + (upper - lower) * mutation_delta(u, eta_m);
    return std::clamp(y, lower, upper);
}

std::pair<ThresholdPair, ThresholdPair> sbx_crossover(const ThresholdPair& x1, const ThresholdPair& x2,
                                                      double eta_c, const UniformDraw& draw,
                                                      OperatorStats& stats) {
    ++stats.crossover_calls;
    for (std::size_t attempt = 0; attempt < kRetryBudget; ++attempt) {
        ThresholdPair y1;
        ThresholdPair y2;
        for (std::size_t m = 0; m < 2; ++m) {
            const double beta = sbx_beta(draw(), eta_c);
            std::tie(variable(y1, m), variable(y2, m)) = sbx_pair(variable(x1, m), variable(x2, m), beta);
        }
        if (strictly_ordered(y1) && strictly_ordered(y2)) {
            return {y1, y2};
        }
        ++stats.crossover_retries;
    }
    ++stats.crossover_fallbacks;
    return {x1, x2};
}

ThresholdPair polynomial_mutation(const ThresholdPair& x, double eta_m, double mutation_prob, double lower,
                                  double upper, const UniformDraw& draw, OperatorStats& stats) {
    if (!(lower < upper)) {
        throw std::invalid_argument("polynomial_mutation: lower must be < upper");
    }
    std::array<bool, 2> selected{};
    for (std::size_t m = 0; m < 2; ++m) {
        selected[m] = draw() < mutation_prob;
    }
    if (!selected[0] && !selected[1]) {
        return x;
    }
    for (std::size_t attempt = 0; attempt < kRetryBudget; ++attempt) {
        ThresholdPair y = x;
        for (std::size_t m = 0; m < 2; ++m) {
            if (selected[m]) {
                variable(y, m) = mutate_value(variable(x, m), draw(), eta_m, lower, upper);
            }
        }
        if (strictly_ordered(y)) {
            return y;
        }
        ++stats.mutation_retries;
    }
    ++stats.mutation_fallbacks;
    return x;
}

std::vector<Individual> pop_initialization(const MobaConfig& cfg, RandomStream& rng) {
    cfg.validate();
    std::vector<Individual> pop;
    pop.reserve(cfg.popsize);
    while (pop.size() < cfg.popsize) {
        const double a = rng.uniform(cfg.var_lower, cfg.var_upper);
        const double b = rng.uniform(cfg.var_lower, cfg.var_upper);
        if (a < b) {
            Individual ind;
            ind.thresholds = {a, b};
            pop.push_back(ind);
        }
    }
    return pop;
}

std::vector<Individual> elite_preservation(std::vector<Individual> combined, std::size_t popsize) {
    if (combined.size() < popsize) {
        throw std::invalid_argument("elite_preservation: combined population smaller than popsize");
    }
    const FrontSet fronts = fast_nondominated_sort(combined);
    assign_crowding(combined, fronts);

    std::vector<Individual> next;
    next.reserve(popsize);
    for (const auto& front : fronts) {
        if (next.size() + front.size() <= popsize) {
            for (std::size_t i : front) next.push_back(combined[i]);
            if (next.size() == popsize) break;
            continue;
        }
        std::vector<std::size_t> order = front;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return combined[a].crowding > combined[b].crowding;
        });
        for (std::size_t k = 0; next.size() < popsize; ++k) next.push_back(combined[order[k]]);
        break;
    }
    return next;
}

NoFeasibleSolution::NoFeasibleSolution(double p_max, double n_max)
    : std::runtime_error([&] {
          std::ostringstream msg;
          msg << "no feasible threshold pair found under caps p_max=" << p_max << ", n_max=" << n_max;
          return msg.str();
      }()),
      p_max_(p_max), n_max_(n_max) {}

MobaResult evolve(const ScoredDataset& valid, const MobaConfig& cfg, const GenerationObserver& observe) {
    cfg.validate();
    const MobaProblem problem(valid, cfg.p_max, cfg.n_max);
    RandomStream rng(cfg.seed);
    const UniformDraw draw = bind_uniform(rng);

    MobaResult result;
    auto& stats = result.operator_stats;

    std::vector<Individual> pop = pop_initialization(cfg, rng);
    evaluate_all(pop, problem);
    result.history.push_back(summarize(pop, 0));
    if (observe) observe(0, pop);

    for (std::size_t gen = 1; gen <= cfg.gensize; ++gen) {
        const FrontSet fronts = fast_nondominated_sort(pop);
        assign_crowding(pop, fronts);
        const auto parents = tournament_selection(pop, cfg.popsize, rng);

        std::vector<Individual> offspring;
        offspring.reserve(cfg.popsize);
        for (std::size_t k = 0; k + 1 < parents.size(); k += 2) {
            const auto& a = pop[parents[k]].thresholds;
            const auto& b = pop[parents[k + 1]].thresholds;
            Individual c1;
            Individual c2;
            if (rng.uniform() < cfg.crossover_prob) {
                std::tie(c1.thresholds, c2.thresholds) = sbx_crossover(a, b, cfg.eta_c, draw, stats);
            } else {
                c1.thresholds = a;
                c2.thresholds = b;
            }
            offspring.push_back(c1);
            offspring.push_back(c2);
        }
        for (auto& child : offspring) {
            child.thresholds = polynomial_mutation(child.thresholds, cfg.eta_m, cfg.mutation_prob,
                                                   cfg.var_lower, cfg.var_upper, draw, stats);
        }
        evaluate_all(offspring, problem);

        pop.insert(pop.end(), offspring.begin(), offspring.end());
        pop = elite_preservation(std::move(pop), cfg.popsize);
        result.history.push_back(summarize(pop, gen));
        if (observe) observe(gen, pop);
    }

    const FrontSet fronts = fast_nondominated_sort(pop);
    assign_crowding(pop, fronts);
    for (std::size_t i : fronts.front()) {
        if (pop[i].feasible) result.pareto.push_back(pop[i]);
    }
    if (std::none_of(pop.begin(), pop.end(), [](const Individual& ind) { return ind.feasible; })) {
        throw NoFeasibleSolution(cfg.p_max, cfg.n_max);
    }
    std::sort(result.pareto.begin(), result.pareto.end(), [](const Individual& a, const Individual& b) {
        return std::tie(a.objectives.fpr, a.objectives.fnr, a.thresholds.t1, a.thresholds.t2) <
               std::tie(b.objectives.fpr, b.objectives.fnr, b.thresholds.t1, b.thresholds.t2);
    });
    const auto dup = std::unique(result.pareto.begin(), result.pareto.end(), [](const Individual& a, const Individual& b) {
        return a.thresholds.t1 == b.thresholds.t1 && a.thresholds.t2 == b.thresholds.t2;
    });
    result.pareto.erase(dup, result.pareto.end());
    result.population = std::move(pop);
    return result;
}

double hypervolume(std::span<const Objectives> points, Objectives reference) {
    std::vector<Objectives> inside;
    for (const auto& p : points) {
        if (p.fpr < reference.fpr && p.fnr < reference.fnr) inside.push_back(p);
    }
    std::sort(inside.begin(), inside.end(), [](const Objectives& a, const Objectives& b) {
        return std::tie(a.fpr, a.fnr) < std::tie(b.fpr, b.fnr);
    });
    double volume = 0.0;
    double ceiling = reference.fnr;
    for (const auto& p : inside) {
        if (p.fnr < ceiling) {
            volume += (reference.fpr - p.fpr) * (ceiling - p.fnr);
            ceiling = p.fnr;
        }
    }
    return volume;
}

} // namespace moba
