#pragma once

#include "moba/harness.hpp"
#include "moba/nsga2.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace moba {

/// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

struct RunMetadata {
    std::uint64_t seed = 0;
    std::size_t popsize = 0;
    std::size_t gensize = 0;
    double p_max = 0.0;
    double n_max = 0.0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

RunMetadata run_metadata(const MobaConfig& cfg, const ScoredDataset& valid);

/// {t1, t2, fpr, fnr, rpr, rnr, feasible, confusion{tp,fn,rp,fp,tn,rn}}.
/// fpr / fnr are among-classified rates and null when undefined.
nlohmann::json solution_json(const EvaluatedSolution& s, bool feasible);

/// Pareto document: {"model", "metadata", "solutions": [...]}.
nlohmann::json pareto_json(std::string_view model, const RunMetadata& meta,
                           std::span<const EvaluatedSolution> solutions);

/// Rebuilds solutions from a Pareto document using the stored confusion
/// counts. Throws DataError on a malformed document.
std::vector<EvaluatedSolution> solutions_from_json(const nlohmann::json& doc);

/// Aligned text table of t1, t2, fpr, fnr, rpr, rnr.
std::string solution_table(std::span<const EvaluatedSolution> solutions);

/// Header `cost_model,lower,higher,identical,not_activated`.
void write_comparison_csv(std::ostream& out, std::span<const std::pair<std::string, ComparisonCounts>> rows);

/// Header `reject_param,model,acc,auc,gmean,observed_rej`; undefined metrics
/// are written as `NA`.
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> points);

/// Line chart of one metric against the reject parameter, one series per model.
std::string curve_svg(std::span<const CurvePoint> points, SelectionMetric metric);

std::string_view metric_name(SelectionMetric metric);

} // namespace moba
