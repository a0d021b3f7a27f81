#pragma once

#include "moba/data.hpp"
#include "moba/metrics.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace moba {

/// Operating point of the single-threshold rule "positive iff score > threshold".
/// The raw counts are kept so hull geometry can be done in exact integer arithmetic.
struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
    std::size_t fp = 0;
    std::size_t tp = 0;
};

/// Midpoints between consecutive distinct scores plus the sentinels
/// min - 1 and max + 1, ascending. Every achievable partition of the scores
/// by one or two thresholds is realised by these candidates.
std::vector<double> candidate_thresholds(const ScoredDataset& data);

/// One point per candidate threshold, ordered by threshold descending
/// (so fpr and tpr are non-decreasing).
std::vector<RocPoint> roc_points(const ScoredDataset& data);

/// Upper convex hull from (0,0) to (1,1), collinear interior points dropped.
std::vector<RocPoint> rocch(std::vector<RocPoint> points);

struct ActivationCheck {
    bool activated = false;
    /// True when CFN == CRP or CTP == CRP; the inequality is then undefined
    /// and the reject option is reported as not activated.
    bool zero_denominator = false;
    double lhs = 0.0; // (CTN - CRN) / (CFN - CRP)
    double rhs = 0.0; // (CFP - CRN) / (CTP - CRP)
};

ActivationCheck reject_activation(const CostMatrix& costs);

struct TortorellaResult {
    ThresholdPair thresholds;
    double cost = 0.0; // expected cost on the data it was fitted on
    ActivationCheck activation;
    RejectionConfusion confusion;
    double rpr = 0.0;
    double rnr = 0.0;

    bool activated() const noexcept { return activation.activated; }
};

/// Cost-minimising abstaining classifier restricted to ROCCH vertex
/// thresholds. Without activation the best single vertex threshold is
/// returned as t1 = t2; otherwise every vertex pair t1 <= t2 is scored with
/// the expected cost and the cheapest kept (ties: lower reject rate, then
/// lexicographic thresholds).
TortorellaResult tortorella_optimize(const ScoredDataset& valid, const CostMatrix& costs,
                                     const ClassPriors& priors);

struct BaResult {
    ThresholdPair thresholds;
    double objective = 0.0;
    double reject_rate = 0.0;
    RejectionConfusion confusion;
};

/// Bounded-abstention model solved exactly over all candidate pairs
/// t1 <= t2 with overall reject rate <= k_max. Ties: lower reject rate, then
/// narrower band, then lexicographic (t1, t2).
BaResult ba_optimize(const ScoredDataset& valid, double k_max, double cfn = 1.0, double cfp = 1.0);

} // namespace moba
