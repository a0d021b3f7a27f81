#pragma once

#include "moba/data.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace moba {

/// Rejection thresholds of an abstaining classifier. A score s is labelled
/// positive when s > t2, negative when s <= t1, and rejected otherwise.
struct ThresholdPair {
    double t1 = 0.0;
    double t2 = 0.0;

    friend bool operator==(const ThresholdPair&, const ThresholdPair&) = default;
};

enum class Decision { Positive, Negative, Reject };

Decision decide(double score, const ThresholdPair& t);

/// Confusion matrix with a reject column:
///
///              predicted +   predicted -   rejected
///   actual +       tp            fn            rp
///   actual -       fp            tn            rn
struct RejectionConfusion {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t rp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t rn = 0;

    std::size_t n_pos() const noexcept { return tp + fn + rp; }
    std::size_t n_neg() const noexcept { return fp + tn + rn; }
    std::size_t total() const noexcept { return n_pos() + n_neg(); }
    std::size_t rejected() const noexcept { return rp + rn; }
    std::size_t classified() const noexcept { return tp + fn + fp + tn; }

    friend bool operator==(const RejectionConfusion&, const RejectionConfusion&) = default;
};

/// Throws std::invalid_argument when t1 > t2.
RejectionConfusion classify_with_rejection(const ScoredDataset& data, const ThresholdPair& t);

/// Sorted per-class scores answering confusion queries in O(log n). Produces
/// exactly the counts of classify_with_rejection.
class ScoreIndex {
public:
    explicit ScoreIndex(const ScoredDataset& data);

    RejectionConfusion confusion(const ThresholdPair& t) const;

    std::size_t n_pos() const noexcept { return pos_.size(); }
    std::size_t n_neg() const noexcept { return neg_.size(); }

private:
    std::vector<double> pos_;
    std::vector<double> neg_;
};

/// Rates of both conventions in use.
///
/// "all" rates divide by every example of the class, so for each class
/// correct + wrong + rejected = 1. "cls" rates divide by the classified
/// (non-rejected) examples of the class and are empty when the whole class
/// was rejected. acc, auc and gmean are built on the "cls" family.
struct EssentialMetrics {
    double tpr_all = 0.0;
    double fnr_all = 0.0;
    double rpr = 0.0;
    double tnr_all = 0.0;
    double fpr_all = 0.0;
    double rnr = 0.0;

    std::optional<double> tpr_cls;
    std::optional<double> fnr_cls;
    std::optional<double> tnr_cls;
    std::optional<double> fpr_cls;

    double rej = 0.0;
    std::optional<double> acc;
    std::optional<double> auc;   // (tpr_cls + tnr_cls) / 2
    std::optional<double> gmean; // sqrt(tpr_cls * tnr_cls)
};

/// Throws std::invalid_argument if either class is empty.
EssentialMetrics essential_metrics(const RejectionConfusion& c);

struct CostMatrix {
    double ctp = 0.0;
    double ctn = 0.0;
    double cfp = 0.0;
    double cfn = 0.0;
    double crp = 0.0;
    double crn = 0.0;

    void validate() const;

    friend CostMatrix operator*(double lambda, const CostMatrix& c) {
        return {lambda * c.ctp, lambda * c.ctn, lambda * c.cfp,
                lambda * c.cfn, lambda * c.crp, lambda * c.crn};
    }
    friend bool operator==(const CostMatrix&, const CostMatrix&) = default;
};

struct ClassPriors {
    double p_pos = 0.5;
    double p_neg = 0.5;

    void validate() const;
};

/// Expected cost per example from the six among-all rates:
/// p+ (CFN fnr + CTP tpr + CRP rpr) + p- (CTN tnr + CFP fpr + CRN rnr).
double expected_cost(const EssentialMetrics& m, const ClassPriors& priors, const CostMatrix& costs);

/// Misclassification cost per classified example, (cfn FN + cfp FP) / classified.
/// Throws std::invalid_argument when nothing was classified.
double ba_objective(const RejectionConfusion& c, double cfn, double cfp);

/// Class frequencies of the dataset. Throws DataError unless both classes occur.
ClassPriors empirical_priors(const ScoredDataset& data);

} // namespace moba
