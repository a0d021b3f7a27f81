#include "moba/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace moba {

namespace {

void require_ordered(const ThresholdPair& t) {
    if (t.t1 > t.t2) {
        throw std::invalid_argument("threshold pair requires t1 <= t2 (got t1=" + std::to_string(t.t1) +
                                    ", t2=" + std::to_string(t.t2) + ")");
    }
}

double ratio(std::size_t num, std::size_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> ratio_if_defined(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return ratio(num, den);
}

} // namespace

Decision decide(double score, const ThresholdPair& t) {
    if (score > t.t2) return Decision::Positive;
    if (score <= t.t1) return Decision::Negative;
    return Decision::Reject;
}

RejectionConfusion classify_with_rejection(const ScoredDataset& data, const ThresholdPair& t) {
    require_ordered(t);
    RejectionConfusion c;
    for (const auto& ex : data.examples()) {
        const bool positive = ex.label == Label::Positive;
        switch (decide(ex.score, t)) {
        case Decision::Positive: ++(positive ? c.tp : c.fp); break;
        case Decision::Negative: ++(positive ? c.fn : c.tn); break;
        case Decision::Reject: ++(positive ? c.rp : c.rn); break;
        }
    }
    return c;
}

ScoreIndex::ScoreIndex(const ScoredDataset& data) {
    for (const auto& ex : data.examples()) {
        (ex.label == Label::Positive ? pos_ : neg_).push_back(ex.score);
    }
    std::sort(pos_.begin(), pos_.end());
    std::sort(neg_.begin(), neg_.end());
}

RejectionConfusion ScoreIndex::confusion(const ThresholdPair& t) const {
    require_ordered(t);
    auto at_most = [](const std::vector<double>& v, double x) {
        return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
    };
    const std::size_t pos_low = at_most(pos_, t.t1);
    const std::size_t pos_band = at_most(pos_, t.t2);
    const std::size_t neg_low = at_most(neg_, t.t1);
    const std::size_t neg_band = at_most(neg_, t.t2);

    RejectionConfusion c;
    c.fn = pos_low;
    c.rp = pos_band - pos_low;
    c.tp = pos_.size() - pos_band;
    c.tn = neg_low;
    c.rn = neg_band - neg_low;
    c.fp = neg_.size() - neg_band;
    return c;
}

EssentialMetrics essential_metrics(const RejectionConfusion& c) {
    const std::size_t np = c.n_pos();
    const std::size_t nn = c.n_neg();
    if (np == 0 || nn == 0) {
        throw std::invalid_argument("essential_metrics: confusion matrix needs both classes");
    }
    EssentialMetrics m;
    m.tpr_all = ratio(c.tp, np);
    m.fnr_all = ratio(c.fn, np);
    m.rpr = ratio(c.rp, np);
    m.tnr_all = ratio(c.tn, nn);
    m.fpr_all = ratio(c.fp, nn);
    m.rnr = ratio(c.rn, nn);

    m.tpr_cls = ratio_if_defined(c.tp, c.tp + c.fn);
    m.fnr_cls = ratio_if_defined(c.fn, c.tp + c.fn);
    m.tnr_cls = ratio_if_defined(c.tn, c.tn + c.fp);
    m.fpr_cls = ratio_if_defined(c.fp, c.tn + c.fp);

    m.rej = ratio(c.rejected(), c.total());
    m.acc = ratio_if_defined(c.tp + c.tn, c.classified());
    if (m.tpr_cls && m.tnr_cls) {
        m.auc = (*m.tpr_cls + *m.tnr_cls) / 2.0;
        m.gmean = std::sqrt(*m.tpr_cls * *m.tnr_cls);
    }
    return m;
}

void CostMatrix::validate() const {
    for (double v : {ctp, ctn, cfp, cfn, crp, crn}) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("cost matrix entries must be finite");
        }
    }
}

void ClassPriors::validate() const {
    if (!(p_pos >= 0.0 && p_pos <= 1.0 && p_neg >= 0.0 && p_neg <= 1.0) ||
        std::abs(p_pos + p_neg - 1.0) > 1e-12) {
        throw std::invalid_argument("class priors must lie in [0,1] and sum to 1");
    }
}

double expected_cost(const EssentialMetrics& m, const ClassPriors& priors, const CostMatrix& costs) {
    return priors.p_pos * (costs.cfn * m.fnr_all + costs.ctp * m.tpr_all + costs.crp * m.rpr) +
           priors.p_neg * (costs.ctn * m.tnr_all + costs.cfp * m.fpr_all + costs.crn * m.rnr);
}

double ba_objective(const RejectionConfusion& c, double cfn, double cfp) {
    if (c.classified() == 0) {
        throw std::invalid_argument("ba_objective: every example was rejected");
    }
    return (cfn * static_cast<double>(c.fn) + cfp * static_cast<double>(c.fp)) /
           static_cast<double>(c.tn + c.fp + c.tp + c.fn);
}

ClassPriors empirical_priors(const ScoredDataset& data) {
    require_both_classes(data, "prior estimation");
    const double p_pos = ratio(data.n_pos(), data.size());
    return {p_pos, 1.0 - p_pos};
}

} // namespace moba
