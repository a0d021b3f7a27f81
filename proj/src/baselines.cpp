#include "moba/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace moba {

namespace {

std::vector<double> sorted_scores(const ScoredDataset& data) {
    std::vector<double> s;
    s.reserve(data.size());
    for (const auto& ex : data.examples()) s.push_back(ex.score);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

// Cross product of (a - o) x (b - o) in count space.
std::int64_t cross(const RocPoint& o, const RocPoint& a, const RocPoint& b) {
    const auto x = [](const RocPoint& p) { return static_cast<std::int64_t>(p.fp); };
    const auto y = [](const RocPoint& p) { return static_cast<std::int64_t>(p.tp); };
    return (x(a) - x(o)) * (y(b) - y(o)) - (y(a) - y(o)) * (x(b) - x(o));
}

struct ScoredPair {
    ThresholdPair t;
    RejectionConfusion c;
    double value = std::numeric_limits<double>::infinity();
    double rej = 1.0;
};

} // namespace

std::vector<double> candidate_thresholds(const ScoredDataset& data) {
    const auto s = sorted_scores(data);
    std::vector<double> cuts;
    if (s.empty()) return cuts;
    cuts.reserve(s.size() + 1);
    cuts.push_back(s.front() - 1.0);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double mid = s[i] + (s[i + 1] - s[i]) / 2.0;
        if (!(mid < s[i + 1])) mid = s[i];
        cuts.push_back(mid);
    }
    cuts.push_back(s.back() + 1.0);
    return cuts;
}

std::vector<RocPoint> roc_points(const ScoredDataset& data) {
    require_both_classes(data, "ROC");
    const ScoreIndex index(data);
    const auto cuts = candidate_thresholds(data);
    std::vector<RocPoint> points;
    points.reserve(cuts.size());
    for (auto it = cuts.rbegin(); it != cuts.rend(); ++it) {
        const auto c = index.confusion({*it, *it});
        points.push_back({static_cast<double>(c.fp) / static_cast<double>(index.n_neg()),
                          static_cast<double>(c.tp) / static_cast<double>(index.n_pos()), *it, c.fp, c.tp});
    }
    return points;
}

std::vector<RocPoint> rocch(std::vector<RocPoint> points) {
    std::stable_sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
        return std::tie(a.fp, a.tp) < std::tie(b.fp, b.tp);
    });
    std::vector<RocPoint> hull;
    for (const auto& p : points) {
        if (!hull.empty() && hull.back().fp == p.fp && hull.back().tp == p.tp) continue;
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0) {
            hull.pop_back();
        }
        hull.push_back(p);
    }
    return hull;
}

ActivationCheck reject_activation(const CostMatrix& costs) {
    costs.validate();
    ActivationCheck check;
    const double lhs_den = costs.cfn - costs.crp;
    const double rhs_den = costs.ctp - costs.crp;
    if (lhs_den == 0.0 || rhs_den == 0.0) {
        check.zero_denominator = true;
        return check;
    }
    check.lhs = (costs.ctn - costs.crn) / lhs_den;
    check.rhs = (costs.cfp - costs.crn) / rhs_den;
    check.activated = check.lhs > check.rhs;
    return check;
}

TortorellaResult tortorella_optimize(const ScoredDataset& valid, const CostMatrix& costs,
                                     const ClassPriors& priors) {
    priors.validate();
    const auto hull = rocch(roc_points(valid));
    std::vector<double> vertices;
    for (const auto& p : hull) vertices.push_back(p.threshold);
    std::sort(vertices.begin(), vertices.end());

    const ScoreIndex index(valid);
    TortorellaResult result;
    result.activation = reject_activation(costs);

    ScoredPair best;
    auto consider = [&](double t1, double t2) {
        ScoredPair cand;
        cand.t = {t1, t2};
        cand.c = index.confusion(cand.t);
        const auto m = essential_metrics(cand.c);
        cand.value = expected_cost(m, priors, costs);
        cand.rej = m.rej;
        if (std::tie(cand.value, cand.rej, cand.t.t1, cand.t.t2) <
            std::tie(best.value, best.rej, best.t.t1, best.t.t2)) {
            best = cand;
        }
    };
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (!result.activated()) {
            consider(vertices[i], vertices[i]);
            continue;
        }
        for (std::size_t j = i; j < vertices.size(); ++j) consider(vertices[i], vertices[j]);
    }

    result.thresholds = best.t;
    result.cost = best.value;
    result.confusion = best.c;
    const auto m = essential_metrics(best.c);
    result.rpr = m.rpr;
    result.rnr = m.rnr;
    return result;
}

BaResult ba_optimize(const ScoredDataset& valid, double k_max, double cfn, double cfp) {
    if (!(k_max >= 0.0 && k_max <= 1.0)) {
        throw std::invalid_argument("ba_optimize: k_max must lie in [0,1]");
    }
    if (!std::isfinite(cfn) || !std::isfinite(cfp)) {
        throw std::invalid_argument("ba_optimize: costs must be finite");
    }
    require_both_classes(valid, "validation");

    const ScoreIndex index(valid);
    const auto cuts = candidate_thresholds(valid);
    const std::size_t n_pos = index.n_pos();
    const std::size_t n_neg = index.n_neg();
    const double total = static_cast<double>(n_pos + n_neg);

    // Examples at or below each cut, per class.
    std::vector<std::size_t> pos_le(cuts.size());
    std::vector<std::size_t> neg_le(cuts.size());
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const auto c = index.confusion({cuts[i], cuts[i]});
        pos_le[i] = c.fn;
        neg_le[i] = c.tn;
    }

    ScoredPair best;
    double best_width = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        for (std::size_t j = i; j < cuts.size(); ++j) {
            RejectionConfusion c;
            c.fn = pos_le[i];
            c.rp = pos_le[j] - pos_le[i];
            c.tp = n_pos - pos_le[j];
            c.tn = neg_le[i];
            c.rn = neg_le[j] - neg_le[i];
            c.fp = n_neg - neg_le[j];
            const double rej = static_cast<double>(c.rejected()) / total;
            if (rej > k_max || c.classified() == 0) continue;
            const double value = ba_objective(c, cfn, cfp);
            const double width = cuts[j] - cuts[i];
            if (std::tie(value, rej, width, cuts[i], cuts[j]) <
                std::tie(best.value, best.rej, best_width, best.t.t1, best.t.t2)) {
                best = {{cuts[i], cuts[j]}, c, value, rej};
                best_width = width;
            }
        }
    }
    return {best.t, best.value, best.rej, best.c};
}

} // namespace moba
