#pragma once
// Independent reference implementations used by the tests. Nothing here calls
// into the library's search or sorting code; only plain data types are shared.

#include "moba/data.hpp"
#include "moba/metrics.hpp"
#include "moba/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using moba::Label;
using moba::ScoredDataset;
using moba::ScoredExample;

inline ScoredDataset make_dataset(const std::vector<std::pair<double, Label>>& rows) {
    std::vector<ScoredExample> ex;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ex.push_back({std::to_string(i), rows[i].first, rows[i].second});
    }
    return ScoredDataset(std::move(ex));
}

/// Gaussian data with scores rounded to `decimals` places so that ties occur.
inline ScoredDataset random_dataset(std::mt19937_64& gen, std::size_t n_pos, std::size_t n_neg, double gap,
                                    int decimals = 2) {
    std::normal_distribution<double> pos(gap, 1.0);
    std::normal_distribution<double> neg(0.0, 1.0);
    const double scale = std::pow(10.0, decimals);
    std::vector<std::pair<double, Label>> rows;
    for (std::size_t i = 0; i < n_pos; ++i) rows.push_back({std::round(pos(gen) * scale) / scale, Label::Positive});
    for (std::size_t i = 0; i < n_neg; ++i) rows.push_back({std::round(neg(gen) * scale) / scale, Label::Negative});
    std::shuffle(rows.begin(), rows.end(), gen);
    return make_dataset(rows);
}

/// Direct per-example tally of the rejection rule.
inline moba::RejectionConfusion tally(const ScoredDataset& d, double t1, double t2) {
    moba::RejectionConfusion c;
    for (const auto& e : d.examples()) {
        const bool pos = e.label == Label::Positive;
        if (e.score > t2) {
            pos ? ++c.tp : ++c.fp;
        } else if (e.score <= t1) {
            pos ? ++c.fn : ++c.tn;
        } else {
            pos ? ++c.rp : ++c.rn;
        }
    }
    return c;
}

/// One representative threshold per region between consecutive distinct
/// scores, including the regions below the minimum and above the maximum.
inline std::vector<double> cut_points(const ScoredDataset& d) {
    std::vector<double> s;
    for (const auto& e : d.examples()) s.push_back(e.score);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    std::vector<double> cuts{s.front() - 1.0};
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double mid = s[i] + (s[i + 1] - s[i]) / 2.0;
        cuts.push_back(mid < s[i + 1] ? mid : s[i]);
    }
    cuts.push_back(s.back() + 1.0);
    return cuts;
}

/// Minimum of (cfn FN + cfp FP) / classified over every pair of cuts with
/// overall reject rate <= k_max.
inline double ba_brute_force(const ScoredDataset& d, double k_max, double cfn, double cfp) {
    const auto cuts = cut_points(d);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        for (std::size_t j = i; j < cuts.size(); ++j) {
            const auto c = tally(d, cuts[i], cuts[j]);
            const double rej = static_cast<double>(c.rp + c.rn) / static_cast<double>(d.size());
            const std::size_t classified = c.tp + c.fn + c.fp + c.tn;
            if (rej > k_max || classified == 0) continue;
            best = std::min(best, (cfn * static_cast<double>(c.fn) + cfp * static_cast<double>(c.fp)) /
                                      static_cast<double>(classified));
        }
    }
    return best;
}

struct Point {
    double f1;
    double f2;
};

inline bool dominated_by(const Point& a, const Point& b) {
    return b.f1 <= a.f1 && b.f2 <= a.f2 && (b.f1 < a.f1 || b.f2 < a.f2);
}

/// Fronts by repeated peeling: a point joins the current front when no
/// remaining point dominates it. Returns the rank of each point.
inline std::vector<std::size_t> naive_ranks(const std::vector<Point>& pts) {
    std::vector<std::size_t> rank(pts.size(), 0);
    std::vector<bool> done(pts.size(), false);
    std::size_t remaining = pts.size();
    for (std::size_t r = 0; remaining > 0; ++r) {
        std::vector<std::size_t> front;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (done[i]) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
                if (!done[j] && j != i && dominated_by(pts[i], pts[j])) dominated = true;
            }
            if (!dominated) front.push_back(i);
        }
        for (std::size_t i : front) {
            rank[i] = r;
            done[i] = true;
        }
        remaining -= front.size();
    }
    return rank;
}

/// Area of the union of boxes [f1, 1] x [f2, 1], computed slab by slab
/// along the first objective.
inline double union_area(const std::vector<Point>& pts) {
    std::vector<double> xs;
    for (const auto& p : pts) {
        if (p.f1 < 1.0 && p.f2 < 1.0) xs.push_back(p.f1);
    }
    xs.push_back(1.0);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        double low = 1.0;
        for (const auto& p : pts) {
            if (p.f1 <= xs[k] && p.f2 < low) low = p.f2;
        }
        area += (xs[k + 1] - xs[k]) * (1.0 - low);
    }
    return area;
}

/// Objective vector of a pair under the death-penalty rule, from a direct
/// tally; an undefined among-classified rate counts as 1.
inline Point penalised_objectives(const ScoredDataset& d, double t1, double t2, double p_max, double n_max,
                                  bool* feasible = nullptr) {
    const auto c = tally(d, t1, t2);
    const double rpr = static_cast<double>(c.rp) / static_cast<double>(c.tp + c.fn + c.rp);
    const double rnr = static_cast<double>(c.rn) / static_cast<double>(c.fp + c.tn + c.rn);
    const bool ok = t1 < t2 && rpr <= p_max && rnr <= n_max;
    if (feasible) *feasible = ok;
    if (!ok) return {1.0, 1.0};
    const double fpr = (c.fp + c.tn) == 0 ? 1.0 : static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
    const double fnr = (c.fn + c.tp) == 0 ? 1.0 : static_cast<double>(c.fn) / static_cast<double>(c.fn + c.tp);
    return {fpr, fnr};
}

/// Feasible Pareto front of every pair of cut regions i <= j. The pair
/// i == j stands for t1 < t2 placed inside one gap (no rejection).
inline std::vector<Point> exhaustive_front(const ScoredDataset& d, double p_max, double n_max) {
    const auto cuts = cut_points(d);
    std::vector<Point> feasible;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        for (std::size_t j = i; j < cuts.size(); ++j) {
            const double t1 = cuts[i];
            const double t2 = i == j ? std::nextafter(cuts[i], std::numeric_limits<double>::infinity()) : cuts[j];
            bool ok = false;
            const auto p = penalised_objectives(d, t1, t2, p_max, n_max, &ok);
            if (ok) feasible.push_back(p);
        }
    }
    std::vector<Point> front;
    for (const auto& p : feasible) {
        const bool dominated =
            std::any_of(feasible.begin(), feasible.end(), [&](const Point& q) { return dominated_by(p, q); });
        if (!dominated) front.push_back(p);
    }
    return front;
}

/// Expected cost written out term by term from the raw counts.
inline double cost_from_counts(const moba::RejectionConfusion& c, double p_pos, const moba::CostMatrix& m) {
    const double np = static_cast<double>(c.tp + c.fn + c.rp);
    const double nn = static_cast<double>(c.fp + c.tn + c.rn);
    return p_pos * (m.cfn * c.fn / np + m.ctp * c.tp / np + m.crp * c.rp / np) +
           (1.0 - p_pos) * (m.ctn * c.tn / nn + m.cfp * c.fp / nn + m.crn * c.rn / nn);
}

} // namespace oracle
