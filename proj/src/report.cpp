#include "moba/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace moba {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fixed(double v, int digits = 2) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*f", digits, v);
    return buf.data();
}

std::size_t count_field(const json& confusion, const char* key) {
    const auto& v = confusion.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw DataError(std::string("confusion field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

} // namespace

std::string format_number(double value) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    return std::string(buf.data(), ptr);
}

std::string_view metric_name(SelectionMetric metric) {
    switch (metric) {
    case SelectionMetric::Accuracy: return "ACC";
    case SelectionMetric::Auc: return "AUC";
    case SelectionMetric::GMean: return "G";
    }
    return "?";
}

RunMetadata run_metadata(const MobaConfig& cfg, const ScoredDataset& valid) {
    return {cfg.seed, cfg.popsize, cfg.gensize, cfg.p_max, cfg.n_max, valid.n_pos(), valid.n_neg()};
}

json solution_json(const EvaluatedSolution& s, bool feasible) {
    const auto& c = s.confusion;
    return {
        {"t1", s.thresholds.t1},
        {"t2", s.thresholds.t2},
        {"fpr", optional_number(s.metrics.fpr_cls)},
        {"fnr", optional_number(s.metrics.fnr_cls)},
        {"rpr", s.metrics.rpr},
        {"rnr", s.metrics.rnr},
        {"feasible", feasible},
        {"confusion", {{"tp", c.tp}, {"fn", c.fn}, {"rp", c.rp}, {"fp", c.fp}, {"tn", c.tn}, {"rn", c.rn}}},
    };
}

json pareto_json(std::string_view model, const RunMetadata& meta, std::span<const EvaluatedSolution> solutions) {
    json doc;
    doc["model"] = model;
    doc["metadata"] = {
        {"seed", meta.seed},   {"popsize", meta.popsize}, {"gensize", meta.gensize}, {"p_max", meta.p_max},
        {"n_max", meta.n_max}, {"n_pos", meta.n_pos},     {"n_neg", meta.n_neg},
    };
    doc["solutions"] = json::array();
    for (const auto& s : solutions) doc["solutions"].push_back(solution_json(s, true));
    return doc;
}

std::vector<EvaluatedSolution> solutions_from_json(const json& doc) {
    try {
        std::vector<EvaluatedSolution> out;
        for (const auto& item : doc.at("solutions")) {
            const auto& c = item.at("confusion");
            RejectionConfusion confusion;
            confusion.tp = count_field(c, "tp");
            confusion.fn = count_field(c, "fn");
            confusion.rp = count_field(c, "rp");
            confusion.fp = count_field(c, "fp");
            confusion.tn = count_field(c, "tn");
            confusion.rn = count_field(c, "rn");
            const ThresholdPair t{item.at("t1").get<double>(), item.at("t2").get<double>()};
            out.push_back(evaluate_solution(confusion, t));
        }
        return out;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed Pareto document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("malformed Pareto document: ") + e.what());
    }
}

std::string solution_table(std::span<const EvaluatedSolution> solutions) {
    std::ostringstream out;
    auto cell = [&](const std::string& s) { out << std::setw(12) << s; };
    auto rate = [](const std::optional<double>& v) { return v ? fixed(*v, 4) : std::string("NA"); };
    out << std::setw(4) << "#";
    for (const char* h : {"t1", "t2", "fpr", "fnr", "rpr", "rnr"}) cell(h);
    out << '\n';
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        const auto& s = solutions[i];
        out << std::setw(4) << i;
        cell(fixed(s.thresholds.t1, 4));
        cell(fixed(s.thresholds.t2, 4));
        cell(rate(s.metrics.fpr_cls));
        cell(rate(s.metrics.fnr_cls));
        cell(fixed(s.metrics.rpr, 4));
        cell(fixed(s.metrics.rnr, 4));
        out << '\n';
    }
    return out.str();
}

void write_comparison_csv(std::ostream& out, std::span<const std::pair<std::string, ComparisonCounts>> rows) {
    out << "cost_model,lower,higher,identical,not_activated\n";
    for (const auto& [name, c] : rows) {
        out << name << ',' << c.lower << ',' << c.higher << ',' << c.identical << ',' << c.not_activated << '\n';
    }
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> points) {
    auto value = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("NA"); };
    out << "reject_param,model,acc,auc,gmean,observed_rej\n";
    for (const auto& p : points) {
        out << format_number(p.reject_param) << ',' << to_string(p.model) << ',' << value(p.acc) << ','
            << value(p.auc) << ',' << value(p.gmean) << ',' << value(p.observed_rej) << '\n';
    }
}

std::string curve_svg(std::span<const CurvePoint> points, SelectionMetric metric) {
    constexpr double width = 800.0;
    constexpr double height = 600.0;
    constexpr double left = 90.0;
    constexpr double right = 150.0;
    constexpr double top = 60.0;
    constexpr double bottom = 80.0;
    constexpr double x_max = 0.30;

    auto pick = [metric](const CurvePoint& p) {
        switch (metric) {
        case SelectionMetric::Accuracy: return p.acc;
        case SelectionMetric::Auc: return p.auc;
        case SelectionMetric::GMean: return p.gmean;
        }
        return std::optional<double>{};
    };

    double lo = 1.0;
    double hi = 0.0;
    for (const auto& p : points) {
        if (auto v = pick(p)) {
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
    }
    if (lo > hi) {
        lo = 0.0;
        hi = 1.0;
    }
    lo = std::max(0.0, std::floor(lo * 20.0) / 20.0);
    hi = std::min(1.0, std::ceil(hi * 20.0) / 20.0);
    if (hi - lo < 0.05) {
        lo = std::max(0.0, lo - 0.05);
        hi = std::min(1.0, hi + 0.05);
    }

    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto sx = [&](double x) { return left + x / x_max * plot_w; };
    auto sy = [&](double y) { return top + (hi - y) / (hi - lo) * plot_h; };

    const std::string name(metric_name(metric));
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n";
    svg << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    svg << "<text x=\"" << fixed(left + plot_w / 2) << "\" y=\"32\" text-anchor=\"middle\" font-size=\"20\" "
        << "font-family=\"sans-serif\">" << name << "-Rej</text>\n";

    svg << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
    for (int i = 0; i <= 6; ++i) {
        const double x = sx(0.05 * i);
        svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(x) << "\" y2=\""
            << fixed(top + plot_h) << "\"/>\n";
    }
    const int y_steps = static_cast<int>(std::lround((hi - lo) / 0.05));
    for (int i = 0; i <= y_steps; ++i) {
        const double y = sy(lo + 0.05 * i);
        svg << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(left + plot_w)
            << "\" y2=\"" << fixed(y) << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(plot_w)
        << "\" height=\"" << fixed(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

    svg << "<g font-size=\"13\" font-family=\"sans-serif\">\n";
    for (int i = 0; i <= 6; ++i) {
        svg << "<text x=\"" << fixed(sx(0.05 * i)) << "\" y=\"" << fixed(top + plot_h + 20)
            << "\" text-anchor=\"middle\">" << fixed(0.05 * i) << "</text>\n";
    }
    for (int i = 0; i <= y_steps; ++i) {
        svg << "<text x=\"" << fixed(left - 8) << "\" y=\"" << fixed(sy(lo + 0.05 * i) + 4)
            << "\" text-anchor=\"end\">" << fixed(lo + 0.05 * i) << "</text>\n";
    }
    svg << "<text x=\"" << fixed(left + plot_w / 2) << "\" y=\"" << fixed(height - 25)
        << "\" text-anchor=\"middle\">reject rate parameter</text>\n";
    svg << "<text x=\"25\" y=\"" << fixed(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 25 "
        << fixed(top + plot_h / 2) << ")\">" << name << "</text>\n";
    svg << "</g>\n";

    struct Series {
        CurveModel model;
        const char* color;
    };
    const std::array<Series, 2> series{{{CurveModel::Moba, "#d62728"}, {CurveModel::Ba, "#1f77b4"}}};
    for (std::size_t s = 0; s < series.size(); ++s) {
        std::ostringstream coords;
        std::ostringstream marks;
        for (const auto& p : points) {
            const auto v = pick(p);
            if (p.model != series[s].model || !v) continue;
            coords << fixed(sx(p.reject_param)) << ',' << fixed(sy(*v)) << ' ';
            marks << "<circle cx=\"" << fixed(sx(p.reject_param)) << "\" cy=\"" << fixed(sy(*v))
                  << "\" r=\"4\" fill=\"" << series[s].color << "\"/>\n";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << series[s].color << "\" stroke-width=\"2\" points=\""
            << coords.str() << "\"/>\n"
            << marks.str();
        const double ly = top + 20.0 + 24.0 * static_cast<double>(s);
        svg << "<line x1=\"" << fixed(left + plot_w + 15) << "\" y1=\"" << fixed(ly) << "\" x2=\""
            << fixed(left + plot_w + 45) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << series[s].color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fixed(left + plot_w + 52) << "\" y=\"" << fixed(ly + 4)
            << "\" font-size=\"14\" font-family=\"sans-serif\">" << to_string(series[s].model) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace moba
