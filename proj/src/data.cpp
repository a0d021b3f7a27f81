#include "moba/data.hpp"

#include "moba/random.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace moba {

namespace {

constexpr std::string_view kHeader = "id,label,score";

double parse_score(std::string_view field, std::size_t row) {
    std::string_view digits = field;
    if (!digits.empty() && digits.front() == '+') {
        digits.remove_prefix(1);
    }
    double value = 0.0;
    const auto* first = digits.data();
    const auto* last = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (digits.empty() || ec != std::errc{} || ptr != last) {
        throw ParseError(row, "score '" + std::string(field) + "' is not a decimal number");
    }
    if (!std::isfinite(value)) {
        throw ParseError(row, "score '" + std::string(field) + "' is not finite");
    }
    return value;
}

Label parse_label(std::string_view field, std::size_t row) {
    if (field == "+1") return Label::Positive;
    if (field == "-1") return Label::Negative;
    throw ParseError(row, "label '" + std::string(field) + "' is not +1 or -1");
}

std::string format_score(double score) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), score);
    (void)ec;
    return std::string(buf.data(), ptr);
}

// Largest-remainder apportionment of n items over the three fractions, then
// bumped so that no split is empty.
std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& fracs) {
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        const double exact = fracs[k] * static_cast<double>(n);
        counts[k] = static_cast<std::size_t>(std::floor(exact));
        remainders[k] = exact - static_cast<double>(counts[k]);
        assigned += counts[k];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) {
        ++counts[order[k % 3]];
    }
    for (std::size_t k = 0; k < 3; ++k) {
        if (counts[k] == 0) {
            auto donor = std::max_element(counts.begin(), counts.end());
            --*donor;
            ++counts[k];
        }
    }
    return counts;
}

} // namespace

ParseError::ParseError(std::size_t row, const std::string& what)
    : DataError("row " + std::to_string(row) + " (line " + std::to_string(row + 1) + "): " + what),
      row_(row) {}

ScoredDataset::ScoredDataset(std::vector<ScoredExample> examples) : examples_(std::move(examples)) {
    for (const auto& ex : examples_) {
        if (!std::isfinite(ex.score)) {
            throw DataError("example '" + ex.id + "' has a non-finite score");
        }
        if (ex.label == Label::Positive) ++n_pos_;
    }
}

std::pair<double, double> ScoredDataset::score_range() const {
    if (examples_.empty()) {
        throw DataError("score range of an empty dataset");
    }
    auto [lo, hi] = std::minmax_element(
        examples_.begin(), examples_.end(),
        [](const ScoredExample& a, const ScoredExample& b) { return a.score < b.score; });
    return {lo->score, hi->score};
}

void require_both_classes(const ScoredDataset& data, std::string_view role) {
    if (data.n_pos() == 0 || data.n_neg() == 0) {
        throw DataError(std::string(role) + " set needs both classes (has " +
                        std::to_string(data.n_pos()) + " positive, " +
                        std::to_string(data.n_neg()) + " negative)");
    }
}

ScoredDataset parse_scored_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("scores file is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) {
        throw DataError("scores file header must be '" + std::string(kHeader) + "', got '" + line + "'");
    }

    std::vector<ScoredExample> examples;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            // a single trailing newline is fine; blank rows mid-file are not
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw ParseError(row, "blank row");
        }
        std::string_view view(line);
        const auto c1 = view.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
        if (c2 == std::string_view::npos || view.find(',', c2 + 1) != std::string_view::npos) {
            throw ParseError(row, "expected 3 comma-separated fields: '" + line + "'");
        }
        ScoredExample ex;
        ex.id = std::string(view.substr(0, c1));
        ex.label = parse_label(view.substr(c1 + 1, c2 - c1 - 1), row);
        ex.score = parse_score(view.substr(c2 + 1), row);
        examples.push_back(std::move(ex));
    }
    return ScoredDataset(std::move(examples));
}

ScoredDataset load_scored_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open scores file '" + path.string() + "'");
    }
    return parse_scored_csv(in);
}

void write_scored_csv(const ScoredDataset& data, std::ostream& out) {
    out << kHeader << '\n';
    for (const auto& ex : data.examples()) {
        out << ex.id << ',' << (ex.label == Label::Positive ? "+1" : "-1") << ','
            << format_score(ex.score) << '\n';
    }
}

void write_scored_csv(const ScoredDataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write scores file '" + path.string() + "'");
    }
    write_scored_csv(data, out);
}

void SplitSpec::validate() const {
    for (double f : {train_frac, valid_frac, test_frac}) {
        if (!(f > 0.0 && f < 1.0)) {
            throw std::invalid_argument("split fractions must lie in (0, 1)");
        }
    }
    if (std::abs(train_frac + valid_frac + test_frac - 1.0) > 1e-9) {
        throw std::invalid_argument("split fractions must sum to 1");
    }
}

DatasetSplit stratified_split(const ScoredDataset& data, const SplitSpec& spec) {
    spec.validate();
    const auto& all = data.examples();

    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < all.size(); ++i) {
        by_class[all[i].label == Label::Positive ? 0 : 1].push_back(i);
    }

    RandomStream rng(spec.seed);
    std::vector<int> destination(all.size(), -1);
    for (auto& members : by_class) {
        if (members.size() < 3) {
            throw DataError("stratified split needs at least 3 examples per class (have " +
                            std::to_string(members.size()) + ")");
        }
        std::shuffle(members.begin(), members.end(), rng.engine());
        const auto counts = apportion(members.size(), {spec.train_frac, spec.valid_frac, spec.test_frac});
        std::size_t cursor = 0;
        for (int k = 0; k < 3; ++k) {
            for (std::size_t j = 0; j < counts[static_cast<std::size_t>(k)]; ++j) {
                destination[members[cursor++]] = k;
            }
        }
    }

    std::array<std::vector<ScoredExample>, 3> parts;
    for (std::size_t i = 0; i < all.size(); ++i) {
        parts[static_cast<std::size_t>(destination[i])].push_back(all[i]);
    }
    return {ScoredDataset(std::move(parts[0])), ScoredDataset(std::move(parts[1])),
            ScoredDataset(std::move(parts[2]))};
}

ScoredDataset synth_two_gaussian(std::size_t n_pos, std::size_t n_neg, double mu_pos,
                                 double mu_neg, double sigma, std::uint64_t seed) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("synth_two_gaussian: sigma must be positive");
    }
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("synth_two_gaussian: both class counts must be >= 1");
    }
    RandomStream rng(seed);
    std::normal_distribution<double> pos(mu_pos, sigma);
    std::normal_distribution<double> neg(mu_neg, sigma);

    std::vector<ScoredExample> examples;
    examples.reserve(n_pos + n_neg);
    for (std::size_t i = 0; i < n_pos; ++i) {
        examples.push_back({std::to_string(examples.size()), pos(rng.engine()), Label::Positive});
    }
    for (std::size_t i = 0; i < n_neg; ++i) {
        examples.push_back({std::to_string(examples.size()), neg(rng.engine()), Label::Negative});
    }
    return ScoredDataset(std::move(examples));
}

} // namespace moba
