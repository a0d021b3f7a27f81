#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace moba {

enum class Label { Positive, Negative };

/// One example as seen by the rejection rule: an external scorer's
/// positive-class confidence plus the true label.
struct ScoredExample {
    std::string id;
    double score = 0.0;
    Label label = Label::Negative;

    friend bool operator==(const ScoredExample&, const ScoredExample&) = default;
};

/// Raised for any malformed or unusable input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed scores file. `row()` is the 1-based data row (header excluded).
class ParseError : public DataError {
public:
    ParseError(std::size_t row, const std::string& what);
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class ScoredDataset {
public:
    ScoredDataset() = default;

    /// Throws DataError if any score is non-finite.
    explicit ScoredDataset(std::vector<ScoredExample> examples);

    const std::vector<ScoredExample>& examples() const noexcept { return examples_; }
    std::size_t size() const noexcept { return examples_.size(); }
    bool empty() const noexcept { return examples_.empty(); }
    std::size_t n_pos() const noexcept { return n_pos_; }
    std::size_t n_neg() const noexcept { return examples_.size() - n_pos_; }

    /// Smallest and largest score. Throws DataError on an empty dataset.
    std::pair<double, double> score_range() const;

private:
    std::vector<ScoredExample> examples_;
    std::size_t n_pos_ = 0;
};

/// Throws DataError unless the dataset holds at least one example per class.
void require_both_classes(const ScoredDataset& data, std::string_view role);

ScoredDataset parse_scored_csv(std::istream& in);
ScoredDataset load_scored_csv(const std::filesystem::path& path);

/// Canonical form: header `id,label,score`, labels `+1`/`-1`, scores in
/// shortest round-trip decimal, LF endings.
void write_scored_csv(const ScoredDataset& data, std::ostream& out);
void write_scored_csv(const ScoredDataset& data, const std::filesystem::path& path);

struct SplitSpec {
    double train_frac = 0.6;
    double valid_frac = 0.2;
    double test_frac = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct DatasetSplit {
    ScoredDataset train;
    ScoredDataset valid;
    ScoredDataset test;
};

/// Per-class shuffled split. Each class is apportioned by largest remainder
/// and every split receives at least one example of each class. Examples keep
/// their input order inside each split.
DatasetSplit stratified_split(const ScoredDataset& data, const SplitSpec& spec);

/// Desk-scale stand-in for a trained scorer: positive scores ~ N(mu_pos, sigma),
/// negative scores ~ N(mu_neg, sigma). Positives come first; ids are 0..n-1.
ScoredDataset synth_two_gaussian(std::size_t n_pos, std::size_t n_neg, double mu_pos,
                                 double mu_neg, double sigma, std::uint64_t seed);

} // namespace moba
