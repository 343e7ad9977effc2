#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace rankpi {

/// Row-major so that a single instance is a contiguous row.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * @brief The present labels of one instance, drawn from a universe of @p q labels.
 * @details Indices are kept sorted and unique. Everything else in the library
 *          (ranking pairs, dual coefficients, metrics) is phrased in terms of
 *          present() and absent().
 */
class LabelSet {
  public:
    LabelSet() = default;
    /// Throws std::invalid_argument on out-of-range or duplicate indices.
    LabelSet(std::vector<int> present, int q);

    [[nodiscard]] int q() const noexcept { return q_; }
    [[nodiscard]] const std::vector<int> &present() const noexcept { return present_; }
    [[nodiscard]] std::vector<int> absent() const;
    [[nodiscard]] bool contains(int k) const noexcept;
    [[nodiscard]] int size() const noexcept { return static_cast<int>(present_.size()); }
    [[nodiscard]] int absent_size() const noexcept { return q_ - size(); }
    /// True when the instance yields no ranking pairs (|Y| = 0 or |Y| = q).
    [[nodiscard]] bool degenerate() const noexcept { return size() == 0 || size() == q_; }

    friend bool operator==(const LabelSet &, const LabelSet &) = default;

  private:
    std::vector<int> present_;
    int q_ = 0;
};

struct Instance {
    Eigen::VectorXd x;
    Eigen::VectorXd x_star;  // empty when the dataset has no privileged features
    LabelSet labels;
};

/// (i, j, l): instance i, present label j, absent label l.
struct RankingPair {
    int i;
    int j;
    int l;
    friend bool operator==(const RankingPair &, const RankingPair &) = default;
};

/**
 * @brief Aligned available features, optional privileged features and label sets.
 * @details Immutable after construction. A dataset without privileged features
 *          has d_star() == 0 and can only feed variants that ignore them.
 */
class MultiLabelDataset {
  public:
    MultiLabelDataset(FeatureMatrix available, FeatureMatrix privileged, std::vector<LabelSet> labels);

    [[nodiscard]] int n() const noexcept { return static_cast<int>(labels_.size()); }
    [[nodiscard]] int q() const noexcept { return labels_.front().q(); }
    [[nodiscard]] int d() const noexcept { return static_cast<int>(available_.cols()); }
    [[nodiscard]] int d_star() const noexcept { return static_cast<int>(privileged_.cols()); }
    [[nodiscard]] bool has_privileged() const noexcept { return d_star() > 0; }

    [[nodiscard]] const FeatureMatrix &available() const noexcept { return available_; }
    [[nodiscard]] const FeatureMatrix &privileged() const noexcept { return privileged_; }
    [[nodiscard]] const std::vector<LabelSet> &labels() const noexcept { return labels_; }
    [[nodiscard]] const LabelSet &label(int i) const { return labels_.at(static_cast<std::size_t>(i)); }
    [[nodiscard]] Instance instance(int i) const;

    /// Rows in the given order; used for cross-validation folds.
    [[nodiscard]] MultiLabelDataset subset(std::span<const int> rows) const;
    /// Same instances with the privileged block removed.
    [[nodiscard]] MultiLabelDataset without_privileged() const;

  private:
    FeatureMatrix available_;
    FeatureMatrix privileged_;
    std::vector<LabelSet> labels_;
};

/// All (j, l) in Y_i x complement(Y_i), lexicographic.
[[nodiscard]] std::vector<RankingPair> ranking_pairs(const MultiLabelDataset &ds, int i);
[[nodiscard]] std::vector<RankingPair> ranking_pairs(const LabelSet &labels, int i);

struct LoadOptions {
    std::optional<int> q;  ///< label universe; inferred as max label + 1 when absent
    int min_d = 0;         ///< pad available features to at least this many columns
    int min_d_star = 0;    ///< same for privileged features
};

/// Parse the multi-label sparse text format. Errors carry the 1-based line number.
[[nodiscard]] MultiLabelDataset load_dataset(const std::filesystem::path &available,
                                             const std::optional<std::filesystem::path> &privileged,
                                             const LoadOptions &options = {});
[[nodiscard]] MultiLabelDataset read_dataset(std::istream &available, std::istream *privileged,
                                             const LoadOptions &options = {});

void save_dataset(const MultiLabelDataset &ds, const std::filesystem::path &available,
                  const std::optional<std::filesystem::path> &privileged);
void write_dataset(const MultiLabelDataset &ds, std::ostream &available, std::ostream *privileged);

/**
 * Label-list files: one instance per line, comma-separated label indices.
 * Reading also accepts dataset files, since only the text before the first
 * space is consulted.
 */
[[nodiscard]] std::vector<LabelSet> load_label_lists(const std::filesystem::path &path, std::optional<int> q = {});
[[nodiscard]] std::vector<LabelSet> read_label_lists(std::istream &in, std::optional<int> q = {});
void save_label_lists(std::span<const LabelSet> sets, const std::filesystem::path &path);
void write_label_lists(std::span<const LabelSet> sets, std::ostream &out);

/// Decimal text with 17 significant digits; parses back to the same double.
[[nodiscard]] std::string format_real(double value);

}  // namespace rankpi
