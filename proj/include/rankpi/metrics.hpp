#pragma once

#include "rankpi/data.hpp"

#include <span>
#include <string>
#include <vector>

namespace rankpi {

struct ExampleScores {
    double accuracy = 0.0;  ///< |Y n Z| / |Y u Z|
    double fmeasure = 0.0;  ///< 2 |Y n Z| / (|Y| + |Z|)
    double subset = 0.0;    ///< 1 if Y == Z
};

struct EvaluationReport {
    double example_accuracy = 0.0;
    double example_fmeasure = 0.0;
    double subset_accuracy = 0.0;
    std::vector<double> per_label_f;
    int n_eval = 0;
};

/// Both-empty pairs score 1 on every metric.
[[nodiscard]] ExampleScores example_metrics(const LabelSet &truth, const LabelSet &pred);

/// Binary F1 of label k over the set: 2TP / (2TP + FP + FN); 1 when TP = FP = FN = 0.
[[nodiscard]] double per_label_f(std::span<const LabelSet> truths, std::span<const LabelSet> preds, int k);

/// Throws std::invalid_argument on empty or misaligned input.
[[nodiscard]] EvaluationReport evaluate(std::span<const LabelSet> truths, std::span<const LabelSet> preds);

/// "metric=value" lines, values with 17 significant digits.
[[nodiscard]] std::string render_key_values(const EvaluationReport &report, bool per_label = false);
/// Aligned text table of the three example-based metrics.
[[nodiscard]] std::string render_table(const EvaluationReport &report);

struct NamedReport {
    std::string name;
    EvaluationReport report;
};

/// Rows = labels, columns = the named reports, final "Avg." row.
[[nodiscard]] std::string render_per_label_table(std::span<const NamedReport> columns,
                                                 std::span<const std::string> label_names = {});

}  // namespace rankpi
