#include "rankpi/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace rankpi {

namespace {

int intersection_size(const LabelSet &a, const LabelSet &b) {
    std::vector<int> common;
    std::set_intersection(a.present().begin(), a.present().end(), b.present().begin(), b.present().end(),
                          std::back_inserter(common));
    return static_cast<int>(common.size());
}

std::string fixed3(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", value);
    return buf;
}

}  // namespace

ExampleScores example_metrics(const LabelSet &truth, const LabelSet &pred) {
    if (truth.q() != pred.q()) {
        throw std::invalid_argument("example_metrics: label universes differ");
    }
    const int inter = intersection_size(truth, pred);
    const int sum = truth.size() + pred.size();
    const int uni = sum - inter;
    ExampleScores s;
    s.accuracy = uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
    s.fmeasure = sum == 0 ? 1.0 : 2.0 * inter / sum;
    s.subset = truth == pred ? 1.0 : 0.0;
    return s;
}

double per_label_f(std::span<const LabelSet> truths, std::span<const LabelSet> preds, int k) {
    if (truths.size() != preds.size()) {
        throw std::invalid_argument("per_label_f: sequences are not aligned");
    }
    int tp = 0;
    int fp = 0;
    int fn = 0;
    for (std::size_t t = 0; t < truths.size(); ++t) {
        const bool truth = truths[t].contains(k);
        const bool pred = preds[t].contains(k);
        tp += truth && pred ? 1 : 0;
        fp += !truth && pred ? 1 : 0;
        fn += truth && !pred ? 1 : 0;
    }
    const int denom = 2 * tp + fp + fn;
    return denom == 0 ? 1.0 : 2.0 * tp / denom;
}

EvaluationReport evaluate(std::span<const LabelSet> truths, std::span<const LabelSet> preds) {
    if (truths.empty()) {
        throw std::invalid_argument("evaluate: empty evaluation set");
    }
    if (truths.size() != preds.size()) {
        throw std::invalid_argument("evaluate: " + std::to_string(truths.size()) + " truths vs " +
                                    std::to_string(preds.size()) + " predictions");
    }
    EvaluationReport r;
    for (std::size_t t = 0; t < truths.size(); ++t) {
        const auto s = example_metrics(truths[t], preds[t]);
        r.example_accuracy += s.accuracy;
        r.example_fmeasure += s.fmeasure;
        r.subset_accuracy += s.subset;
    }
    const auto n = static_cast<double>(truths.size());
    r.example_accuracy /= n;
    r.example_fmeasure /= n;
    r.subset_accuracy /= n;
    r.n_eval = static_cast<int>(truths.size());
    const int q = truths.front().q();
    r.per_label_f.reserve(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k) {
        r.per_label_f.push_back(per_label_f(truths, preds, k));
    }
    return r;
}

std::string render_key_values(const EvaluationReport &report, bool per_label) {
    std::ostringstream out;
    out << "n_eval=" << report.n_eval << '\n';
    out << "example_accuracy=" << format_real(report.example_accuracy) << '\n';
    out << "example_fmeasure=" << format_real(report.example_fmeasure) << '\n';
    out << "subset_accuracy=" << format_real(report.subset_accuracy) << '\n';
    if (per_label) {
        for (std::size_t k = 0; k < report.per_label_f.size(); ++k) {
            out << "label_f." << k << '=' << format_real(report.per_label_f[k]) << '\n';
        }
    }
    return out.str();
}

std::string render_table(const EvaluationReport &report) {
    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof line, "%-20s %8s\n", "metric", "value");
    out << line;
    std::snprintf(line, sizeof line, "%-20s %8s\n", "example accuracy", fixed3(report.example_accuracy).c_str());
    out << line;
    std::snprintf(line, sizeof line, "%-20s %8s\n", "example F-measure", fixed3(report.example_fmeasure).c_str());
    out << line;
    std::snprintf(line, sizeof line, "%-20s %8s\n", "subset accuracy", fixed3(report.subset_accuracy).c_str());
    out << line;
    return out.str();
}

std::string render_per_label_table(std::span<const NamedReport> columns, std::span<const std::string> label_names) {
    std::ostringstream out;
    std::size_t q = 0;
    for (const auto &c : columns) {
        q = std::max(q, c.report.per_label_f.size());
    }
    char cell[64];
    std::snprintf(cell, sizeof cell, "%-12s", "Label");
    out << cell;
    for (const auto &c : columns) {
        std::snprintf(cell, sizeof cell, " %10s", c.name.c_str());
        out << cell;
    }
    out << '\n';
    for (std::size_t k = 0; k < q; ++k) {
        const std::string name = k < label_names.size() ? label_names[k] : std::to_string(k);
        std::snprintf(cell, sizeof cell, "%-12s", name.c_str());
        out << cell;
        for (const auto &c : columns) {
            const auto &f = c.report.per_label_f;
            std::snprintf(cell, sizeof cell, " %10s", k < f.size() ? fixed3(f[k]).c_str() : "-");
            out << cell;
        }
        out << '\n';
    }
    std::snprintf(cell, sizeof cell, "%-12s", "Avg.");
    out << cell;
    for (const auto &c : columns) {
        const auto &f = c.report.per_label_f;
        double mean = 0.0;
        for (double v : f) {
            mean += v;
        }
        mean = f.empty() ? 0.0 : mean / static_cast<double>(f.size());
        std::snprintf(cell, sizeof cell, " %10s", fixed3(mean).c_str());
        out << cell;
    }
    out << '\n';
    return out.str();
}

}  // namespace rankpi
