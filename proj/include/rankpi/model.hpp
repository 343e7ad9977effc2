#pragma once

#include "rankpi/data.hpp"
#include "rankpi/dual_problem.hpp"
#include "rankpi/fw_solver.hpp"
#include "rankpi/kernel.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rankpi {

/// Ridge regression of the label count on the available features; output rounded and clamped to [1, q].
struct LabelSizePredictor {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    double ridge_lambda = 1.0;
    int q = 2;

    [[nodiscard]] double raw(const ConstVectorRef &x) const;
};

/// Minimizes sum (w'x_i + b - counts_i)^2 + lambda |w|^2 with the intercept unpenalized.
[[nodiscard]] LabelSizePredictor train_size_predictor(const FeatureMatrix &features, std::span<const int> counts,
                                                      double lambda, int q);
/// Round-half-up of the regression output, clamped to [1, q].
[[nodiscard]] int predict_size(const LabelSizePredictor &predictor, const ConstVectorRef &x);
[[nodiscard]] int round_size(double raw, int q);

/**
 * @brief Everything needed to label new instances from available features.
 * @details score_k(x) = sum_i g(i, k) * kernel(support.row(i), x). Privileged
 *          features are never stored; privileged_kernel is kept for provenance.
 */
struct TrainedModel {
    Variant variant = Variant::full;
    int q = 2;
    KernelSpec kernel;
    std::optional<KernelSpec> privileged_kernel;
    Eigen::MatrixXd g;      ///< n_sv x q
    FeatureMatrix support;  ///< n_sv x d
    LabelSizePredictor size_predictor;
    TrainConfig train_config;

    [[nodiscard]] int d() const noexcept { return static_cast<int>(support.cols()); }
    [[nodiscard]] int support_count() const noexcept { return static_cast<int>(g.rows()); }
};

[[nodiscard]] Eigen::VectorXd decision_values(const TrainedModel &m, const ConstVectorRef &x);
/// One row of q scores per row of @p X.
[[nodiscard]] Eigen::MatrixXd decision_values_rows(const TrainedModel &m, const FeatureMatrix &X);

/// The psi labels with the largest scores; ties go to the lower label index.
[[nodiscard]] LabelSet top_labels(const ConstVectorRef &scores, int psi);

[[nodiscard]] LabelSet predict(const TrainedModel &m, const ConstVectorRef &x);
[[nodiscard]] std::vector<LabelSet> predict_rows(const TrainedModel &m, const FeatureMatrix &X);

/// Primal quantities recovered from the dual solution on the training set.
struct SlackReport {
    std::vector<RankingPair> pairs;             ///< all training ranking pairs, instance-major
    std::vector<double> ranking_slacks;         ///< xi_ijl = max(0, 1 - (f_j - f_l)), aligned with pairs
    std::vector<double> ranking_slacks_star;    ///< same for f*; empty without privileged terms
    Eigen::MatrixXd similarity_slacks;          ///< eta_ik = max(0, |f_k - f*_k| - eps); 0 x 0 without coupling
    double primal_objective = 0.0;

    [[nodiscard]] double max_slack() const;
};

struct TrainOptions {
    double ridge_lambda = 1.0;
    SolveOptions solve;
};

struct TrainResult {
    TrainedModel model;
    SolveReport report;
    SlackReport slacks;
};

/**
 * @brief Kernel matrices, dual solve, coefficient recovery, size predictor, diagnostics.
 * @details @p privileged_kernel is required for the variants that use privileged
 *          features and ignored otherwise. Non-convergence is reported through
 *          report.converged, not thrown.
 * @throws DataError when a privileged variant is trained without privileged features.
 */
[[nodiscard]] TrainResult train(const MultiLabelDataset &ds, const TrainConfig &cfg, const KernelSpec &kernel,
                                const std::optional<KernelSpec> &privileged_kernel, const TrainOptions &options = {});

/// Slack diagnostics for a given coefficient pair; g_star is ignored when the variant has no privileged terms.
[[nodiscard]] SlackReport slack_report(const DualProblem &p, const Coefficients &coeffs);

/// Model file round trip. Text is line-oriented with a trailing FNV-1a-64 checksum.
[[nodiscard]] std::string serialize_model(const TrainedModel &m);
[[nodiscard]] TrainedModel parse_model(std::string_view text);
void save_model(const TrainedModel &m, const std::filesystem::path &path);
[[nodiscard]] TrainedModel load_model(const std::filesystem::path &path);

[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace rankpi
