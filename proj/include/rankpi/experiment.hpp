#pragma once

#include "rankpi/data.hpp"
#include "rankpi/dual_problem.hpp"
#include "rankpi/kernel.hpp"
#include "rankpi/metrics.hpp"
#include "rankpi/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rankpi {

// ---------------------------------------------------------------------------
// Synthetic paired data
// ---------------------------------------------------------------------------

/**
 * Latent z ~ N(0, I_d), a seeded teacher W (q x d), labels = top-k of W z.
 * Available x = z + sigma * noise, privileged x* = z + sigma_star * noise.
 * Train and test instances share the teacher.
 */
struct SynthParams {
    std::uint64_t seed = 1;
    int n = 200;
    int n_test = 0;
    int q = 5;
    int d = 10;
    double sigma = 1.0;
    double sigma_star = 0.1;
    int k = 2;

    /// Throws std::invalid_argument unless 1 <= k < q and sigma >= sigma_star >= 0.
    void validate() const;
};

struct SynthData {
    MultiLabelDataset train;
    std::optional<MultiLabelDataset> test;
    Eigen::MatrixXd teacher;
};

[[nodiscard]] SynthData synth_generate(const SynthParams &params);

struct SynthFiles {
    std::filesystem::path train;
    std::filesystem::path train_priv;
    std::filesystem::path test;
    std::filesystem::path test_priv;
    std::filesystem::path test_truth;
    std::filesystem::path manifest;
};

[[nodiscard]] SynthFiles synth_paths(const std::string &prefix);
/// Writes train (and, when present, test) files plus a key=value manifest.
SynthFiles write_synth(const SynthData &data, const SynthParams &params, const std::string &prefix);

// ---------------------------------------------------------------------------
// Ablation and grid search
// ---------------------------------------------------------------------------

struct ExperimentSettings {
    TrainConfig config;  ///< variant is overridden per run
    KernelRequest kernel;
    KernelRequest privileged_kernel;
    double ridge_lambda = 1.0;
};

inline constexpr Variant all_variants[] = {Variant::binary_relevance, Variant::ranking_only,
                                           Variant::similarity_only, Variant::full};

struct VariantRun {
    Variant variant = Variant::full;
    TrainedModel model;
    SolveReport solve;
    std::vector<LabelSet> predictions;
    EvaluationReport report;
};

struct AblationResult {
    std::vector<VariantRun> runs;  ///< in the order of the requested variants

    [[nodiscard]] const VariantRun &run(Variant v) const;
};

/// Trains one model per variant on the resolved kernels and evaluates it on
/// @p test with available features only.
/// @throws DataError naming the variants that need privileged features when @p train has none.
[[nodiscard]] AblationResult run_ablation(const MultiLabelDataset &train, const MultiLabelDataset &test,
                                          std::span<const LabelSet> truths, const ExperimentSettings &settings,
                                          std::span<const Variant> variants = all_variants);

/// One row per named run, one column per variant, cells "accuracy\F\subset".
[[nodiscard]] std::string render_ablation_table(std::span<const std::pair<std::string, AblationResult>> rows);

struct GridSpec {
    std::vector<double> C;
    std::vector<double> C_star;
    std::vector<double> D;
    std::vector<double> gamma;  ///< available-space kernel; empty keeps the settings' choice
    int folds = 5;
    std::uint64_t seed = 1;
};

struct GridCell {
    double C = 0.0;
    double C_star = 0.0;
    double D = 0.0;
    std::optional<double> gamma;
    EvaluationReport report;  ///< over the pooled out-of-fold predictions
};

struct GridResult {
    std::vector<GridCell> cells;
    std::size_t best = 0;  ///< highest example F-measure, first in grid order on ties
};

/// fold[i] in [0, folds), balanced, from a seeded shuffle.
[[nodiscard]] std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed);

[[nodiscard]] GridResult grid_search(const MultiLabelDataset &ds, const ExperimentSettings &settings,
                                     const GridSpec &grid);
[[nodiscard]] std::string render_grid(const GridResult &result);

}  // namespace rankpi
