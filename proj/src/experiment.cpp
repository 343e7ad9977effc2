#include "rankpi/experiment.hpp"

#include "rankpi/error.hpp"
#include "rankpi/parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rankpi {

namespace {

std::string triple(const EvaluationReport &r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f\\%.3f\\%.3f", r.example_accuracy, r.example_fmeasure, r.subset_accuracy);
    return buf;
}

struct ResolvedKernels {
    KernelSpec available;
    std::optional<KernelSpec> privileged;
};

ResolvedKernels resolve(const MultiLabelDataset &train, const ExperimentSettings &settings) {
    ResolvedKernels out{settings.kernel.resolve(train.available()), std::nullopt};
    if (train.has_privileged()) {
        out.privileged = settings.privileged_kernel.resolve(train.privileged());
    }
    return out;
}

}  // namespace

const VariantRun &AblationResult::run(Variant v) const {
    for (const auto &r : runs) {
        if (r.variant == v) {
            return r;
        }
    }
    throw std::out_of_range("variant '" + std::string(to_string(v)) + "' was not part of this ablation");
}

AblationResult run_ablation(const MultiLabelDataset &train, const MultiLabelDataset &test,
                            std::span<const LabelSet> truths, const ExperimentSettings &settings,
                            std::span<const Variant> variants) {
    if (!train.has_privileged()) {
        std::string needing;
        for (auto v : variants) {
            if (uses_privileged(v)) {
                needing += (needing.empty() ? "" : ", ") + std::string(to_string(v)) + " (" +
                           std::string(display_name(v)) + ")";
            }
        }
        if (!needing.empty()) {
            throw DataError("privileged features are required by variants: " + needing);
        }
    }
    if (test.d() != train.d()) {
        throw DataError("test data has " + std::to_string(test.d()) + " available features, training data has " +
                        std::to_string(train.d()));
    }
    if (truths.size() != static_cast<std::size_t>(test.n())) {
        throw DataError("test truth has " + std::to_string(truths.size()) + " rows, test data has " +
                        std::to_string(test.n()));
    }
    const auto kernels = resolve(train, settings);

    AblationResult result;
    result.runs.resize(variants.size());
    parallel_for(variants.size(), [&](std::size_t t) {
        auto cfg = settings.config;
        cfg.variant = variants[t];
        TrainOptions options;
        options.ridge_lambda = settings.ridge_lambda;
        auto trained = rankpi::train(train, cfg, kernels.available, kernels.privileged, options);
        auto &run = result.runs[t];
        run.variant = variants[t];
        run.predictions = predict_rows(trained.model, test.available());
        run.report = evaluate(truths, run.predictions);
        run.solve = std::move(trained.report);
        run.model = std::move(trained.model);
    });
    return result;
}

std::string render_ablation_table(std::span<const std::pair<std::string, AblationResult>> rows) {
    std::vector<Variant> columns;
    for (const auto &[name, result] : rows) {
        for (const auto &run : result.runs) {
            if (std::find(columns.begin(), columns.end(), run.variant) == columns.end()) {
                columns.push_back(run.variant);
            }
        }
    }
    std::ostringstream out;
    char cell[64];
    std::snprintf(cell, sizeof cell, "%-16s", "Run");
    out << cell;
    for (auto v : columns) {
        std::snprintf(cell, sizeof cell, " | %-19s", std::string(display_name(v)).c_str());
        out << cell;
    }
    out << '\n';
    for (const auto &[name, result] : rows) {
        std::snprintf(cell, sizeof cell, "%-16s", name.c_str());
        out << cell;
        for (auto v : columns) {
            const auto it = std::find_if(result.runs.begin(), result.runs.end(),
                                         [v](const VariantRun &r) { return r.variant == v; });
            std::snprintf(cell, sizeof cell, " | %-19s", it == result.runs.end() ? "-" : triple(it->report).c_str());
            out << cell;
        }
        out << '\n';
    }
    out << "cells: example accuracy\\example F-measure\\subset accuracy\n";
    return out.str();
}

std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed) {
    if (folds < 2 || folds > n) {
        throw std::invalid_argument("folds must be in [2, n]");
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    // Fisher-Yates with an explicit modulus so the permutation does not depend on the standard library.
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
    }
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        fold[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % static_cast<std::size_t>(folds));
    }
    return fold;
}

GridResult grid_search(const MultiLabelDataset &ds, const ExperimentSettings &settings, const GridSpec &grid) {
    auto or_default = [](const std::vector<double> &values, double fallback) {
        return values.empty() ? std::vector<double>{fallback} : values;
    };
    const auto Cs = or_default(grid.C, settings.config.C);
    const auto Cstars = or_default(grid.C_star, settings.config.C_star);
    const auto Ds = or_default(grid.D, settings.config.D);
    std::vector<std::optional<double>> gammas;
    if (grid.gamma.empty()) {
        gammas.push_back(settings.kernel.gamma);
    } else {
        gammas.assign(grid.gamma.begin(), grid.gamma.end());
    }
    if (uses_privileged(settings.config.variant) && !ds.has_privileged()) {
        throw DataError("variant '" + std::string(to_string(settings.config.variant)) +
                        "' requires privileged features");
    }

    GridResult result;
    for (double C : Cs) {
        for (double Cs_ : Cstars) {
            for (double D : Ds) {
                for (const auto &gamma : gammas) {
                    result.cells.push_back(GridCell{C, Cs_, D, gamma, {}});
                }
            }
        }
    }

    const auto fold = fold_assignment(ds.n(), grid.folds, grid.seed);
    std::vector<std::vector<int>> train_rows(static_cast<std::size_t>(grid.folds));
    std::vector<std::vector<int>> held_rows(static_cast<std::size_t>(grid.folds));
    for (int i = 0; i < ds.n(); ++i) {
        for (int f = 0; f < grid.folds; ++f) {
            (fold[static_cast<std::size_t>(i)] == f ? held_rows : train_rows)[static_cast<std::size_t>(f)].push_back(i);
        }
    }

    parallel_for(result.cells.size(), [&](std::size_t c) {
        auto &cell = result.cells[c];
        ExperimentSettings local = settings;
        local.config.C = cell.C;
        local.config.C_star = cell.C_star;
        local.config.D = cell.D;
        local.kernel.gamma = cell.gamma;
        std::vector<LabelSet> truths;
        std::vector<LabelSet> preds;
        for (int f = 0; f < grid.folds; ++f) {
            const auto train = ds.subset(train_rows[static_cast<std::size_t>(f)]);
            const auto held = ds.subset(held_rows[static_cast<std::size_t>(f)]);
            const auto kernels = resolve(train, local);
            TrainOptions options;
            options.ridge_lambda = local.ridge_lambda;
            const auto trained = rankpi::train(
                train, local.config, kernels.available,
                uses_privileged(local.config.variant) ? kernels.privileged : std::nullopt, options);
            const auto fold_preds = predict_rows(trained.model, held.available());
            truths.insert(truths.end(), held.labels().begin(), held.labels().end());
            preds.insert(preds.end(), fold_preds.begin(), fold_preds.end());
        }
        cell.report = evaluate(truths, preds);
    });

    for (std::size_t c = 1; c < result.cells.size(); ++c) {
        if (result.cells[c].report.example_fmeasure > result.cells[result.best].report.example_fmeasure) {
            result.best = c;
        }
    }
    return result;
}

std::string render_grid(const GridResult &result) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %-10s %-10s %-12s %-9s %-9s %-9s\n", "C", "Cstar", "D", "gamma",
                  "accuracy", "F", "subset");
    out << line;
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        const auto &cell = result.cells[c];
        const std::string gamma = cell.gamma ? format_real(*cell.gamma) : "auto";
        std::snprintf(line, sizeof line, "%-10g %-10g %-10g %-12s %-9.4f %-9.4f %-9.4f%s\n", cell.C, cell.C_star,
                      cell.D, gamma.c_str(), cell.report.example_accuracy, cell.report.example_fmeasure,
                      cell.report.subset_accuracy, c == result.best ? "  *" : "");
        out << line;
    }
    const auto &best = result.cells[result.best];
    out << "best C=" << format_real(best.C) << " Cstar=" << format_real(best.C_star) << " D=" << format_real(best.D)
        << " gamma=" << (best.gamma ? format_real(*best.gamma) : std::string("auto"))
        << " example_fmeasure=" << format_real(best.report.example_fmeasure) << '\n';
    return out.str();
}

}  // namespace rankpi
