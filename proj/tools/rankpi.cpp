// rankpi: train, predict, evaluate, ablate, gridsearch and synth front end.
#include "rankpi/data.hpp"
#include "rankpi/error.hpp"
#include "rankpi/experiment.hpp"
#include "rankpi/metrics.hpp"
#include "rankpi/model.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace rankpi;

enum ExitCode { ok = 0, usage_error = 1, data_error = 2, numerical_error = 3 };

/// Flags shared by train, ablate and gridsearch.
struct SharedFlags {
    std::string variant = "full";
    std::string kernel = "linear";
    std::string priv_kernel;  // empty: same kind as the available kernel
    std::optional<double> gamma;
    std::optional<double> priv_gamma;
    int degree = 2;
    double coef0 = 1.0;
    bool no_bias = false;
    double C = 1.0;
    double C_star = 1.0;
    double D = 1.0;
    double epsilon = 0.1;
    double tol = 1e-5;
    int max_iter = 10000;
    double lambda = 1.0;

    void add_to(CLI::App &app, bool with_variant, bool with_scalars) {
        if (with_variant) {
            app.add_option("--variant", variant, "full|ml|pi|br (or the long tags)")->capture_default_str();
        }
        app.add_option("--kernel", kernel, "linear|rbf|poly")->capture_default_str();
        app.add_option("--priv-kernel", priv_kernel, "privileged-space kernel (default: same as --kernel)");
        if (with_scalars) {
            app.add_option("--gamma", gamma, "kernel width; rbf defaults to the median heuristic");
        }
        app.add_option("--priv-gamma", priv_gamma, "privileged kernel width");
        app.add_option("--degree", degree, "polynomial degree")->capture_default_str();
        app.add_option("--coef0", coef0, "polynomial offset")->capture_default_str();
        app.add_flag("--no-bias", no_bias, "do not add 1 to the kernel (drops the absorbed bias)");
        if (with_scalars) {
            app.add_option("--C", C, "available-space box")->capture_default_str();
            app.add_option("--Cstar", C_star, "privileged-space box")->capture_default_str();
            app.add_option("--D", D, "similarity box")->capture_default_str();
        }
        app.add_option("--epsilon", epsilon, "similarity tolerance")->capture_default_str();
        app.add_option("--tol", tol, "relative Frank-Wolfe gap")->capture_default_str();
        app.add_option("--max-iter", max_iter, "Frank-Wolfe iteration cap")->capture_default_str();
        app.add_option("--lambda", lambda, "ridge penalty of the label-count predictor")->capture_default_str();
    }

    [[nodiscard]] ExperimentSettings settings() const {
        ExperimentSettings s;
        s.config.C = C;
        s.config.C_star = C_star;
        s.config.D = D;
        s.config.epsilon = epsilon;
        s.config.tol = tol;
        s.config.max_iter = max_iter;
        s.config.variant = parse_variant(variant);
        s.config.validate();
        s.kernel = KernelRequest{parse_kernel_kind(kernel), gamma, degree, coef0, !no_bias};
        s.privileged_kernel = KernelRequest{parse_kernel_kind(priv_kernel.empty() ? kernel : priv_kernel),
                                            priv_gamma, degree, coef0, !no_bias};
        s.ridge_lambda = lambda;
        if (!(lambda > 0.0)) {
            throw std::invalid_argument("--lambda must be positive");
        }
        return s;
    }
};

void print(const std::string &text) { std::fwrite(text.data(), 1, text.size(), stdout); }

void write_text(const std::string &path, const std::string &text) {
    std::FILE *f = std::fopen(path.c_str(), "wb");
    if (f == nullptr || std::fwrite(text.data(), 1, text.size(), f) != text.size() || std::fclose(f) != 0) {
        throw DataError("cannot write '" + path + "'");
    }
}

std::optional<std::filesystem::path> optional_path(const std::string &s) {
    return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s);
}

std::string label_list_text(std::span<const LabelSet> sets) {
    std::ostringstream out;
    write_label_lists(sets, out);
    return out.str();
}

int run_train(const std::string &data, const std::string &priv, const SharedFlags &flags, int log_stride,
              const std::string &model_path) {
    const auto settings = flags.settings();
    const auto ds = load_dataset(data, optional_path(priv));
    const auto kernel = settings.kernel.resolve(ds.available());
    std::optional<KernelSpec> priv_kernel;
    if (ds.has_privileged() && uses_privileged(settings.config.variant)) {
        priv_kernel = settings.privileged_kernel.resolve(ds.privileged());
    }
    TrainOptions options;
    options.ridge_lambda = settings.ridge_lambda;
    options.solve.log = &std::cerr;
    options.solve.log_stride = log_stride;
    const auto result = train(ds, settings.config, kernel, priv_kernel, options);
    save_model(result.model, model_path);
    std::cerr << "wall_time=" << result.report.wall_time << "s\n";
    print("variant=" + std::string(to_string(result.model.variant)) + '\n');
    print(summarize(result.report) + '\n');
    print("support_vectors=" + std::to_string(result.model.support_count()) + '\n');
    print("primal_objective=" + format_real(result.slacks.primal_objective) + '\n');
    print("max_slack=" + format_real(result.slacks.max_slack()) + '\n');
    if (!result.report.converged) {
        std::cerr << "warning: stopped at the iteration cap before reaching --tol\n";
    }
    return ok;
}

int run_predict(const std::string &model_path, const std::string &data, const std::string &out) {
    const auto model = load_model(model_path);
    LoadOptions load;
    load.q = model.q;
    load.min_d = model.d();
    const auto ds = load_dataset(data, std::nullopt, load);
    if (ds.d() != model.d()) {
        throw DataError("data has " + std::to_string(ds.d()) + " features, model expects " +
                        std::to_string(model.d()));
    }
    const auto preds = predict_rows(model, ds.available());
    write_text(out, label_list_text(preds));
    return ok;
}

int run_evaluate(const std::string &truth_path, const std::string &pred_path, bool per_label) {
    const auto preds = load_label_lists(pred_path);
    const int q = preds.empty() ? 2 : preds.front().q();
    auto truths = load_label_lists(truth_path);
    // Align the label universes: the wider file wins.
    const int width = std::max(q, truths.empty() ? 2 : truths.front().q());
    auto widen = [width](std::vector<LabelSet> &sets) {
        for (auto &s : sets) {
            s = LabelSet(s.present(), width);
        }
    };
    widen(truths);
    auto wide_preds = preds;
    widen(wide_preds);
    const auto report = evaluate(truths, wide_preds);
    print(render_key_values(report, per_label));
    return ok;
}

int run_ablate(const std::string &train_path, const std::string &priv, const std::string &test_path,
               const std::string &truth_path, const std::string &pred_prefix, const SharedFlags &flags) {
    const auto settings = flags.settings();
    if (priv.empty()) {
        std::string needing;
        for (auto v : all_variants) {
            if (uses_privileged(v)) {
                needing += (needing.empty() ? "" : ", ") + std::string(to_string(v));
            }
        }
        throw DataError("--priv is required: variants " + needing + " use privileged features");
    }
    const auto train_ds = load_dataset(train_path, std::filesystem::path(priv));
    LoadOptions load;
    load.q = train_ds.q();
    load.min_d = train_ds.d();
    const auto test_ds = load_dataset(test_path, std::nullopt, load);
    const auto truths = truth_path.empty() ? test_ds.labels() : load_label_lists(truth_path, train_ds.q());
    const auto result = run_ablation(train_ds, test_ds, truths, settings);

    std::vector<NamedReport> columns;
    for (const auto &run : result.runs) {
        print("[" + std::string(to_string(run.variant)) + "]\n");
        print(summarize(run.solve) + '\n');
        print(render_key_values(run.report));
        if (!pred_prefix.empty()) {
            write_text(pred_prefix + "." + std::string(short_name(run.variant)) + ".pred.txt",
                       label_list_text(run.predictions));
        }
        columns.push_back(NamedReport{std::string(display_name(run.variant)), run.report});
    }
    print("\n");
    const std::pair<std::string, AblationResult> row{train_path, result};
    std::vector<std::pair<std::string, AblationResult>> rows{row};
    rows.front().first = std::filesystem::path(train_path).filename().string();
    print(render_ablation_table(rows));
    print("\n");
    print(render_per_label_table(columns));
    return ok;
}

int run_gridsearch(const std::string &data, const std::string &priv, const SharedFlags &flags, GridSpec grid) {
    const auto settings = flags.settings();
    const auto ds = load_dataset(data, optional_path(priv));
    const auto result = grid_search(ds, settings, grid);
    print(render_grid(result));
    return ok;
}

int run_synth(const SynthParams &params, const std::string &prefix) {
    const auto data = synth_generate(params);
    const auto files = write_synth(data, params, prefix);
    print("train=" + files.train.string() + '\n');
    print("train_priv=" + files.train_priv.string() + '\n');
    if (data.test) {
        print("test=" + files.test.string() + '\n');
        print("test_priv=" + files.test_priv.string() + '\n');
        print("test_truth=" + files.test_truth.string() + '\n');
    }
    print("manifest=" + files.manifest.string() + '\n');
    return ok;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Multi-label ranking SVM with privileged information"};
    app.require_subcommand(1);

    SharedFlags train_flags;
    std::string train_data, train_priv, train_model_path;
    int log_stride = 0;
    auto *train_cmd = app.add_subcommand("train", "train a model");
    train_cmd->add_option("--data", train_data, "available features + labels")->required();
    train_cmd->add_option("--priv", train_priv, "privileged features, row-aligned with --data");
    train_cmd->add_option("--model", train_model_path, "output model file")->required();
    train_cmd->add_option("--log-stride", log_stride, "log solver progress to stderr every n iterations");
    train_flags.add_to(*train_cmd, true, true);

    std::string predict_model, predict_data, predict_out;
    auto *predict_cmd = app.add_subcommand("predict", "label new instances from available features");
    predict_cmd->add_option("--model", predict_model)->required();
    predict_cmd->add_option("--data", predict_data)->required();
    predict_cmd->add_option("--out", predict_out)->required();

    std::string eval_truth, eval_pred;
    bool eval_per_label = false;
    auto *eval_cmd = app.add_subcommand("evaluate", "score predictions against the truth");
    eval_cmd->add_option("--truth", eval_truth, "truth label lists or a dataset file")->required();
    eval_cmd->add_option("--pred", eval_pred)->required();
    eval_cmd->add_flag("--per-label", eval_per_label);

    SharedFlags ablate_flags;
    std::string ab_train, ab_priv, ab_test, ab_truth, ab_pred_prefix;
    auto *ablate_cmd = app.add_subcommand("ablate", "train and evaluate all four variants");
    ablate_cmd->add_option("--train", ab_train)->required();
    ablate_cmd->add_option("--priv", ab_priv, "privileged features of the training set");
    ablate_cmd->add_option("--test", ab_test)->required();
    ablate_cmd->add_option("--test-truth", ab_truth, "default: labels of the test file");
    ablate_cmd->add_option("--pred-prefix", ab_pred_prefix, "write <prefix>.<variant>.pred.txt per variant");
    ablate_flags.add_to(*ablate_cmd, false, true);

    SharedFlags grid_flags;
    GridSpec grid;
    std::string grid_data, grid_priv;
    auto *grid_cmd = app.add_subcommand("gridsearch", "k-fold cross-validated exhaustive grid");
    grid_cmd->add_option("--data", grid_data)->required();
    grid_cmd->add_option("--priv", grid_priv);
    grid_cmd->add_option("--C", grid.C, "comma-separated list")->delimiter(',');
    grid_cmd->add_option("--Cstar", grid.C_star, "comma-separated list")->delimiter(',');
    grid_cmd->add_option("--D", grid.D, "comma-separated list")->delimiter(',');
    grid_cmd->add_option("--gamma", grid.gamma, "comma-separated list, available-space kernel")->delimiter(',');
    grid_cmd->add_option("--folds", grid.folds)->capture_default_str();
    grid_cmd->add_option("--seed", grid.seed)->capture_default_str();
    grid_flags.add_to(*grid_cmd, true, false);

    SynthParams synth;
    std::string synth_prefix;
    auto *synth_cmd = app.add_subcommand("synth", "generate a paired synthetic dataset");
    synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
    synth_cmd->add_option("--n", synth.n, "training instances")->capture_default_str();
    synth_cmd->add_option("--n-test", synth.n_test, "test instances sharing the teacher")->capture_default_str();
    synth_cmd->add_option("--q", synth.q)->capture_default_str();
    synth_cmd->add_option("--d", synth.d)->capture_default_str();
    synth_cmd->add_option("--sigma", synth.sigma)->capture_default_str();
    synth_cmd->add_option("--sigma-star", synth.sigma_star)->capture_default_str();
    synth_cmd->add_option("--k", synth.k, "labels per instance")->capture_default_str();
    synth_cmd->add_option("--out-prefix", synth_prefix)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (*train_cmd) {
            return run_train(train_data, train_priv, train_flags, log_stride, train_model_path);
        }
        if (*predict_cmd) {
            return run_predict(predict_model, predict_data, predict_out);
        }
        if (*eval_cmd) {
            return run_evaluate(eval_truth, eval_pred, eval_per_label);
        }
        if (*ablate_cmd) {
            return run_ablate(ab_train, ab_priv, ab_test, ab_truth, ab_pred_prefix, ablate_flags);
        }
        if (*grid_cmd) {
            return run_gridsearch(grid_data, grid_priv, grid_flags, grid);
        }
        if (*synth_cmd) {
            return run_synth(synth, synth_prefix);
        }
    } catch (const std::invalid_argument &e) {
        std::cerr << "rankpi: " << e.what() << '\n';
        return usage_error;
    } catch (const DataError &e) {
        std::cerr << "rankpi: " << e.what() << '\n';
        return data_error;
    } catch (const NumericalError &e) {
        std::cerr << "rankpi: " << e.what() << '\n';
        return numerical_error;
    } catch (const std::exception &e) {
        std::cerr << "rankpi: " << e.what() << '\n';
        return data_error;
    }
    return usage_error;
}
