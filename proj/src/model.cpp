#include "rankpi/model.hpp"

#include "rankpi/error.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rankpi {

namespace {
constexpr double support_threshold = 1e-10;
}

Eigen::VectorXd decision_values(const TrainedModel &m, const ConstVectorRef &x) {
    if (x.size() != m.d()) {
        throw std::invalid_argument("decision_values: expected " + std::to_string(m.d()) + " features, got " +
                                    std::to_string(x.size()));
    }
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(m.q);
    for (int i = 0; i < m.support_count(); ++i) {
        const double kv = kernel_eval(m.kernel, m.support.row(i).transpose(), x);
        scores += kv * m.g.row(i).transpose();
    }
    return scores;
}

Eigen::MatrixXd decision_values_rows(const TrainedModel &m, const FeatureMatrix &X) {
    if (X.cols() != m.d()) {
        throw std::invalid_argument("decision_values: expected " + std::to_string(m.d()) + " features, got " +
                                    std::to_string(X.cols()));
    }
    if (m.support_count() == 0) {
        return Eigen::MatrixXd::Zero(X.rows(), m.q);
    }
    return cross_kernel(m.kernel, X, m.support) * m.g;
}

LabelSet top_labels(const ConstVectorRef &scores, int psi) {
    const int q = static_cast<int>(scores.size());
    std::vector<int> order(static_cast<std::size_t>(q));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores(a) > scores(b); });
    order.resize(static_cast<std::size_t>(std::clamp(psi, 0, q)));
    return LabelSet(std::move(order), q);
}

LabelSet predict(const TrainedModel &m, const ConstVectorRef &x) {
    return top_labels(decision_values(m, x), predict_size(m.size_predictor, x));
}

std::vector<LabelSet> predict_rows(const TrainedModel &m, const FeatureMatrix &X) {
    const Eigen::MatrixXd scores = decision_values_rows(m, X);
    std::vector<LabelSet> out;
    out.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        const int psi = predict_size(m.size_predictor, X.row(r).transpose());
        out.push_back(top_labels(scores.row(r).transpose(), psi));
    }
    return out;
}

double SlackReport::max_slack() const {
    double worst = 0.0;
    for (double s : ranking_slacks) {
        worst = std::max(worst, s);
    }
    for (double s : ranking_slacks_star) {
        worst = std::max(worst, s);
    }
    if (similarity_slacks.size() > 0) {
        worst = std::max(worst, similarity_slacks.maxCoeff());
    }
    return worst;
}

SlackReport slack_report(const DualProblem &p, const Coefficients &coeffs) {
    const auto &cfg = p.config();
    const bool privileged = p.uses_privileged();
    const Eigen::MatrixXd f = p.gram().K * coeffs.g;
    Eigen::MatrixXd f_star;
    double regularizer = coeffs.g.cwiseProduct(f).sum();
    if (privileged) {
        f_star = p.gram().K_star * coeffs.g_star;
        regularizer += coeffs.g_star.cwiseProduct(f_star).sum();
    }

    SlackReport report;
    double ranking_loss = 0.0;
    double ranking_loss_star = 0.0;
    for (int i = 0; i < p.n(); ++i) {
        const auto &y = p.labels()[static_cast<std::size_t>(i)];
        if (y.degenerate()) {
            continue;
        }
        const double weight = 1.0 / (static_cast<double>(y.size()) * y.absent_size());
        for (const auto &pair : ranking_pairs(y, i)) {
            const double xi = std::max(0.0, 1.0 - (f(i, pair.j) - f(i, pair.l)));
            report.pairs.push_back(pair);
            report.ranking_slacks.push_back(xi);
            ranking_loss += weight * xi;
            if (privileged) {
                const double xi_star = std::max(0.0, 1.0 - (f_star(i, pair.j) - f_star(i, pair.l)));
                report.ranking_slacks_star.push_back(xi_star);
                ranking_loss_star += weight * xi_star;
            }
        }
    }
    double similarity_loss = 0.0;
    if (privileged) {
        report.similarity_slacks = ((f - f_star).cwiseAbs().array() - cfg.epsilon).cwiseMax(0.0).matrix();
        similarity_loss = report.similarity_slacks.sum();
    }
    report.primal_objective = 0.5 * regularizer + cfg.C * ranking_loss;
    if (privileged) {
        report.primal_objective += cfg.C_star * ranking_loss_star + cfg.D * similarity_loss;
    }
    return report;
}

TrainResult train(const MultiLabelDataset &ds, const TrainConfig &cfg, const KernelSpec &kernel,
                  const std::optional<KernelSpec> &privileged_kernel, const TrainOptions &options) {
    cfg.validate();
    kernel.validate();
    const bool privileged = uses_privileged(cfg.variant);
    if (privileged && !ds.has_privileged()) {
        throw DataError("variant '" + std::string(to_string(cfg.variant)) + "' requires privileged features");
    }
    if (privileged && !privileged_kernel) {
        throw std::invalid_argument("variant '" + std::string(to_string(cfg.variant)) +
                                    "' requires a privileged kernel");
    }
    const std::optional<KernelSpec> priv_spec = privileged ? privileged_kernel : std::nullopt;

    const DualProblem problem(compute_gram(ds, kernel, priv_spec), ds.labels(), cfg);
    auto solved = solve(problem, cfg, options.solve);
    const auto coeffs = g_vars(problem, solved.variables);

    TrainResult result;
    auto &m = result.model;
    m.variant = cfg.variant;
    m.q = ds.q();
    m.kernel = kernel;
    m.privileged_kernel = priv_spec;
    m.train_config = cfg;

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < coeffs.g.rows(); ++i) {
        if (coeffs.g.row(i).cwiseAbs().maxCoeff() > support_threshold) {
            keep.push_back(i);
        }
    }
    m.g.resize(static_cast<Eigen::Index>(keep.size()), ds.q());
    m.support.resize(static_cast<Eigen::Index>(keep.size()), ds.d());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        m.g.row(static_cast<Eigen::Index>(r)) = coeffs.g.row(keep[r]);
        m.support.row(static_cast<Eigen::Index>(r)) = ds.available().row(keep[r]);
    }

    std::vector<int> counts;
    counts.reserve(static_cast<std::size_t>(ds.n()));
    for (const auto &y : ds.labels()) {
        counts.push_back(y.size());
    }
    m.size_predictor = train_size_predictor(ds.available(), counts, options.ridge_lambda, ds.q());

    result.slacks = slack_report(problem, coeffs);
    result.report = std::move(solved.report);
    return result;
}

}  // namespace rankpi
