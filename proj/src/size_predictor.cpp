#include "rankpi/model.hpp"

#include <cmath>
#include <stdexcept>

namespace rankpi {

double LabelSizePredictor::raw(const ConstVectorRef &x) const {
    if (x.size() != weights.size()) {
        throw std::invalid_argument("size predictor: dimension mismatch");
    }
    return weights.dot(x) + intercept;
}

LabelSizePredictor train_size_predictor(const FeatureMatrix &features, std::span<const int> counts, double lambda,
                                        int q) {
    if (features.rows() == 0) {
        throw std::invalid_argument("size predictor needs at least one training instance");
    }
    if (static_cast<std::size_t>(features.rows()) != counts.size()) {
        throw std::invalid_argument("size predictor: counts not aligned with features");
    }
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("ridge lambda must be positive");
    }
    const auto n = features.rows();
    const auto d = features.cols();
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = counts[static_cast<std::size_t>(i)];
    }
    // Centering removes the intercept from the penalized system.
    const Eigen::RowVectorXd x_mean = features.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd Xc = features.rowwise() - x_mean;
    const Eigen::VectorXd yc = y.array() - y_mean;

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(Xc.transpose());
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    gram.diagonal().array() += lambda;

    LabelSizePredictor out;
    out.weights = gram.ldlt().solve(Xc.transpose() * yc);
    out.intercept = y_mean - x_mean.dot(out.weights);
    out.ridge_lambda = lambda;
    out.q = q;
    return out;
}

int round_size(double raw, int q) {
    const double rounded = std::floor(raw + 0.5);
    if (!(rounded >= 1.0)) {
        return 1;
    }
    if (rounded >= q) {
        return q;
    }
    return static_cast<int>(rounded);
}

int predict_size(const LabelSizePredictor &predictor, const ConstVectorRef &x) {
    return round_size(predictor.raw(x), predictor.q);
}

}  // namespace rankpi
