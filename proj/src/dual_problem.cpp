#include "rankpi/dual_problem.hpp"

#include "rankpi/error.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rankpi {

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::full:
            return "full";
        case Variant::ranking_only:
            return "ranking_only";
        case Variant::similarity_only:
            return "similarity_only";
        case Variant::binary_relevance:
            return "binary_relevance";
    }
    return "full";
}

std::string_view short_name(Variant v) noexcept {
    switch (v) {
        case Variant::full:
            return "full";
        case Variant::ranking_only:
            return "ml";
        case Variant::similarity_only:
            return "pi";
        case Variant::binary_relevance:
            return "br";
    }
    return "full";
}

std::string_view display_name(Variant v) noexcept {
    switch (v) {
        case Variant::full:
            return "Full";
        case Variant::ranking_only:
            return "SVM+ML";
        case Variant::similarity_only:
            return "SVM+PI";
        case Variant::binary_relevance:
            return "SVM";
    }
    return "Full";
}

Variant parse_variant(std::string_view name) {
    for (auto v : {Variant::full, Variant::ranking_only, Variant::similarity_only, Variant::binary_relevance}) {
        if (name == to_string(v) || name == short_name(v)) {
            return v;
        }
    }
    throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    auto nonneg = [](double x) { return x >= 0.0 && std::isfinite(x); };
    if (!positive(C)) {
        throw std::invalid_argument("C must be positive");
    }
    if (!positive(C_star)) {
        throw std::invalid_argument("C* must be positive");
    }
    if (!nonneg(D)) {
        throw std::invalid_argument("D must be non-negative");
    }
    if (!nonneg(epsilon)) {
        throw std::invalid_argument("epsilon must be non-negative");
    }
    if (!positive(tol)) {
        throw std::invalid_argument("tol must be positive");
    }
    if (max_iter < 1) {
        throw std::invalid_argument("max_iter must be positive");
    }
}

DualVariables DualVariables::zeros(int n, int q) {
    const auto z = Eigen::MatrixXd::Zero(n, q);
    return DualVariables{z, z, z, z};
}

int e_sum(const LabelSet &labels, int k) {
    return labels.contains(k) ? labels.absent_size() : -labels.size();
}

DualProblem::DualProblem(GramPair gram, std::vector<LabelSet> labels, TrainConfig config)
    : gram_{std::move(gram)}, labels_{std::move(labels)}, config_{config} {
    config_.validate();
    if (labels_.empty()) {
        throw std::invalid_argument("dual problem needs at least one instance");
    }
    q_ = labels_.front().q();
    const int n = this->n();
    if (gram_.K.rows() != n || gram_.K.cols() != n) {
        throw std::invalid_argument("Gram matrix does not match the instance count");
    }
    if (uses_privileged() && (gram_.K_star.rows() != n || gram_.K_star.cols() != n)) {
        throw std::invalid_argument("variant '" + std::string(to_string(config_.variant)) +
                                    "' needs a privileged Gram matrix of matching size");
    }

    M_.resize(n, q_);
    sign_.resize(n, q_);
    linear_.resize(n, q_);
    alpha_ub_.resize(n, q_);
    alpha_star_ub_.resize(n, q_);
    const bool ranking = uses_ranking(config_.variant);
    const bool privileged = uses_privileged();
    for (int i = 0; i < n; ++i) {
        const auto &y = labels_[static_cast<std::size_t>(i)];
        if (y.q() != q_) {
            throw std::invalid_argument("label sets disagree on q");
        }
        const double pairs = static_cast<double>(y.size()) * y.absent_size();
        for (int k = 0; k < q_; ++k) {
            const bool present = y.contains(k);
            M_(i, k) = present ? y.size() : y.absent_size();
            if (ranking) {
                sign_(i, k) = e_sum(y, k);
                linear_(i, k) = M_(i, k);
                alpha_ub_(i, k) = y.degenerate() ? 0.0 : config_.C / pairs;
                alpha_star_ub_(i, k) = (privileged && !y.degenerate()) ? config_.C_star / pairs : 0.0;
            } else {
                sign_(i, k) = present ? 1.0 : -1.0;
                linear_(i, k) = 1.0;
                alpha_ub_(i, k) = config_.C;
                alpha_star_ub_(i, k) = privileged ? config_.C_star : 0.0;
            }
        }
    }
    beta_ub_ = privileged ? config_.D : 0.0;
}

Coefficients g_vars(const DualProblem &p, const DualVariables &v) {
    const Eigen::MatrixXd bridge = v.beta_plus - v.beta_minus;
    Coefficients c;
    c.g = p.sign_coeff().cwiseProduct(v.alpha) - bridge;
    c.g_star = p.sign_coeff().cwiseProduct(v.alpha_star) + bridge;
    return c;
}

double dual_objective(const DualProblem &p, const DualVariables &v) {
    const auto [g, g_star] = g_vars(p, v);
    double quad = g.cwiseProduct(p.gram().K * g).sum();
    if (p.uses_privileged()) {
        quad += g_star.cwiseProduct(p.gram().K_star * g_star).sum();
    }
    const double linear = p.linear_coeff().cwiseProduct(v.alpha + v.alpha_star).sum();
    const double similarity = p.epsilon() * (v.beta_plus + v.beta_minus).sum();
    return -0.5 * quad + linear - similarity;
}

DualGradient dual_gradient(const DualProblem &p, const DualVariables &v) {
    const auto [g, g_star] = g_vars(p, v);
    const Eigen::MatrixXd s = p.gram().K * g;
    const Eigen::MatrixXd s_star =
        p.uses_privileged() ? Eigen::MatrixXd(p.gram().K_star * g_star) : Eigen::MatrixXd::Zero(p.n(), p.q());
    DualGradient grad;
    grad.alpha = p.linear_coeff() - p.sign_coeff().cwiseProduct(s);
    grad.alpha_star = p.linear_coeff() - p.sign_coeff().cwiseProduct(s_star);
    const Eigen::MatrixXd diff = s - s_star;
    grad.beta_plus = diff.array() - p.epsilon();
    grad.beta_minus = -diff.array() - p.epsilon();
    return grad;
}

bool is_feasible(const DualProblem &p, const DualVariables &v, double tol) {
    if (v.n() != p.n() || v.q() != p.q()) {
        return false;
    }
    const double D = p.beta_bound();
    for (int k = 0; k < p.q(); ++k) {
        for (int i = 0; i < p.n(); ++i) {
            const double a = v.alpha(i, k);
            const double as = v.alpha_star(i, k);
            const double bp = v.beta_plus(i, k);
            const double bm = v.beta_minus(i, k);
            if (a < -tol || a > p.alpha_bound()(i, k) + tol) {
                return false;
            }
            if (as < -tol || as > p.alpha_star_bound()(i, k) + tol) {
                return false;
            }
            if (bp < -tol || bm < -tol || bp + bm > D + tol) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace rankpi
