#pragma once

#include "rankpi/data.hpp"
#include "rankpi/kernel.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace rankpi {

/**
 * Training variants of the ablation:
 *  - full:              ranking constraints in both spaces + similarity coupling
 *  - ranking_only:      ranking constraints, available space only (SVM+ML)
 *  - similarity_only:   per-label hinge in both spaces + similarity coupling (SVM+PI)
 *  - binary_relevance:  per-label hinge, available space only (SVM)
 */
enum class Variant { full, ranking_only, similarity_only, binary_relevance };

[[nodiscard]] std::string_view to_string(Variant v) noexcept;
/// Accepts the long tags above and the short CLI names full | ml | pi | br.
[[nodiscard]] Variant parse_variant(std::string_view name);
[[nodiscard]] std::string_view short_name(Variant v) noexcept;
/// Column heading used in ablation tables: SVM, SVM+ML, SVM+PI, Full.
[[nodiscard]] std::string_view display_name(Variant v) noexcept;

[[nodiscard]] constexpr bool uses_privileged(Variant v) noexcept {
    return v == Variant::full || v == Variant::similarity_only;
}
[[nodiscard]] constexpr bool uses_ranking(Variant v) noexcept {
    return v == Variant::full || v == Variant::ranking_only;
}

struct TrainConfig {
    double C = 1.0;
    double C_star = 1.0;
    double D = 1.0;
    double epsilon = 0.1;  ///< similarity tolerance
    double tol = 1e-5;     ///< relative Frank-Wolfe gap
    int max_iter = 10000;
    Variant variant = Variant::full;

    /// Throws std::invalid_argument if a bound is violated.
    void validate() const;

    friend bool operator==(const TrainConfig &, const TrainConfig &) = default;
};

/// n x q blocks of the four multiplier families, column k = label k.
struct DualVariables {
    Eigen::MatrixXd alpha;
    Eigen::MatrixXd alpha_star;
    Eigen::MatrixXd beta_plus;
    Eigen::MatrixXd beta_minus;

    [[nodiscard]] static DualVariables zeros(int n, int q);
    [[nodiscard]] int n() const noexcept { return static_cast<int>(alpha.rows()); }
    [[nodiscard]] int q() const noexcept { return static_cast<int>(alpha.cols()); }
};

/// Same layout as DualVariables; holds partial derivatives of the dual objective.
struct DualGradient {
    Eigen::MatrixXd alpha;
    Eigen::MatrixXd alpha_star;
    Eigen::MatrixXd beta_plus;
    Eigen::MatrixXd beta_minus;
};

/// +1 if k is the pair's present label j, -1 if it is the absent label l, else 0.
[[nodiscard]] constexpr int e_coeff(int j, int l, int k) noexcept {
    if (k == j) {
        return 1;
    }
    if (k == l) {
        return -1;
    }
    return 0;
}

/// Sum of e_coeff over all ranking pairs of one instance: |absent| for present k, -|present| otherwise.
[[nodiscard]] int e_sum(const LabelSet &labels, int k);

/**
 * @brief The dual quadratic program, bias-absorbed.
 * @details Maximizes
 *   -1/2 sum_k (g_k' K g_k + g*_k' K* g*_k) + sum_ik c_ik (alpha_ik + alpha*_ik) - eps sum_ik (beta+_ik + beta-_ik)
 * with g_ik = s_ik alpha_ik - (beta+_ik - beta-_ik), g*_ik = s_ik alpha*_ik + (beta+_ik - beta-_ik),
 * over per-entry boxes for alpha / alpha* and the triangle beta+ + beta- <= D.
 *
 * For the ranking variants s_ik = e_sum(i, k), c_ik = M_ik and the alpha boxes are
 * C / (|Y_i| |Ybar_i|) (zero for degenerate instances). For the hinge variants
 * s_ik = +-1, c_ik = 1 and the boxes are C. Variants without privileged terms
 * pin alpha* and beta to zero; variants without similarity pin beta.
 */
class DualProblem {
  public:
    DualProblem(GramPair gram, std::vector<LabelSet> labels, TrainConfig config);

    [[nodiscard]] int n() const noexcept { return static_cast<int>(labels_.size()); }
    [[nodiscard]] int q() const noexcept { return q_; }
    [[nodiscard]] const GramPair &gram() const noexcept { return gram_; }
    [[nodiscard]] const TrainConfig &config() const noexcept { return config_; }
    [[nodiscard]] Variant variant() const noexcept { return config_.variant; }
    [[nodiscard]] const std::vector<LabelSet> &labels() const noexcept { return labels_; }

    /// M_ik = |Y_i| if k in Y_i else |Ybar_i|.
    [[nodiscard]] const Eigen::MatrixXd &M() const noexcept { return M_; }
    /// Multiplier of alpha_ik (and alpha*_ik) inside g_ik.
    [[nodiscard]] const Eigen::MatrixXd &sign_coeff() const noexcept { return sign_; }
    /// Linear objective coefficient of alpha_ik and alpha*_ik.
    [[nodiscard]] const Eigen::MatrixXd &linear_coeff() const noexcept { return linear_; }
    [[nodiscard]] const Eigen::MatrixXd &alpha_bound() const noexcept { return alpha_ub_; }
    [[nodiscard]] const Eigen::MatrixXd &alpha_star_bound() const noexcept { return alpha_star_ub_; }
    /// D when the variant has similarity coupling, else 0.
    [[nodiscard]] double beta_bound() const noexcept { return beta_ub_; }
    [[nodiscard]] double epsilon() const noexcept { return config_.epsilon; }
    [[nodiscard]] bool uses_privileged() const noexcept { return rankpi::uses_privileged(config_.variant); }

  private:
    GramPair gram_;
    std::vector<LabelSet> labels_;
    TrainConfig config_;
    int q_ = 0;
    Eigen::MatrixXd M_;
    Eigen::MatrixXd sign_;
    Eigen::MatrixXd linear_;
    Eigen::MatrixXd alpha_ub_;
    Eigen::MatrixXd alpha_star_ub_;
    double beta_ub_ = 0.0;
};

/// Expansion coefficients of the available (g) and privileged (g_star) decision functions.
struct Coefficients {
    Eigen::MatrixXd g;
    Eigen::MatrixXd g_star;
};

[[nodiscard]] Coefficients g_vars(const DualProblem &p, const DualVariables &v);
[[nodiscard]] double dual_objective(const DualProblem &p, const DualVariables &v);
[[nodiscard]] DualGradient dual_gradient(const DualProblem &p, const DualVariables &v);

/// Every box / triangle constraint satisfied within @p tol.
[[nodiscard]] bool is_feasible(const DualProblem &p, const DualVariables &v, double tol = 1e-12);

}  // namespace rankpi
