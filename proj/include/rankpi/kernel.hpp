#pragma once

#include "rankpi/data.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>

namespace rankpi {

enum class KernelKind { linear, rbf, polynomial };

[[nodiscard]] std::string_view to_string(KernelKind kind) noexcept;
/// Accepts "linear", "rbf", "poly" / "polynomial".
[[nodiscard]] KernelKind parse_kernel_kind(std::string_view name);

/**
 * @brief A kernel on one feature space.
 * @details With augment_bias the kernel is k(a, b) + 1, which absorbs the
 *          per-label intercept into the expansion weights.
 */
struct KernelSpec {
    KernelKind kind = KernelKind::linear;
    double gamma = 1.0;  ///< rbf width / polynomial scale, > 0
    int degree = 2;      ///< polynomial only, >= 1
    double coef0 = 1.0;  ///< polynomial only
    bool augment_bias = true;

    /// Throws std::invalid_argument when gamma <= 0 or degree < 1.
    void validate() const;

    friend bool operator==(const KernelSpec &, const KernelSpec &) = default;
};

using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;

[[nodiscard]] double kernel_eval(const KernelSpec &spec, const ConstVectorRef &a, const ConstVectorRef &b);

/// Symmetric n x n kernel matrix over the rows of @p rows.
[[nodiscard]] Eigen::MatrixXd gram_matrix(const KernelSpec &spec, const FeatureMatrix &rows);
/// |left| x |right| kernel matrix.
[[nodiscard]] Eigen::MatrixXd cross_kernel(const KernelSpec &spec, const FeatureMatrix &left,
                                           const FeatureMatrix &right);

/// Kernel matrices for the available (K) and privileged (K_star) spaces.
struct GramPair {
    Eigen::MatrixXd K;
    Eigen::MatrixXd K_star;  ///< 0 x 0 when no privileged kernel was requested
    KernelSpec spec;
    std::optional<KernelSpec> spec_star;

    [[nodiscard]] int n() const noexcept { return static_cast<int>(K.rows()); }
    [[nodiscard]] bool has_privileged() const noexcept { return spec_star.has_value(); }
};

/// Throws DataError if a privileged kernel is requested on a dataset with d_star = 0.
[[nodiscard]] GramPair compute_gram(const MultiLabelDataset &ds, const KernelSpec &spec_avail,
                                    const std::optional<KernelSpec> &spec_priv);

/// Median heuristic: 1 / median pairwise squared distance (up to 1000 sampled pairs, fixed seed).
[[nodiscard]] double median_gamma(const FeatureMatrix &features);

/// A kernel choice whose gamma may still be left to the median heuristic.
struct KernelRequest {
    KernelKind kind = KernelKind::linear;
    std::optional<double> gamma;
    int degree = 2;
    double coef0 = 1.0;
    bool augment_bias = true;

    /// rbf without an explicit gamma uses median_gamma(features); polynomial defaults to gamma = 1.
    [[nodiscard]] KernelSpec resolve(const FeatureMatrix &features) const;
};

}  // namespace rankpi
