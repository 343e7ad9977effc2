#include "rankpi/kernel.hpp"

#include "rankpi/error.hpp"
#include "rankpi/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankpi {

std::string_view to_string(KernelKind kind) noexcept {
    switch (kind) {
        case KernelKind::linear:
            return "linear";
        case KernelKind::rbf:
            return "rbf";
        case KernelKind::polynomial:
            return "poly";
    }
    return "linear";
}

KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "linear") {
        return KernelKind::linear;
    }
    if (name == "rbf") {
        return KernelKind::rbf;
    }
    if (name == "poly" || name == "polynomial") {
        return KernelKind::polynomial;
    }
    throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("kernel gamma must be positive");
    }
    if (degree < 1) {
        throw std::invalid_argument("polynomial degree must be >= 1");
    }
}

double kernel_eval(const KernelSpec &spec, const ConstVectorRef &a, const ConstVectorRef &b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("kernel_eval: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    double value = 0.0;
    switch (spec.kind) {
        case KernelKind::linear:
            value = a.dot(b);
            break;
        case KernelKind::rbf:
            value = std::exp(-spec.gamma * (a - b).squaredNorm());
            break;
        case KernelKind::polynomial:
            value = std::pow(spec.gamma * a.dot(b) + spec.coef0, spec.degree);
            break;
    }
    return spec.augment_bias ? value + 1.0 : value;
}

Eigen::MatrixXd gram_matrix(const KernelSpec &spec, const FeatureMatrix &rows) {
    spec.validate();
    const auto n = rows.rows();
    Eigen::MatrixXd K(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (Eigen::Index h = r; h < n; ++h) {
            K(r, h) = kernel_eval(spec, rows.row(r).transpose(), rows.row(h).transpose());
        }
    });
    // Only the upper triangle was evaluated; mirroring it is (K + K^T) / 2.
    K.triangularView<Eigen::StrictlyLower>() = K.transpose();
    return K;
}

Eigen::MatrixXd cross_kernel(const KernelSpec &spec, const FeatureMatrix &left, const FeatureMatrix &right) {
    spec.validate();
    Eigen::MatrixXd out(left.rows(), right.rows());
    parallel_for(static_cast<std::size_t>(left.rows()), [&](std::size_t i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (Eigen::Index c = 0; c < right.rows(); ++c) {
            out(r, c) = kernel_eval(spec, left.row(r).transpose(), right.row(c).transpose());
        }
    });
    return out;
}

GramPair compute_gram(const MultiLabelDataset &ds, const KernelSpec &spec_avail,
                      const std::optional<KernelSpec> &spec_priv) {
    GramPair pair;
    pair.spec = spec_avail;
    pair.K = gram_matrix(spec_avail, ds.available());
    if (spec_priv) {
        if (!ds.has_privileged()) {
            throw DataError("privileged Gram matrix requested but the dataset has no privileged features");
        }
        pair.spec_star = spec_priv;
        pair.K_star = gram_matrix(*spec_priv, ds.privileged());
    }
    return pair;
}

double median_gamma(const FeatureMatrix &features) {
    const auto n = features.rows();
    if (n < 2) {
        throw std::invalid_argument("median_gamma needs at least 2 instances");
    }
    constexpr std::size_t max_pairs = 1000;
    const auto all_pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
    std::vector<double> dist;
    if (all_pairs <= max_pairs) {
        dist.reserve(all_pairs);
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index b = a + 1; b < n; ++b) {
                dist.push_back((features.row(a) - features.row(b)).squaredNorm());
            }
        }
    } else {
        std::mt19937_64 rng(0x5eed5eedULL);
        const auto un = static_cast<std::uint64_t>(n);
        dist.reserve(max_pairs);
        while (dist.size() < max_pairs) {
            const auto a = static_cast<Eigen::Index>(rng() % un);
            const auto b = static_cast<Eigen::Index>(rng() % un);
            if (a != b) {
                dist.push_back((features.row(a) - features.row(b)).squaredNorm());
            }
        }
    }
    std::sort(dist.begin(), dist.end());
    const std::size_t m = dist.size();
    const double median = m % 2 == 1 ? dist[m / 2] : 0.5 * (dist[m / 2 - 1] + dist[m / 2]);
    return median > 0.0 ? 1.0 / median : 1.0;
}

KernelSpec KernelRequest::resolve(const FeatureMatrix &features) const {
    KernelSpec spec;
    spec.kind = kind;
    spec.degree = degree;
    spec.coef0 = coef0;
    spec.augment_bias = augment_bias;
    if (gamma) {
        spec.gamma = *gamma;
    } else if (kind == KernelKind::rbf) {
        spec.gamma = median_gamma(features);
    } else {
        spec.gamma = 1.0;
    }
    spec.validate();
    return spec;
}

}  // namespace rankpi
