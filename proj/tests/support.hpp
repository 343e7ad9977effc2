#pragma once
// Shared fixtures for the unit and acceptance tests.

#include "rankpi/data.hpp"
#include "rankpi/dual_problem.hpp"
#include "rankpi/kernel.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace rankpi::testing {

inline LabelSet random_label_set(std::mt19937_64 &rng, int q, bool allow_degenerate = true) {
    for (;;) {
        std::vector<int> present;
        for (int k = 0; k < q; ++k) {
            if (rng() % 2 == 0) {
                present.push_back(k);
            }
        }
        LabelSet set(present, q);
        if (allow_degenerate || !set.degenerate()) {
            return set;
        }
    }
}

inline FeatureMatrix random_features(std::mt19937_64 &rng, int n, int d) {
    std::normal_distribution<double> normal;
    FeatureMatrix X(n, d);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) {
            X(i, c) = normal(rng);
        }
    }
    return X;
}

/// A tiny random dual: n in [n_lo, n_hi], q in [q_lo, q_hi], d = 3, boxes from {0.5, 1, 2}.
struct RandomProblemSpec {
    int n_lo = 3, n_hi = 6;
    int q_lo = 2, q_hi = 3;
    int d = 3;
    bool degenerate_labels = true;
};

struct RandomProblem {
    TrainConfig config;
    DualProblem problem;
};

inline RandomProblem random_problem(std::uint64_t seed, Variant variant, const RandomProblemSpec &spec = {}) {
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    const double boxes[] = {0.5, 1.0, 2.0};
    const int n = pick(spec.n_lo, spec.n_hi);
    const int q = pick(spec.q_lo, spec.q_hi);
    std::vector<LabelSet> labels;
    for (int i = 0; i < n; ++i) {
        labels.push_back(random_label_set(rng, q, spec.degenerate_labels));
    }
    MultiLabelDataset ds(random_features(rng, n, spec.d), random_features(rng, n, spec.d), labels);
    TrainConfig cfg;
    cfg.C = boxes[rng() % 3];
    cfg.C_star = boxes[rng() % 3];
    cfg.D = boxes[rng() % 3];
    cfg.epsilon = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    cfg.variant = variant;
    KernelSpec spec_avail;
    KernelSpec spec_priv;
    if (seed % 2 == 1) {
        spec_avail.kind = KernelKind::rbf;
        spec_avail.gamma = 0.5;
        spec_priv.kind = KernelKind::polynomial;
        spec_priv.gamma = 0.5;
    }
    auto gram = compute_gram(ds, spec_avail, uses_privileged(variant) ? std::optional(spec_priv) : std::nullopt);
    return RandomProblem{cfg, DualProblem(std::move(gram), labels, cfg)};
}

/// Uniform point of the feasible set.
inline DualVariables random_feasible(const DualProblem &p, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto v = DualVariables::zeros(p.n(), p.q());
    for (int k = 0; k < p.q(); ++k) {
        for (int i = 0; i < p.n(); ++i) {
            v.alpha(i, k) = unit(rng) * p.alpha_bound()(i, k);
            v.alpha_star(i, k) = unit(rng) * p.alpha_star_bound()(i, k);
            double a = unit(rng);
            double b = unit(rng);
            if (a + b > 1.0) {
                a = 1.0 - a;
                b = 1.0 - b;
            }
            v.beta_plus(i, k) = a * p.beta_bound();
            v.beta_minus(i, k) = b * p.beta_bound();
        }
    }
    return v;
}

}  // namespace rankpi::testing

namespace rankpi::testing {

/// Cycles through the four variants, two seeds per variant.
inline Variant variant_cycle(std::uint64_t t) {
    constexpr Variant order[] = {Variant::binary_relevance, Variant::ranking_only, Variant::similarity_only,
                                 Variant::full};
    return order[(t / 2) % 4];
}

}  // namespace rankpi::testing
