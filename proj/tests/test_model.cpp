#include "rankpi/error.hpp"
#include "rankpi/experiment.hpp"
#include "rankpi/model.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace rankpi;

namespace {

KernelSpec linear_bias() { return KernelSpec{}; }

TrainedModel hand_model() {
    TrainedModel m;
    m.q = 2;
    m.variant = Variant::ranking_only;
    m.g = Eigen::MatrixXd(1, 2);
    m.g << 1.0, -1.0;
    m.support = FeatureMatrix(1, 2);
    m.support << 1.0, 0.0;
    m.size_predictor.weights = Eigen::VectorXd::Zero(2);
    m.size_predictor.intercept = 1.0;
    m.size_predictor.q = 2;
    return m;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    std::copy(v.begin(), v.end(), out.data());
    return out;
}

}  // namespace

TEST_CASE("decision values") {
    auto m = hand_model();
    const auto s = decision_values(m, vec({1.0, 0.0}));
    CHECK(s(0) == 2.0);
    CHECK(s(1) == -2.0);
    m.g.setZero();
    CHECK(decision_values(m, vec({0.3, 0.7})).isZero());
    CHECK_THROWS_AS((void)decision_values(m, vec({1.0})), std::invalid_argument);

    // Term-by-term re-expansion oracle.
    std::mt19937_64 rng(4);
    TrainedModel r;
    r.q = 3;
    r.kernel.kind = KernelKind::rbf;
    r.kernel.gamma = 0.6;
    r.support = testing::random_features(rng, 6, 3);
    r.g = testing::random_features(rng, 6, 3);
    const auto X = testing::random_features(rng, 10, 3);
    const auto batch = decision_values_rows(r, X);
    for (int t = 0; t < 10; ++t) {
        const auto single = decision_values(r, X.row(t).transpose());
        for (int k = 0; k < 3; ++k) {
            double sum = 0.0;
            for (int i = 0; i < 6; ++i) {
                const double d2 = (r.support.row(i) - X.row(t)).squaredNorm();
                sum += r.g(i, k) * (std::exp(-0.6 * d2) + 1.0);
            }
            CHECK(single(k) == doctest::Approx(sum).epsilon(1e-13));
            CHECK(batch(t, k) == doctest::Approx(sum).epsilon(1e-13));
        }
    }
}

TEST_CASE("size predictor") {
    CHECK(round_size(2.5, 5) == 3);
    CHECK(round_size(2.49, 5) == 2);
    CHECK(round_size(-0.7, 5) == 1);
    CHECK(round_size(9.2, 5) == 5);

    std::mt19937_64 rng(6);
    const auto X = testing::random_features(rng, 30, 3);
    const std::vector<int> constant(30, 2);
    const auto flat = train_size_predictor(X, constant, 1.0, 4);
    CHECK(flat.weights.norm() <= 1e-12);
    CHECK(flat.intercept == doctest::Approx(2.0));
    for (int i = 0; i < 30; ++i) {
        CHECK(predict_size(flat, X.row(i).transpose()) == 2);
    }

    // Counts linear in feature 0 are fitted almost exactly with a tiny penalty.
    FeatureMatrix line(8, 2);
    std::vector<int> counts;
    for (int i = 0; i < 8; ++i) {
        line(i, 0) = i;
        line(i, 1) = std::sin(i);
        counts.push_back(1 + i);
    }
    const auto fit = train_size_predictor(line, counts, 1e-8, 10);
    for (int i = 0; i < 8; ++i) {
        CHECK(std::abs(fit.raw(line.row(i).transpose()) - counts[static_cast<std::size_t>(i)]) < 1e-6);
    }

    // Gradient-descent oracle on the same objective.
    std::vector<int> noisy;
    for (int i = 0; i < 30; ++i) {
        noisy.push_back(1 + static_cast<int>(rng() % 4));
    }
    const double lambda = 1.5;
    const auto closed = train_size_predictor(X, noisy, lambda, 5);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(3);
    double b = 0.0;
    const Eigen::MatrixXd Xd = X;
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i) {
        y(i) = noisy[static_cast<std::size_t>(i)];
    }
    const double lr = 1.0 / (2.0 * (Xd.squaredNorm() + 30 + lambda));
    for (int it = 0; it < 200000; ++it) {
        const Eigen::VectorXd r = Xd * w + Eigen::VectorXd::Constant(30, b) - y;
        w -= lr * (2.0 * Xd.transpose() * r + 2.0 * lambda * w);
        b -= lr * 2.0 * r.sum();
    }
    CHECK((closed.weights - w).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(closed.intercept - b) < 1e-6);

    CHECK_THROWS_AS((void)train_size_predictor(FeatureMatrix(0, 3), {}, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)train_size_predictor(X, std::vector<int>(5, 1), 1.0, 3), std::invalid_argument);
}

TEST_CASE("top labels and prediction") {
    CHECK(top_labels(vec({0.9, 0.1, 0.5}), 2) == LabelSet({0, 2}, 3));
    CHECK(top_labels(vec({0.3, 0.3, 0.3}), 2) == LabelSet({0, 1}, 3));
    CHECK(top_labels(vec({0.3, -1.0, 7.0}), 3) == LabelSet({0, 1, 2}, 3));

    std::mt19937_64 rng(8);
    TrainedModel m;
    m.q = 4;
    m.support = testing::random_features(rng, 5, 3);
    m.g = testing::random_features(rng, 5, 4);
    m.size_predictor.weights = Eigen::VectorXd::Ones(3);
    m.size_predictor.intercept = 2.0;
    m.size_predictor.q = 4;
    auto shifted = m;
    shifted.g.row(0).array() += 10.0;  // adds 10 * k(sv_0, x) to every score: a per-input translation
    const auto X = testing::random_features(rng, 50, 3);
    const auto preds = predict_rows(m, X);
    for (int t = 0; t < 50; ++t) {
        const Eigen::VectorXd x = X.row(t).transpose();
        CHECK(preds[static_cast<std::size_t>(t)].size() == predict_size(m.size_predictor, x));
        CHECK(predict(m, x) == preds[static_cast<std::size_t>(t)]);
        const Eigen::VectorXd s = decision_values(m, x);
        CHECK(top_labels(s.array() + 3.5, predict_size(m.size_predictor, x)) == preds[static_cast<std::size_t>(t)]);
    }
}

TEST_CASE("training all variants") {
    SynthParams sp;
    sp.seed = 3;
    sp.n = 40;
    sp.n_test = 30;
    sp.q = 4;
    sp.d = 4;
    const auto data = synth_generate(sp);
    TrainConfig cfg;
    cfg.max_iter = 2000;
    const auto kernel = KernelRequest{KernelKind::rbf}.resolve(data.train.available());
    const auto priv = KernelRequest{KernelKind::linear}.resolve(data.train.privileged());
    for (auto v : all_variants) {
        cfg.variant = v;
        const auto r = train(data.train, cfg, kernel, priv);
        CHECK(r.model.variant == v);
        CHECK(r.model.q == 4);
        CHECK(r.model.g.rows() == r.model.support.rows());
        CHECK(r.model.support_count() > 0);
        CHECK(r.model.privileged_kernel.has_value() == uses_privileged(v));
        CHECK(std::isfinite(r.slacks.primal_objective));
        CHECK(r.slacks.primal_objective >= 0.0);
        for (double s : r.slacks.ranking_slacks) {
            CHECK(s >= 0.0);
        }
        CHECK((r.slacks.similarity_slacks.array() >= 0.0).all());
        CHECK(r.slacks.ranking_slacks_star.empty() == !uses_privileged(v));
        CHECK(predict_rows(r.model, data.test->available()).size() == 30);
    }

    // Ranking-only needs no privileged data at all.
    cfg.variant = Variant::ranking_only;
    CHECK_NOTHROW((void)train(data.train.without_privileged(), cfg, kernel, std::nullopt));
    cfg.variant = Variant::full;
    CHECK_THROWS_AS((void)train(data.train.without_privileged(), cfg, kernel, priv), DataError);
}

TEST_CASE("D = 0 makes full and ranking-only scores coincide") {
    SynthParams sp;
    sp.seed = 12;
    sp.n = 50;
    sp.n_test = 100;
    const auto data = synth_generate(sp);
    TrainConfig cfg;
    cfg.D = 0.0;
    cfg.max_iter = 3000;
    const auto kernel = KernelRequest{KernelKind::linear}.resolve(data.train.available());
    cfg.variant = Variant::full;
    const auto full = train(data.train, cfg, kernel, kernel);
    cfg.variant = Variant::ranking_only;
    const auto ml = train(data.train, cfg, kernel, std::nullopt);
    CHECK((decision_values_rows(full.model, data.test->available()) - decision_values_rows(ml.model, data.test->available()))
              .cwiseAbs()
              .maxCoeff() <= 1e-6);
}

TEST_CASE("separable hinge data: slacks vanish and the primal matches the dual") {
    // Label 0 iff x > 0, label 1 otherwise; wide margin.
    FeatureMatrix x(6, 1);
    x << -3, -2, -1.5, 1.5, 2, 3;
    std::vector<LabelSet> labels;
    for (int i = 0; i < 6; ++i) {
        labels.emplace_back(std::vector<int>{x(i, 0) > 0 ? 0 : 1}, 2);
    }
    const MultiLabelDataset ds(x, FeatureMatrix(0, 0), labels);
    TrainConfig cfg;
    cfg.variant = Variant::binary_relevance;
    cfg.C = 100.0;
    cfg.tol = 1e-10;
    cfg.max_iter = 200000;
    const auto r = train(ds, cfg, linear_bias(), std::nullopt);
    CHECK(r.slacks.max_slack() <= 1e-3);
    CHECK(r.slacks.primal_objective == doctest::Approx(r.report.final_objective).epsilon(1e-3));
}

TEST_CASE("noiseless privileged features give near-zero privileged slacks") {
    SynthParams sp;
    sp.seed = 21;
    sp.n = 60;
    sp.q = 2;  // top-1 of two labels is a single hyperplane in x*, so every draw is separable
    sp.d = 3;
    sp.k = 1;
    sp.sigma_star = 0.0;
    const auto data = synth_generate(sp);
    TrainConfig cfg;
    cfg.C_star = 1000.0;
    cfg.D = 1e-3;
    cfg.tol = 1e-8;
    cfg.max_iter = 100000;
    const auto kernel = KernelRequest{KernelKind::linear}.resolve(data.train.available());
    const auto r = train(data.train, cfg, kernel, kernel);
    REQUIRE_FALSE(r.slacks.ranking_slacks_star.empty());
    const double worst = *std::max_element(r.slacks.ranking_slacks_star.begin(), r.slacks.ranking_slacks_star.end());
    CHECK(worst <= 0.05);
}
