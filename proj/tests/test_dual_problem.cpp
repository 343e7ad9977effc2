#include "rankpi/dual_problem.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace rankpi;
using testing::random_feasible;
using testing::random_problem;

namespace {

GramPair identity_gram(int n, bool privileged) {
    GramPair g;
    g.K = Eigen::MatrixXd::Identity(n, n);
    if (privileged) {
        g.K_star = Eigen::MatrixXd::Identity(n, n);
        g.spec_star = KernelSpec{};
    }
    return g;
}

TrainConfig config(Variant v, double C = 1.0, double C_star = 1.0, double D = 1.0, double eps = 0.1) {
    TrainConfig cfg;
    cfg.C = C;
    cfg.C_star = C_star;
    cfg.D = D;
    cfg.epsilon = eps;
    cfg.variant = v;
    return cfg;
}

}  // namespace

TEST_CASE("e_coeff and e_sum") {
    CHECK(e_coeff(2, 5, 2) == 1);
    CHECK(e_coeff(2, 5, 5) == -1);
    CHECK(e_coeff(2, 5, 3) == 0);
    const LabelSet y({0, 1}, 3);
    CHECK(e_sum(y, 0) == 1);
    CHECK(e_sum(y, 2) == -2);
    for (int k = 0; k < 3; ++k) {
        CHECK(e_sum(LabelSet({}, 3), k) == 0);
        CHECK(e_sum(LabelSet({0, 1, 2}, 3), k) == 0);
    }
}

TEST_CASE("variant names") {
    for (auto v : {Variant::full, Variant::ranking_only, Variant::similarity_only, Variant::binary_relevance}) {
        CHECK(parse_variant(to_string(v)) == v);
        CHECK(parse_variant(short_name(v)) == v);
    }
    CHECK(parse_variant("ml") == Variant::ranking_only);
    CHECK(parse_variant("pi") == Variant::similarity_only);
    CHECK(parse_variant("br") == Variant::binary_relevance);
    CHECK_THROWS_AS((void)parse_variant("svm+"), std::invalid_argument);
    CHECK(uses_privileged(Variant::full));
    CHECK(uses_privileged(Variant::similarity_only));
    CHECK_FALSE(uses_privileged(Variant::ranking_only));
    CHECK(uses_ranking(Variant::ranking_only));
    CHECK_FALSE(uses_ranking(Variant::binary_relevance));
}

TEST_CASE("train config bounds") {
    CHECK_NOTHROW(config(Variant::full).validate());
    CHECK_THROWS_AS(config(Variant::full, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(Variant::full, 1.0, -1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(Variant::full, 1.0, 1.0, -0.1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(Variant::full, 1.0, 1.0, 1.0, -0.1).validate(), std::invalid_argument);
    CHECK_NOTHROW(config(Variant::full, 1.0, 1.0, 0.0, 0.0).validate());
    auto cfg = config(Variant::full);
    cfg.tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = config(Variant::full);
    cfg.max_iter = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("coefficients and boxes per variant") {
    const std::vector<LabelSet> labels{LabelSet({0, 1}, 3), LabelSet({}, 3), LabelSet({2}, 3)};
    const DualProblem full(identity_gram(3, true), labels, config(Variant::full, 2.0, 4.0, 0.5));
    CHECK(full.M()(0, 0) == 2);
    CHECK(full.M()(0, 2) == 1);
    CHECK(full.M()(2, 2) == 1);
    CHECK(full.M()(2, 0) == 2);
    CHECK(full.M()(1, 0) == 3);  // every label absent
    CHECK(full.sign_coeff()(0, 0) == 1);
    CHECK(full.sign_coeff()(0, 2) == -2);
    CHECK(full.linear_coeff()(0, 0) == full.M()(0, 0));
    CHECK(full.alpha_bound()(0, 1) == doctest::Approx(2.0 / 2.0));
    CHECK(full.alpha_star_bound()(2, 0) == doctest::Approx(4.0 / 2.0));
    CHECK(full.alpha_bound()(1, 0) == 0.0);
    CHECK(full.alpha_star_bound()(1, 2) == 0.0);
    CHECK(full.beta_bound() == 0.5);

    const DualProblem ml(identity_gram(3, false), labels, config(Variant::ranking_only, 2.0, 4.0, 0.5));
    CHECK(ml.alpha_star_bound().isZero());
    CHECK(ml.beta_bound() == 0.0);
    CHECK_FALSE(ml.uses_privileged());

    const DualProblem pi(identity_gram(3, true), labels, config(Variant::similarity_only, 2.0, 4.0, 0.5));
    CHECK(pi.sign_coeff()(0, 0) == 1);
    CHECK(pi.sign_coeff()(0, 2) == -1);
    CHECK(pi.sign_coeff()(1, 0) == -1);  // hinge variants keep empty-label instances as negatives
    CHECK(pi.linear_coeff()(1, 0) == 1);
    CHECK(pi.alpha_bound()(1, 0) == 2.0);
    CHECK(pi.alpha_star_bound()(1, 0) == 4.0);
    CHECK(pi.beta_bound() == 0.5);

    const DualProblem br(identity_gram(3, false), labels, config(Variant::binary_relevance, 2.0));
    CHECK(br.alpha_bound()(0, 2) == 2.0);
    CHECK(br.alpha_star_bound().isZero());
    CHECK(br.beta_bound() == 0.0);
}

TEST_CASE("g_vars examples") {
    const std::vector<LabelSet> labels{LabelSet({0}, 3), LabelSet({1, 2}, 3)};
    const DualProblem p(identity_gram(2, true), labels, config(Variant::full));
    auto v = DualVariables::zeros(2, 3);
    auto [g0, gs0] = g_vars(p, v);
    CHECK(g0.isZero());
    CHECK(gs0.isZero());

    // Instance 0, label 0: e_sum = |absent| = 2.
    REQUIRE(p.sign_coeff()(0, 0) == 2);
    v.alpha(0, 0) = 0.5;
    v.beta_plus(0, 0) = 0.1;
    CHECK(g_vars(p, v).g(0, 0) == doctest::Approx(0.9));

    auto beta_only = DualVariables::zeros(2, 3);
    beta_only.beta_plus(1, 2) = 0.3;
    beta_only.beta_minus(0, 1) = 0.2;
    const auto [g, gs] = g_vars(p, beta_only);
    CHECK((g + gs).isZero());
    CHECK(g(1, 2) == doctest::Approx(-0.3));
    CHECK(gs(0, 1) == doctest::Approx(-0.2));
}

TEST_CASE("dual objective examples") {
    const DualProblem zero(identity_gram(2, true), {LabelSet({0}, 2), LabelSet({1}, 2)}, config(Variant::full));
    CHECK(dual_objective(zero, DualVariables::zeros(2, 2)) == 0.0);

    // n=1, q=2, Y={0}, K=K*=[[1]]: alpha = a on both labels gives 2a - a^2.
    const DualProblem p(identity_gram(1, true), {LabelSet({0}, 2)}, config(Variant::full));
    for (double a : {0.0, 0.25, 0.5, 1.0}) {
        auto v = DualVariables::zeros(1, 2);
        v.alpha.setConstant(a);
        CHECK(dual_objective(p, v) == doctest::Approx(2 * a - a * a).epsilon(1e-15));
    }

    // Epsilon enters linearly through the betas.
    auto v = DualVariables::zeros(1, 2);
    v.beta_plus(0, 1) = 0.4;
    CHECK(dual_objective(p, v) == doctest::Approx(-0.5 * (0.16 + 0.16) - 0.1 * 0.4));
}

TEST_CASE("D = 0 separates the two spaces") {
    std::mt19937_64 rng(7);
    for (std::uint64_t t = 0; t < 10; ++t) {
        auto [cfg, p_any] = random_problem(50 + t, Variant::full);
        cfg.D = 0.0;
        const DualProblem p(p_any.gram(), p_any.labels(), cfg);
        const auto v = random_feasible(p, rng);
        CHECK(v.beta_plus.isZero());
        auto avail_only = v;
        avail_only.alpha_star.setZero();
        auto priv_only = v;
        priv_only.alpha.setZero();
        CHECK(dual_objective(p, v) ==
              doctest::Approx(dual_objective(p, avail_only) + dual_objective(p, priv_only)).epsilon(1e-12));
    }
}

TEST_CASE("dual gradient examples and finite differences") {
    std::mt19937_64 rng(9);
    for (std::uint64_t t = 0; t < 20; ++t) {
        const auto [cfg, p] = random_problem(100 + t, testing::variant_cycle(t));
        const auto g0 = dual_gradient(p, DualVariables::zeros(p.n(), p.q()));
        CHECK(g0.alpha == p.linear_coeff());
        CHECK(g0.alpha_star == p.linear_coeff());
        CHECK((g0.beta_plus.array() == -p.epsilon()).all());
        CHECK((g0.beta_minus.array() == -p.epsilon()).all());

        const auto v = random_feasible(p, rng);
        const auto grad = dual_gradient(p, v);
        constexpr double h = 1e-6;
        auto check = [&](Eigen::MatrixXd DualVariables::*field, const Eigen::MatrixXd &analytic) {
            for (int k = 0; k < p.q(); ++k) {
                for (int i = 0; i < p.n(); ++i) {
                    auto up = v;
                    auto down = v;
                    (up.*field)(i, k) += h;
                    (down.*field)(i, k) -= h;
                    const double fd = (dual_objective(p, up) - dual_objective(p, down)) / (2 * h);
                    CHECK(std::abs(fd - analytic(i, k)) <= 1e-5 * std::max(1.0, std::abs(analytic(i, k))));
                }
            }
        };
        check(&DualVariables::alpha, grad.alpha);
        check(&DualVariables::alpha_star, grad.alpha_star);
        check(&DualVariables::beta_plus, grad.beta_plus);
        check(&DualVariables::beta_minus, grad.beta_minus);
    }
}

TEST_CASE("symmetric spaces give vanishing beta gradients") {
    const std::vector<LabelSet> labels{LabelSet({0}, 2), LabelSet({1}, 2), LabelSet({0}, 2)};
    GramPair g;
    g.K = Eigen::MatrixXd::Constant(3, 3, 0.5) + Eigen::MatrixXd::Identity(3, 3);
    g.K_star = g.K;
    g.spec_star = KernelSpec{};
    const DualProblem p(g, labels, config(Variant::full, 1.0, 1.0, 1.0, 0.0));
    auto v = DualVariables::zeros(3, 2);
    v.alpha << 0.1, 0.2, 0.3, 0.05, 0.15, 0.25;
    v.alpha_star = v.alpha;
    const auto grad = dual_gradient(p, v);
    CHECK(grad.beta_plus.cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(grad.beta_minus.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("dual objective is concave along random chords") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::uint64_t t = 0; t < 30; ++t) {
        const auto [cfg, p] = random_problem(200 + t, testing::variant_cycle(t));
        const auto u = random_feasible(p, rng);
        const auto w = random_feasible(p, rng);
        const double s = unit(rng);
        const DualVariables mix{s * u.alpha + (1 - s) * w.alpha, s * u.alpha_star + (1 - s) * w.alpha_star,
                                s * u.beta_plus + (1 - s) * w.beta_plus, s * u.beta_minus + (1 - s) * w.beta_minus};
        CHECK(is_feasible(p, mix));
        CHECK(dual_objective(p, mix) >= s * dual_objective(p, u) + (1 - s) * dual_objective(p, w) - 1e-9);
    }
}

TEST_CASE("dual objective is invariant under instance permutation") {
    std::mt19937_64 rng(15);
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto [cfg, p] = random_problem(300 + t, Variant::full);
        const auto v = random_feasible(p, rng);
        std::vector<int> perm(static_cast<std::size_t>(p.n()));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::PermutationMatrix<Eigen::Dynamic> P(p.n());
        for (int i = 0; i < p.n(); ++i) {
            P.indices()(i) = perm[static_cast<std::size_t>(i)];
        }
        GramPair g = p.gram();
        g.K = P * g.K * P.transpose();
        g.K_star = P * g.K_star * P.transpose();
        std::vector<LabelSet> labels(p.labels());
        for (int i = 0; i < p.n(); ++i) {
            labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = p.labels()[static_cast<std::size_t>(i)];
        }
        const DualProblem permuted(g, labels, cfg);
        const DualVariables pv{P * v.alpha, P * v.alpha_star, P * v.beta_plus, P * v.beta_minus};
        CHECK(dual_objective(permuted, pv) == doctest::Approx(dual_objective(p, v)).epsilon(1e-12));
    }
}

TEST_CASE("feasibility check") {
    const auto [cfg, p] = random_problem(400, Variant::full);
    auto v = DualVariables::zeros(p.n(), p.q());
    CHECK(is_feasible(p, v));
    v.beta_plus(0, 0) = p.beta_bound();
    v.beta_minus(0, 0) = 1e-9;
    CHECK_FALSE(is_feasible(p, v));
    v.beta_minus(0, 0) = 0.0;
    v.alpha(0, 0) = -1e-9;
    CHECK_FALSE(is_feasible(p, v));
}
