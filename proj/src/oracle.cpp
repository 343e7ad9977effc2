#include "rankpi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rankpi::oracle {

namespace {

/// Hessian and linear term of label k's block over z = [alpha; alpha*; beta+; beta-].
struct QpBlock {
    Eigen::MatrixXd hessian;
    Eigen::VectorXd linear;
};

QpBlock assemble(const DualProblem &p, int k) {
    const int n = p.n();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 4 * n);
    for (int i = 0; i < n; ++i) {
        const double s = p.sign_coeff()(i, k);
        A(i, i) = s;
        A(i, 2 * n + i) = -1.0;
        A(i, 3 * n + i) = 1.0;
        A(n + i, n + i) = s;
        A(n + i, 2 * n + i) = 1.0;
        A(n + i, 3 * n + i) = -1.0;
    }
    Eigen::MatrixXd kernels = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    kernels.topLeftCorner(n, n) = p.gram().K;
    if (p.uses_privileged()) {
        kernels.bottomRightCorner(n, n) = p.gram().K_star;
    }
    QpBlock block;
    block.hessian = -A.transpose() * kernels * A;
    block.linear.resize(4 * n);
    block.linear.segment(0, n) = p.linear_coeff().col(k);
    block.linear.segment(n, n) = p.linear_coeff().col(k);
    block.linear.segment(2 * n, 2 * n).setConstant(-p.epsilon());
    return block;
}

Eigen::VectorXd pack(const DualVariables &v, int k) {
    const auto n = v.alpha.rows();
    Eigen::VectorXd z(4 * n);
    z << v.alpha.col(k), v.alpha_star.col(k), v.beta_plus.col(k), v.beta_minus.col(k);
    return z;
}

void unpack(const Eigen::VectorXd &z, int k, DualVariables &v) {
    const auto n = v.alpha.rows();
    v.alpha.col(k) = z.segment(0, n);
    v.alpha_star.col(k) = z.segment(n, n);
    v.beta_plus.col(k) = z.segment(2 * n, n);
    v.beta_minus.col(k) = z.segment(3 * n, n);
}

double quadratic_value(const std::vector<QpBlock> &blocks, const std::vector<Eigen::VectorXd> &z) {
    double value = 0.0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        value += blocks[k].linear.dot(z[k]) + 0.5 * z[k].dot(blocks[k].hessian * z[k]);
    }
    return value;
}

DualVariables to_variables(const DualProblem &p, const std::vector<Eigen::VectorXd> &z) {
    auto v = DualVariables::zeros(p.n(), p.q());
    for (int k = 0; k < p.q(); ++k) {
        unpack(z[static_cast<std::size_t>(k)], k, v);
    }
    return v;
}

DualGradient finite_difference_gradient(const DualProblem &p, const DualVariables &v) {
    constexpr double h = 1e-6;
    DualGradient grad{Eigen::MatrixXd::Zero(p.n(), p.q()), Eigen::MatrixXd::Zero(p.n(), p.q()),
                      Eigen::MatrixXd::Zero(p.n(), p.q()), Eigen::MatrixXd::Zero(p.n(), p.q())};
    auto probe = [&](Eigen::MatrixXd DualVariables::*field, Eigen::MatrixXd DualGradient::*out) {
        for (int k = 0; k < p.q(); ++k) {
            for (int i = 0; i < p.n(); ++i) {
                DualVariables up = v;
                DualVariables down = v;
                (up.*field)(i, k) += h;
                (down.*field)(i, k) -= h;
                (grad.*out)(i, k) = (dual_objective(p, up) - dual_objective(p, down)) / (2.0 * h);
            }
        }
    };
    probe(&DualVariables::alpha, &DualGradient::alpha);
    probe(&DualVariables::alpha_star, &DualGradient::alpha_star);
    probe(&DualVariables::beta_plus, &DualGradient::beta_plus);
    probe(&DualVariables::beta_minus, &DualGradient::beta_minus);
    return grad;
}

}  // namespace

std::pair<double, double> project_triangle(double plus, double minus, double D) {
    plus = std::max(plus, 0.0);
    minus = std::max(minus, 0.0);
    if (plus + minus <= D) {
        return {plus, minus};
    }
    // Onto the face plus + minus = D, then clipped to its endpoints.
    const double t = std::clamp(0.5 * (plus - minus + D), 0.0, D);
    return {t, D - t};
}

namespace {

void project_packed(const DualProblem &p, int k, Eigen::VectorXd &z) {
    const int n = p.n();
    const double D = p.beta_bound();
    for (int i = 0; i < n; ++i) {
        z(i) = std::clamp(z(i), 0.0, p.alpha_bound()(i, k));
        z(n + i) = std::clamp(z(n + i), 0.0, p.alpha_star_bound()(i, k));
        const auto [plus, minus] = project_triangle(z(2 * n + i), z(3 * n + i), D);
        z(2 * n + i) = plus;
        z(3 * n + i) = minus;
    }
}

}  // namespace

DualVariables project_feasible(const DualProblem &p, const DualVariables &raw) {
    DualVariables out = raw;
    const double D = p.beta_bound();
    for (int k = 0; k < p.q(); ++k) {
        for (int i = 0; i < p.n(); ++i) {
            out.alpha(i, k) = std::clamp(raw.alpha(i, k), 0.0, p.alpha_bound()(i, k));
            out.alpha_star(i, k) = std::clamp(raw.alpha_star(i, k), 0.0, p.alpha_star_bound()(i, k));
            const auto [plus, minus] = project_triangle(raw.beta_plus(i, k), raw.beta_minus(i, k), D);
            out.beta_plus(i, k) = plus;
            out.beta_minus(i, k) = minus;
        }
    }
    return out;
}

double gram_row_sum_bound(const DualProblem &p) {
    double bound = p.gram().K.cwiseAbs().rowwise().sum().maxCoeff();
    if (p.uses_privileged()) {
        bound = std::max(bound, p.gram().K_star.cwiseAbs().rowwise().sum().maxCoeff());
    }
    return bound;
}

double block_objective(const DualProblem &p, const DualVariables &v) {
    std::vector<QpBlock> blocks;
    std::vector<Eigen::VectorXd> z;
    for (int k = 0; k < p.q(); ++k) {
        blocks.push_back(assemble(p, k));
        z.push_back(pack(v, k));
    }
    return quadratic_value(blocks, z);
}

OracleResult pg_solve(const DualProblem &p, const OracleConfig &cfg) {
    const double L = gram_row_sum_bound(p);
    const double step = cfg.step > 0.0 ? cfg.step : (L > 0.0 ? 1e-2 / L : 1e-2);

    std::vector<QpBlock> blocks;
    for (int k = 0; k < p.q(); ++k) {
        blocks.push_back(assemble(p, k));
    }

    auto start = DualVariables::zeros(p.n(), p.q());
    if (cfg.random_start) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (auto *m : {&start.alpha, &start.alpha_star, &start.beta_plus, &start.beta_minus}) {
            for (Eigen::Index t = 0; t < m->size(); ++t) {
                m->data()[t] = unit(rng) * std::max(1.0, p.beta_bound());
            }
        }
        start = project_feasible(p, start);
    }
    std::vector<Eigen::VectorXd> z;
    for (int k = 0; k < p.q(); ++k) {
        z.push_back(pack(start, k));
    }

    OracleResult result;
    result.variables = to_variables(p, z);
    result.objective = quadratic_value(blocks, z);
    for (long it = 1; it <= cfg.iters; ++it) {
        if (cfg.paranoid) {
            const auto grad = finite_difference_gradient(p, to_variables(p, z));
            auto moved = to_variables(p, z);
            moved.alpha += step * grad.alpha;
            moved.alpha_star += step * grad.alpha_star;
            moved.beta_plus += step * grad.beta_plus;
            moved.beta_minus += step * grad.beta_minus;
            const auto projected = project_feasible(p, moved);
            for (int k = 0; k < p.q(); ++k) {
                z[static_cast<std::size_t>(k)] = pack(projected, k);
            }
        } else {
            for (int k = 0; k < p.q(); ++k) {
                const auto &b = blocks[static_cast<std::size_t>(k)];
                auto &zk = z[static_cast<std::size_t>(k)];
                zk += step * (b.linear + b.hessian * zk);
                project_packed(p, k, zk);
            }
        }
        const bool checkpoint = cfg.checkpoint_stride > 0 && it % cfg.checkpoint_stride == 0;
        if (checkpoint || it == cfg.iters) {
            const double value = quadratic_value(blocks, z);
            if (checkpoint) {
                result.checkpoints.push_back(value);
            }
            if (value > result.objective) {
                result.objective = value;
                result.variables = to_variables(p, z);
            }
        }
    }
    return result;
}

}  // namespace rankpi::oracle
