#include "rankpi/fw_solver.hpp"

#include "rankpi/data.hpp"
#include "rankpi/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

namespace rankpi {

namespace {

constexpr double curvature_floor = -1e-15;
constexpr int refresh_period = 100;

double alpha_vertex(double partial, double bound) { return partial > 0.0 ? bound : 0.0; }

struct BetaVertex {
    double plus = 0.0;
    double minus = 0.0;
};

BetaVertex beta_vertex(double partial_plus, double partial_minus, double D) {
    BetaVertex best;
    double value = 0.0;
    if (D * partial_plus > value) {
        best = {D, 0.0};
        value = D * partial_plus;
    }
    if (D * partial_minus > value) {
        best = {0.0, D};
    }
    return best;
}

double step_size(double slope, double curvature) {
    if (curvature < curvature_floor) {
        return std::clamp(slope / -curvature, 0.0, 1.0);
    }
    return slope > 0.0 ? 1.0 : 0.0;
}

double inner(const DualGradient &grad, const DualVariables &d) {
    return grad.alpha.cwiseProduct(d.alpha).sum() + grad.alpha_star.cwiseProduct(d.alpha_star).sum() +
           grad.beta_plus.cwiseProduct(d.beta_plus).sum() + grad.beta_minus.cwiseProduct(d.beta_minus).sum();
}

DualVariables difference(const DualVariables &a, const DualVariables &b) {
    return DualVariables{a.alpha - b.alpha, a.alpha_star - b.alpha_star, a.beta_plus - b.beta_plus,
                         a.beta_minus - b.beta_minus};
}

/**
 * One independent piece of the dual: label k, restricted to the available
 * space, the privileged space, or both with the beta coupling. Variables the
 * block does not own stay at zero for the whole solve.
 */
class LabelBlock {
  public:
    LabelBlock(const DualProblem &p, int k, bool avail, bool priv, bool coupled)
        : p_{p}, k_{k}, avail_{avail}, priv_{priv}, coupled_{coupled} {
        const int n = p.n();
        g_ = Eigen::VectorXd::Zero(n);
        g_star_ = Eigen::VectorXd::Zero(n);
        s_ = Eigen::VectorXd::Zero(n);
        s_star_ = Eigen::VectorXd::Zero(n);
        vert_alpha_ = Eigen::VectorXd::Zero(n);
        vert_alpha_star_ = Eigen::VectorXd::Zero(n);
        vert_plus_ = Eigen::VectorXd::Zero(n);
        vert_minus_ = Eigen::VectorXd::Zero(n);
        vert_g_ = Eigen::VectorXd::Zero(n);
        vert_g_star_ = Eigen::VectorXd::Zero(n);
        k_vert_g_ = Eigen::VectorXd::Zero(n);
        k_vert_g_star_ = Eigen::VectorXd::Zero(n);
    }

    [[nodiscard]] bool converged() const noexcept { return converged_; }
    [[nodiscard]] double gap() const noexcept { return gap_; }
    [[nodiscard]] double objective() const noexcept { return objective_; }

    /// Gradient, vertex, gap and objective at the current iterate; marks convergence.
    void evaluate(const DualVariables &v, double tol) {
        const int n = p_.n();
        const auto sign = p_.sign_coeff().col(k_);
        const auto lin = p_.linear_coeff().col(k_);
        const double eps = p_.epsilon();
        const double D = p_.beta_bound();
        double gap = 0.0;
        double linear = 0.0;
        double quad = 0.0;
        for (int i = 0; i < n; ++i) {
            if (avail_) {
                const double a = v.alpha(i, k_);
                const double partial = lin(i) - sign(i) * s_(i);
                vert_alpha_(i) = alpha_vertex(partial, p_.alpha_bound()(i, k_));
                gap += partial * (vert_alpha_(i) - a);
                linear += lin(i) * a;
                quad += g_(i) * s_(i);
            }
            if (priv_) {
                const double a = v.alpha_star(i, k_);
                const double partial = lin(i) - sign(i) * s_star_(i);
                vert_alpha_star_(i) = alpha_vertex(partial, p_.alpha_star_bound()(i, k_));
                gap += partial * (vert_alpha_star_(i) - a);
                linear += lin(i) * a;
                quad += g_star_(i) * s_star_(i);
            }
            if (coupled_) {
                const double bp = v.beta_plus(i, k_);
                const double bm = v.beta_minus(i, k_);
                const double diff = s_(i) - s_star_(i);
                const double partial_plus = diff - eps;
                const double partial_minus = -diff - eps;
                const auto vertex = beta_vertex(partial_plus, partial_minus, D);
                vert_plus_(i) = vertex.plus;
                vert_minus_(i) = vertex.minus;
                gap += partial_plus * (vertex.plus - bp) + partial_minus * (vertex.minus - bm);
                linear -= eps * (bp + bm);
            }
        }
        gap_ = gap;
        objective_ = linear - 0.5 * quad;
        if (!std::isfinite(gap_) || !std::isfinite(objective_)) {
            throw NumericalError("non-finite dual objective or gradient (label " + std::to_string(k_) +
                                 "); check the Gram matrices");
        }
        if (gap_ / std::max(1.0, std::abs(objective_)) <= tol) {
            converged_ = true;
        }
    }

    /// Exact line search toward the vertex found by the last evaluate().
    void step(DualVariables &v, bool refresh) {
        const int n = p_.n();
        const auto sign = p_.sign_coeff().col(k_);
        double curvature = 0.0;
        Eigen::VectorXd k_delta;
        Eigen::VectorXd k_delta_star;
        if (avail_) {
            update_vertex_product(p_.gram().K, vertex_g(sign, vert_alpha_, -1.0), vert_g_, k_vert_g_, refresh);
            k_delta = k_vert_g_ - s_;
            curvature -= (vert_g_ - g_).dot(k_delta);
        }
        if (priv_) {
            update_vertex_product(p_.gram().K_star, vertex_g(sign, vert_alpha_star_, 1.0), vert_g_star_,
                                  k_vert_g_star_, refresh);
            k_delta_star = k_vert_g_star_ - s_star_;
            curvature -= (vert_g_star_ - g_star_).dot(k_delta_star);
        }
        const double gamma = step_size(gap_, curvature);
        if (gamma > 0.0) {
            for (int i = 0; i < n; ++i) {
                if (avail_) {
                    v.alpha(i, k_) += gamma * (vert_alpha_(i) - v.alpha(i, k_));
                }
                if (priv_) {
                    v.alpha_star(i, k_) += gamma * (vert_alpha_star_(i) - v.alpha_star(i, k_));
                }
                if (coupled_) {
                    v.beta_plus(i, k_) += gamma * (vert_plus_(i) - v.beta_plus(i, k_));
                    v.beta_minus(i, k_) += gamma * (vert_minus_(i) - v.beta_minus(i, k_));
                }
            }
            recompute_g(v);
            if (avail_) {
                s_ += gamma * k_delta;
            }
            if (priv_) {
                s_star_ += gamma * k_delta_star;
            }
        }
        if (refresh) {
            refresh_products();
        }
    }

    /// Exact s = K g; washes out drift from the incremental updates.
    void refresh_products() {
        if (avail_) {
            s_.noalias() = p_.gram().K * g_;
        }
        if (priv_) {
            s_star_.noalias() = p_.gram().K_star * g_star_;
        }
    }

  private:
    /// g of the current vertex; bridge_sign is -1 for the available space, +1 for the privileged one.
    Eigen::VectorXd vertex_g(const Eigen::Ref<const Eigen::VectorXd> &sign, const Eigen::VectorXd &alpha,
                             double bridge_sign) const {
        Eigen::VectorXd out = sign.cwiseProduct(alpha);
        if (coupled_) {
            out += bridge_sign * (vert_plus_ - vert_minus_);
        }
        return out;
    }

    /// Keeps K * vertex_g current, touching only the columns whose coefficient changed.
    static void update_vertex_product(const Eigen::MatrixXd &K, Eigen::VectorXd next, Eigen::VectorXd &current,
                                      Eigen::VectorXd &product, bool refresh) {
        const Eigen::Index n = next.size();
        Eigen::Index changed = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            changed += next(i) != current(i) ? 1 : 0;
        }
        if (refresh || 4 * changed >= n) {
            product.noalias() = K * next;
        } else if (changed > 0) {
            for (Eigen::Index i = 0; i < n; ++i) {
                const double delta = next(i) - current(i);
                if (delta != 0.0) {
                    product += delta * K.col(i);
                }
            }
        }
        current = std::move(next);
    }

    void recompute_g(const DualVariables &v) {
        const auto sign = p_.sign_coeff().col(k_);
        const auto bridge = v.beta_plus.col(k_) - v.beta_minus.col(k_);
        if (avail_) {
            g_ = sign.cwiseProduct(v.alpha.col(k_)) - bridge;
        }
        if (priv_) {
            g_star_ = sign.cwiseProduct(v.alpha_star.col(k_)) + bridge;
        }
    }

    const DualProblem &p_;
    int k_;
    bool avail_;
    bool priv_;
    bool coupled_;
    bool converged_ = false;
    double gap_ = 0.0;
    double objective_ = 0.0;
    Eigen::VectorXd g_, g_star_, s_, s_star_;
    Eigen::VectorXd vert_alpha_, vert_alpha_star_, vert_plus_, vert_minus_;
    Eigen::VectorXd vert_g_, vert_g_star_, k_vert_g_, k_vert_g_star_;
};

std::vector<LabelBlock> make_blocks(const DualProblem &p) {
    std::vector<LabelBlock> blocks;
    const bool privileged = p.uses_privileged();
    const bool coupled = privileged && p.beta_bound() > 0.0;
    for (int k = 0; k < p.q(); ++k) {
        if (coupled) {
            blocks.emplace_back(p, k, true, true, true);
        } else {
            blocks.emplace_back(p, k, true, false, false);
            if (privileged) {
                blocks.emplace_back(p, k, false, true, false);
            }
        }
    }
    return blocks;
}

}  // namespace

DualVariables lmo(const DualProblem &p, const DualGradient &grad) {
    auto s = DualVariables::zeros(p.n(), p.q());
    const double D = p.beta_bound();
    for (int k = 0; k < p.q(); ++k) {
        for (int i = 0; i < p.n(); ++i) {
            s.alpha(i, k) = alpha_vertex(grad.alpha(i, k), p.alpha_bound()(i, k));
            s.alpha_star(i, k) = alpha_vertex(grad.alpha_star(i, k), p.alpha_star_bound()(i, k));
            const auto vertex = beta_vertex(grad.beta_plus(i, k), grad.beta_minus(i, k), D);
            s.beta_plus(i, k) = vertex.plus;
            s.beta_minus(i, k) = vertex.minus;
        }
    }
    return s;
}

double fw_gap(const DualProblem &p, const DualVariables &v, const DualVariables &s) {
    return inner(dual_gradient(p, v), difference(s, v));
}

double exact_line_search(const DualProblem &p, const DualVariables &v, const DualVariables &s) {
    const auto d = difference(s, v);
    const double slope = inner(dual_gradient(p, v), d);
    // g is linear in the variables, so g_vars(d) is the change of g along the segment.
    const auto [dg, dg_star] = g_vars(p, d);
    double curvature = -dg.cwiseProduct(p.gram().K * dg).sum();
    if (p.uses_privileged()) {
        curvature -= dg_star.cwiseProduct(p.gram().K_star * dg_star).sum();
    }
    return step_size(slope, curvature);
}

SolveResult solve(const DualProblem &p, const TrainConfig &cfg, const SolveOptions &options) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    SolveResult result{DualVariables::zeros(p.n(), p.q()), SolveReport{}};
    auto &v = result.variables;
    auto &report = result.report;
    auto blocks = make_blocks(p);

    auto totals = [&blocks] {
        double gap = 0.0;
        double objective = 0.0;
        for (const auto &b : blocks) {
            gap += b.gap();
            objective += b.objective();
        }
        return std::pair{gap, objective};
    };

    bool all_converged = false;
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        all_converged = true;
        for (auto &b : blocks) {
            if (!b.converged()) {
                b.evaluate(v, cfg.tol);
            }
            all_converged = all_converged && b.converged();
        }
        const auto [gap, objective] = totals();
        report.gap_history.push_back(gap);
        report.objective_history.push_back(objective);
        report.iterations = iter;
        if (options.log != nullptr && options.log_stride > 0 && (iter == 1 || iter % options.log_stride == 0)) {
            *options.log << "iter " << iter << " objective " << format_real(objective) << " gap "
                         << format_real(gap) << '\n';
        }
        if (all_converged) {
            break;
        }
        const bool refresh = iter % refresh_period == 0;
        for (auto &b : blocks) {
            if (!b.converged()) {
                b.step(v, refresh);
            }
        }
        if (options.observer) {
            options.observer(iter, v);
        }
    }

    // Final certificate at the returned iterate, from exact products.
    bool certified = true;
    for (auto &b : blocks) {
        const bool was_converged = b.converged();
        b.refresh_products();
        b.evaluate(v, cfg.tol);
        certified = certified && (was_converged || b.converged());
    }
    report.final_gap = totals().first;
    report.final_objective = dual_objective(p, v);
    report.converged = all_converged || certified;
    if (!std::isfinite(report.final_objective)) {
        throw NumericalError("non-finite final dual objective");
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (options.log != nullptr && options.log_stride > 0) {
        *options.log << "done " << summarize(report) << " wall_time " << report.wall_time << "s\n";
    }
    return result;
}

std::string summarize(const SolveReport &report) {
    std::ostringstream out;
    out << "iterations=" << report.iterations << " objective=" << format_real(report.final_objective)
        << " gap=" << format_real(report.final_gap) << " converged=" << (report.converged ? "true" : "false");
    return out.str();
}

}  // namespace rankpi
