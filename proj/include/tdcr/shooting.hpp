#pragma once

#include <span>
#include <tuple>
#include <vector>

#include "tdcr/dynamics.hpp"

namespace tdcr {

struct ShootingConfig {
    double tolerance = 1e-6;      // residual norm, force units
    int max_iterations = 50;
    double fd_step_relative = 1e-7;
    double fd_step_absolute = 1e-9;
    int max_halvings = 8;
    // trust damping used only when the line-searched Newton step stalls
    double lm_initial_mu = 1e-3;
    double lm_growth = 4.0;
    int lm_max_tries = 20;
};

struct ShootingReport {
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;
    double jacobian_condition = 0.0;  // of the last factored Jacobian, 0 if none
};

// Bundles everything a residual evaluation needs besides the guess.
struct ShootingProblem {
    const RodParams& params;
    const StiffnessSet& stiff;
    const TendonLayout& layout;
    const BdfCoeffs& coeffs;
    const HistoryBuffer& history;
    std::span<const double> tensions;
    Vec3 tip_force = Vec3::Zero();
    double time = 0.0;
};

/// Free-end residual of a base-load guess. Moment components are scaled by
/// 1/L so force and moment enter the convergence norm commensurately.
inline Vec6 shooting_residual(const Vec6& guess, const ShootingProblem& prob,
                              RodTrajectoryStep* out_step = nullptr) {
    RodTrajectoryStep step =
        propagate(guess.head<3>(), guess.tail<3>(), prob.tensions, prob.params, prob.stiff,
                  prob.layout, prob.coeffs, prob.history, prob.time);
    const auto [n_req, m_req] = free_end_bc(step.tip(), prob.tensions, prob.layout, prob.tip_force);
    Vec6 r;
    r.head<3>() = step.tip().n - n_req;
    r.tail<3>() = (step.tip().m - m_req) / prob.params.length;
    if (out_step) *out_step = std::move(step);
    return r;
}

/// Damped Newton on the base loads with a forward-difference Jacobian,
/// recomputed every iteration. Step halving (up to max_halvings) when the
/// residual norm does not decrease; divergent trial evaluations count as
/// non-improving. When the line search stalls (the Newton direction's linear
/// range collapses under a hard tension transient), one Marquardt-damped
/// least-squares step restores progress.
inline std::tuple<Vec6, RodTrajectoryStep, ShootingReport>
shooting_solve(Vec6 guess, const ShootingProblem& prob, const ShootingConfig& cfg = {}) {
    RodTrajectoryStep step;
    Vec6 r = shooting_residual(guess, prob, &step);
    double rnorm = r.norm();

    ShootingReport report;
    report.residual_norm = rnorm;
    if (rnorm <= cfg.tolerance) {
        report.converged = true;
        return {guess, std::move(step), report};
    }

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        report.iterations = iter;

        Mat6 J;
        for (int col = 0; col < 6; ++col) {
            const double h = std::max(cfg.fd_step_relative * std::abs(guess[col]),
                                      cfg.fd_step_absolute);
            Vec6 perturbed = guess;
            perturbed[col] += h;
            J.col(col) = (shooting_residual(perturbed, prob) - r) / h;
        }

        Eigen::PartialPivLU<Mat6> lu(J);
        const double rc = lu.rcond();
        if (!(rc > 1e-12))
            throw SingularSystemError(rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity(),
                                      "shooting Jacobian");
        report.jacobian_condition = 1.0 / rc;
        const Vec6 newton_step = lu.solve(-r);

        // Backtracking line search on the residual norm.
        bool improved = false;
        Vec6 best_guess = guess;
        Vec6 best_r = r;
        double best_norm = rnorm;
        RodTrajectoryStep best_step;
        auto try_step = [&](const Vec6& trial) {
            try {
                RodTrajectoryStep trial_step;
                const Vec6 trial_r = shooting_residual(trial, prob, &trial_step);
                const double trial_norm = trial_r.norm();
                if (trial_norm < best_norm) {
                    best_guess = trial;
                    best_r = trial_r;
                    best_norm = trial_norm;
                    best_step = std::move(trial_step);
                    improved = true;
                }
            } catch (const DivergenceError&) {
                // counts as non-improving
            }
            return improved;
        };

        double lambda = 1.0;
        for (int halving = 0; halving <= cfg.max_halvings; ++halving, lambda *= 0.5)
            if (try_step(guess + lambda * newton_step)) break;

        if (!improved) {
            const Mat6 JtJ = J.transpose() * J;
            const Vec6 Jtr = J.transpose() * r;
            Mat6 D = Mat6::Zero();
            for (int i = 0; i < 6; ++i) D(i, i) = std::max(JtJ(i, i), 1e-12);
            double mu = cfg.lm_initial_mu;
            for (int t = 0; t < cfg.lm_max_tries; ++t, mu *= cfg.lm_growth)
                if (try_step(guess + (JtJ + mu * D).ldlt().solve(-Jtr))) break;
        }

        if (!improved)
            throw NonConvergenceError(iter, rnorm);

        guess = best_guess;
        r = best_r;
        rnorm = best_norm;
        step = std::move(best_step);
        report.residual_norm = rnorm;

        if (rnorm <= cfg.tolerance) {
            report.converged = true;
            return {guess, std::move(step), report};
        }
    }
    throw NonConvergenceError(cfg.max_iterations, rnorm);
}

/// Owns one rod's evolving state: history buffer, previous converged base
/// loads (the warm start), and the running clock.
class Simulator {
public:
    Simulator(RodParams params, TendonLayout layout, double dt, double alpha,
              ShootingConfig shooting = {})
        : params_(std::move(params)),
          layout_(std::move(layout)),
          stiff_(build_stiffness(params_)),
          coeffs_(bdf_coeffs(dt, alpha)),
          shooting_(shooting),
          history_(params_.node_count) {}

    /// Solve the static problem (time terms frozen) and cold-start the
    /// history from it. This is the t = 0 state of every run.
    ShootingReport initialize_static(std::span<const double> tensions,
                                     const Vec3& tip_force = Vec3::Zero()) {
        const BdfCoeffs frozen = static_coeffs();
        HistoryBuffer no_history(params_.node_count);
        ShootingProblem prob{params_, stiff_, layout_, frozen, no_history, tensions, tip_force, 0.0};
        auto [guess, step, report] = shooting_solve(Vec6::Zero(), prob, shooting_);
        base_guess_ = guess;
        current_ = std::move(step);
        time_ = 0.0;
        history_.initialize_from(current_, coeffs_);
        return report;
    }

    /// One implicit timestep: shooting solve warm-started from the previous
    /// base loads, then history advance.
    ShootingReport step(std::span<const double> tensions, const Vec3& tip_force = Vec3::Zero()) {
        const double t_next = time_ + coeffs_.dt;
        ShootingProblem prob{params_, stiff_, layout_, coeffs_, history_, tensions, tip_force, t_next};
        auto [guess, step, report] = shooting_solve(base_guess_, prob, shooting_);
        base_guess_ = guess;
        current_ = std::move(step);
        time_ = t_next;
        history_.advance(current_, coeffs_);
        return report;
    }

    const RodTrajectoryStep& current() const { return current_; }
    const RodParams& params() const { return params_; }
    const TendonLayout& layout() const { return layout_; }
    const StiffnessSet& stiffness() const { return stiff_; }
    const BdfCoeffs& coeffs() const { return coeffs_; }
    const HistoryBuffer& history() const { return history_; }
    const Vec6& base_guess() const { return base_guess_; }
    double time() const { return time_; }

private:
    RodParams params_;
    TendonLayout layout_;
    StiffnessSet stiff_;
    BdfCoeffs coeffs_;
    ShootingConfig shooting_;
    HistoryBuffer history_;
    RodTrajectoryStep current_;
    Vec6 base_guess_ = Vec6::Zero();
    double time_ = 0.0;
};

}  // namespace tdcr
