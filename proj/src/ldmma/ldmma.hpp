#ifndef BHO_LDMMA_LDMMA_HPP
#define BHO_LDMMA_LDMMA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "models/model.hpp"
#include "reform/assemble.hpp"

namespace bho::ldmma {

struct RunConfig {
    double epsilon = 0.0;  // 0 picks the per-model default
    double beta = 1e-3;
    Eigen::VectorXd lambda0;  // empty picks the per-model default
    int max_outer_iters = 100;
    double step_tol = 1e-6;
    reform::MajorizationPolicy majorization = reform::MajorizationPolicy::Auto;
    /* Subproblems run tighter than the stand-alone solver default: iterate
     * feasibility and the sufficient-decrease property are checked at
     * absolute 1e-8 level, which 1e-8-relative solves cannot guarantee. */
    solver::Settings solver_settings{200, 1e-10, 1e-10, 1e-10, {}, false};
    std::uint64_t seed = 0;  // reserved for randomized tie-breaking; unused by default

    void validate() const;
};

/// Relaxation defaults: elastic net 0.01; sparse group lasso 1; SVM 1 for
/// 3-fold and 5 for 6-fold cross-validation.
double default_epsilon(const models::Model& model);
/// Starting hyperparameters: elastic net (0.01, 0.01); sparse group lasso
/// 0.1 per entry; SVM lambda = 0.1 with the weight cap at its upper bound.
Eigen::VectorXd default_lambda0(const models::Model& model);

struct TrajectoryRecord {
    int k = 0;
    double ul_objective = 0.0;
    double step_norm = 0.0;           // ||z_k - z_{k-1}||, 0 at k = 0
    double step_norm_relative = 0.0;  // scaled by 1 + ||z_{k-1}||
    double gap_value = 0.0;           // duality_gap_value at z_k
    int subproblem_iterations = 0;
    double subproblem_time_s = 0.0;
    solver::Status subproblem_status = solver::Status::Optimal;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    std::string to_jsonl() const;
};

struct RunResult {
    reform::IteratePoint final_point;
    Trajectory trajectory;
    bool converged = false;
    solver::Status status = solver::Status::Optimal;  // of the last subproblem
    int iterations = 0;                               // outer iterations taken
};

/// Solve the lower-level problem at lambda0 and assemble the starting iterate
/// with its dual certificates; its duality gap value vanishes to solver
/// accuracy, so it is feasible for the first subproblem.
reform::IteratePoint initialize(const models::Model& model, const Eigen::VectorXd& lambda0,
                                const solver::Settings& settings = {});

/// The outer loop: repeatedly solve the majorized proximal subproblem at the
/// current anchor until the relative step norm drops below step_tol or the
/// iteration budget runs out.
RunResult run(const models::Model& model, const RunConfig& config);

struct KktReport {
    double gap_activity = 0.0;  // duality_gap_value - epsilon
    Eigen::VectorXd p_activities;
    double fixed_point_residual = 0.0;
    double fixed_point_relative = 0.0;
    bool stationary = false;  // relative residual <= step_tol
    double gap_row_multiplier = 0.0;
};

/// Operational stationarity check: constraint activities plus the step
/// produced by one extra subproblem solve at z.
KktReport kkt_report(const models::Model& model, const reform::IteratePoint& z,
                     const RunConfig& config);

}  // namespace bho::ldmma

#endif
